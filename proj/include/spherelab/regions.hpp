#pragma once

#include <string>
#include <vector>

#include "spherelab/bigint.hpp"

namespace spherelab::regions {

// A point (1/p, 1/r) in the unit square, exact.
struct ExponentPoint {
  BigRational inv_p;
  BigRational inv_r;

  bool operator==(const ExponentPoint&) const = default;
};

enum class Name { T, Tstar, Qstar, Rstar, Sstar, R, S };

Name parse_name(const std::string& s);  // throws UnknownRegionError
std::string name_string(Name n);

// Open region given as the interior of the convex hull of its vertices;
// vertices are stored counterclockwise with collinear points removed.
struct ConvexRegion {
  Name name;
  int d;
  std::vector<ExponentPoint> vertices;
};

// Exact vertices from the closed-form vertex lists; collinear degeneracies
// (small d) are cleaned by an exact convex hull pass.  The starred regions
// are meaningful for d >= 5; smaller d only triggers a stderr warning since
// the formulas still evaluate.
ConvexRegion region_vertices(Name name, int d);

// Strict interior membership via exact orientation tests; boundary points
// (including vertices) are outside.
bool contains(const ConvexRegion& region, const ExponentPoint& point);

// closure(b) strictly inside a: every vertex of b inside-or-on a and the
// hulls differ (area comparison), all exact.
bool strict_superset(const ConvexRegion& a, const ConvexRegion& b);

// max{ 1/p + 2/d, 1/r + 2/(pd) } <= 1, exact.
bool necessary_condition(const ExponentPoint& point, int d);

// d * (1/r' - 1/p) = d * ((1 - 1/r) - 1/p), exact.
BigRational improving_exponent(const ExponentPoint& point, int d);

// Twice the area of the hull (shoelace), exact and nonnegative.
BigRational area2(const ConvexRegion& region);

}  // namespace spherelab::regions
