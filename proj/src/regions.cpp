#include "spherelab/regions.hpp"

#include <algorithm>
#include <iostream>

#include "spherelab/errors.hpp"

namespace spherelab::regions {

namespace {

using Q = BigRational;

// Cross product (b - a) x (c - a); sign gives orientation.
Q cross(const ExponentPoint& a, const ExponentPoint& b, const ExponentPoint& c) {
  return (b.inv_p - a.inv_p) * (c.inv_r - a.inv_r) -
         (b.inv_r - a.inv_r) * (c.inv_p - a.inv_p);
}

// Monotone chain, strictly convex (collinear points dropped).
std::vector<ExponentPoint> convex_hull(std::vector<ExponentPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const ExponentPoint& a, const ExponentPoint& b) {
    if (a.inv_p != b.inv_p) return a.inv_p < b.inv_p;
    return a.inv_r < b.inv_r;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<ExponentPoint> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;  // counterclockwise
}

ExponentPoint pt(Q x, Q y) { return {std::move(x), std::move(y)}; }

ExponentPoint midpoint(const ExponentPoint& a, const ExponentPoint& b) {
  return {(a.inv_p + b.inv_p) / 2, (a.inv_r + b.inv_r) / 2};
}

std::vector<ExponentPoint> t_vertices(int d) {
  return {
      pt(Q(0), Q(1)),
      pt(Q(d - 1, d), Q(1, d)),
      pt(Q(d - 1, d), Q(d - 1, d)),
      pt(Q(std::int64_t(d) * d - d, std::int64_t(d) * d + 1),
         Q(std::int64_t(d) * d - d + 2, std::int64_t(d) * d + 1)),
  };
}

// Fourth vertex shared by the starred residual regions:
//   ( (1/2)((d^2-d)/(d^2+1) + 1)(d-4)/(d-1) + (3/2)/(d-1),
//     (1/2)((d^2-d+2)/(d^2+1) + 1)(d-4)/(d-1) + (3/2)/(d-1) ).
ExponentPoint rs_star_vertex4(int d) {
  Q d2(std::int64_t(d) * d + 1);
  Q scale = Q(d - 4, 2 * (d - 1));
  Q shift = Q(3, 2 * (d - 1));
  Q x = (Q(std::int64_t(d) * d - d) / d2 + 1) * scale + shift;
  Q y = (Q(std::int64_t(d) * d - d + 2) / d2 + 1) * scale + shift;
  return {x, y};
}

}  // namespace

Name parse_name(const std::string& s) {
  if (s == "T") return Name::T;
  if (s == "Tstar") return Name::Tstar;
  if (s == "Qstar") return Name::Qstar;
  if (s == "Rstar") return Name::Rstar;
  if (s == "Sstar") return Name::Sstar;
  if (s == "R") return Name::R;
  if (s == "S") return Name::S;
  throw UnknownRegionError("unknown region name: " + s);
}

std::string name_string(Name n) {
  switch (n) {
    case Name::T: return "T";
    case Name::Tstar: return "Tstar";
    case Name::Qstar: return "Qstar";
    case Name::Rstar: return "Rstar";
    case Name::Sstar: return "Sstar";
    case Name::R: return "R";
    case Name::S: return "S";
  }
  throw UnknownRegionError("unknown region enum");
}

ConvexRegion region_vertices(Name name, int d) {
  if (d < 2) throw std::invalid_argument("region_vertices: d must be >= 2");
  bool discrete = name != Name::T && name != Name::Tstar;
  if (discrete && d < 5)
    std::cerr << "[regions] warning: " << name_string(name)
              << " is outside its theorem range for d = " << d << "\n";

  std::vector<ExponentPoint> v;
  switch (name) {
    case Name::T:
      v = t_vertices(d);
      break;
    case Name::Tstar: {
      // Midpoints between the continuous improving region and the boundary
      // set { max(1/p, 1/r) = 1 }, realized on the two vertex sets.
      std::vector<ExponentPoint> boundary = {pt(Q(1), Q(0)), pt(Q(1), Q(1)),
                                             pt(Q(0), Q(1))};
      for (const ExponentPoint& a : t_vertices(d))
        for (const ExponentPoint& b : boundary) v.push_back(midpoint(a, b));
      break;
    }
    case Name::Qstar: {
      Q d2(std::int64_t(d) * d + 1);
      Q scale = Q(d - 4, d - 2);
      Q shift = Q(1, d - 2);
      v = {
          pt(Q(1, d), Q(d - 1, d)),
          pt(Q(d - 2, d), Q(2, d)),
          pt(Q(d - 2, d), Q(d - 2, d)),
          pt(Q(std::int64_t(d) * d - d) / d2 * scale + shift,
             Q(std::int64_t(d) * d - d + 2) / d2 * scale + shift),
      };
      break;
    }
    case Name::Rstar:
      v = {
          pt(Q(0), Q(1)),
          pt(Q(d - 2, d), Q(2, d)),
          pt(Q(d - 2, d), Q(d - 2, d)),
          rs_star_vertex4(d),
      };
      break;
    case Name::Sstar:
      v = {
          pt(Q(3, 2 * (d - 1)), Q(2 * d - 5, 2 * (d - 1))),
          pt(Q(d - 2, d), Q(2, d)),
          pt(Q(d - 2, d), Q(d - 2, d)),
          rs_star_vertex4(d),
      };
      break;
    case Name::R:
      v = {
          pt(Q(0), Q(1)),
          pt(Q(d - 2, d), Q(2, d)),
          pt(Q(d - 2, d), Q(d - 2, d)),
      };
      break;
    case Name::S:
      v = {
          pt(Q(2, d), Q(d - 2, d)),
          pt(Q(d - 2, d), Q(2, d)),
          pt(Q(d - 2, d), Q(d - 2, d)),
      };
      break;
  }
  return {name, d, convex_hull(std::move(v))};
}

bool contains(const ConvexRegion& region, const ExponentPoint& point) {
  const auto& v = region.vertices;
  if (v.size() < 3) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const ExponentPoint& a = v[i];
    const ExponentPoint& b = v[(i + 1) % v.size()];
    if (cross(a, b, point) <= 0) return false;  // outside or on the edge
  }
  return true;
}

namespace {

// Inside-or-on test for closure containment.
bool contains_closed(const ConvexRegion& region, const ExponentPoint& point) {
  const auto& v = region.vertices;
  if (v.empty()) return false;
  if (v.size() == 1) return v[0] == point;
  if (v.size() == 2) {
    if (cross(v[0], v[1], point) != 0) return false;
    ExponentPoint lo = std::min(v[0], v[1], [](const ExponentPoint& a, const ExponentPoint& b) {
      return a.inv_p != b.inv_p ? a.inv_p < b.inv_p : a.inv_r < b.inv_r;
    });
    ExponentPoint hi = (lo == v[0]) ? v[1] : v[0];
    return !(point.inv_p < lo.inv_p || point.inv_p > hi.inv_p ||
             (point.inv_p == lo.inv_p && point.inv_r < std::min(lo.inv_r, hi.inv_r)) ||
             (point.inv_p == hi.inv_p && point.inv_r > std::max(lo.inv_r, hi.inv_r)));
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (cross(v[i], v[(i + 1) % v.size()], point) < 0) return false;
  }
  return true;
}

}  // namespace

bool strict_superset(const ConvexRegion& a, const ConvexRegion& b) {
  for (const ExponentPoint& p : b.vertices)
    if (!contains_closed(a, p)) return false;
  return area2(a) > area2(b);
}

bool necessary_condition(const ExponentPoint& point, int d) {
  if (d < 2) throw std::invalid_argument("necessary_condition: d must be >= 2");
  Q first = point.inv_p + Q(2, d);
  Q second = point.inv_r + Q(2, d) * point.inv_p;
  return first <= 1 && second <= 1;
}

BigRational improving_exponent(const ExponentPoint& point, int d) {
  return Q(d) * ((Q(1) - point.inv_r) - point.inv_p);
}

BigRational area2(const ConvexRegion& region) {
  const auto& v = region.vertices;
  Q total(0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const ExponentPoint& a = v[i];
    const ExponentPoint& b = v[(i + 1) % v.size()];
    total += a.inv_p * b.inv_r - b.inv_p * a.inv_r;
  }
  if (total < 0) total = -total;
  return total;
}

}  // namespace spherelab::regions
