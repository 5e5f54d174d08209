#include "spherelab/regions.hpp"

#include "doctest.h"
#include "spherelab/errors.hpp"

using namespace spherelab;
using namespace spherelab::regions;

namespace {

ExponentPoint pt(std::int64_t pn, std::int64_t pd, std::int64_t rn, std::int64_t rd) {
  return {BigRational(pn, pd), BigRational(rn, rd)};
}

bool has_vertex(const ConvexRegion& reg, const ExponentPoint& v) {
  for (const ExponentPoint& w : reg.vertices)
    if (w == v) return true;
  return false;
}

}  // namespace

TEST_SUITE("regions") {

TEST_CASE("vertex formulas") {
  CHECK(has_vertex(region_vertices(Name::T, 2), pt(2, 5, 4, 5)));       // T_{2,4}
  CHECK(has_vertex(region_vertices(Name::Rstar, 6), pt(2, 3, 1, 3)));   // R_{6,2,*}
  CHECK(has_vertex(region_vertices(Name::Qstar, 6), pt(97, 148, 101, 148)));
  CHECK_THROWS_AS(parse_name("bogus"), UnknownRegionError);
}

TEST_CASE("all vertices stay in the unit square") {
  for (int d = 2; d <= 12; ++d)
    for (Name name : {Name::T, Name::Tstar}) {
      for (const ExponentPoint& v : region_vertices(name, d).vertices) {
        CHECK(v.inv_p >= 0);
        CHECK(v.inv_p <= 1);
        CHECK(v.inv_r >= 0);
        CHECK(v.inv_r <= 1);
      }
    }
  for (int d = 5; d <= 12; ++d)
    for (Name name : {Name::Qstar, Name::Rstar, Name::Sstar, Name::R, Name::S}) {
      for (const ExponentPoint& v : region_vertices(name, d).vertices) {
        CHECK(v.inv_p >= 0);
        CHECK(v.inv_p <= 1);
        CHECK(v.inv_r >= 0);
        CHECK(v.inv_r <= 1);
      }
    }
}

TEST_CASE("interior membership") {
  ConvexRegion rstar6 = region_vertices(Name::Rstar, 6);
  // vertices are never inside an open region
  for (const ExponentPoint& v : rstar6.vertices) CHECK(!contains(rstar6, v));
  // on the edge from (0,1) to (2/3,1/3): x + y = 1
  CHECK(!contains(rstar6, pt(1, 2, 1, 2)));
  CHECK(contains(rstar6, pt(1, 2, 11, 20)));
}

TEST_CASE("strict containments of the paper regions") {
  for (int d = 6; d <= 12; ++d) {
    CHECK(strict_superset(region_vertices(Name::Rstar, d), region_vertices(Name::R, d)));
    CHECK(area2(region_vertices(Name::Rstar, d)) > area2(region_vertices(Name::R, d)));
  }
  for (int d = 5; d <= 12; ++d) {
    CHECK(strict_superset(region_vertices(Name::Qstar, d), region_vertices(Name::S, d)));
    CHECK(strict_superset(region_vertices(Name::Sstar, d), region_vertices(Name::S, d)));
  }
  // a region never strictly contains itself
  CHECK(!strict_superset(region_vertices(Name::Rstar, 6), region_vertices(Name::Rstar, 6)));
}

TEST_CASE("Sstar and Rstar share the fourth vertex") {
  for (int d = 5; d <= 12; ++d) {
    ConvexRegion r = region_vertices(Name::Rstar, d);
    ConvexRegion s = region_vertices(Name::Sstar, d);
    bool shared = false;
    for (const ExponentPoint& v : r.vertices) shared = shared || has_vertex(s, v);
    CHECK(shared);
  }
}

TEST_CASE("necessary condition") {
  CHECK(necessary_condition(pt(2, 3, 1, 3), 6));
  CHECK(necessary_condition(pt(0, 1, 1, 1), 5));
  CHECK(!necessary_condition(pt(1, 1, 0, 1), 4));  // 1 + 1/2 > 1
  for (int d = 5; d <= 12; ++d)
    for (const ExponentPoint& v : region_vertices(Name::Rstar, d).vertices)
      CHECK(necessary_condition(v, d));
}

TEST_CASE("improving exponent") {
  CHECK(improving_exponent(pt(1, 2, 1, 2), 6) == 0);
  CHECK(improving_exponent(pt(2, 3, 1, 3), 6) == 0);
  CHECK(improving_exponent(pt(0, 1, 1, 1), 5) == 0);
  CHECK(improving_exponent(pt(1, 5, 4, 5), 5) == 0);
  CHECK(improving_exponent(pt(0, 1, 0, 1), 5) == 5);
}

}  // TEST_SUITE
