#include "spherelab/lattice.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "spherelab/bigint.hpp"
#include "spherelab/numerics.hpp"

using namespace spherelab;
using namespace spherelab::lattice;

namespace {

// Brute-force coordinate enumeration oracle for r_d(n).
std::uint64_t count_oracle(int d, std::int64_t n) {
  std::int64_t r = 0;
  while (r * r <= n) ++r;
  --r;
  std::uint64_t total = 0;
  std::vector<std::int64_t> c(static_cast<std::size_t>(d), -r);
  for (;;) {
    std::int64_t s = 0;
    for (std::int64_t v : c) s += v * v;
    if (s == n) ++total;
    int j = 0;
    while (j < d) {
      if (++c[static_cast<std::size_t>(j)] <= r) break;
      c[static_cast<std::size_t>(j)] = -r;
      ++j;
    }
    if (j == d) break;
  }
  return total;
}

std::uint64_t divisor_sum(std::uint64_t n) {
  std::uint64_t s = 0;
  for (std::uint64_t e = 1; e <= n; ++e)
    if (n % e == 0) s += e;
  return s;
}

LatticeFunction<BigRational> random_rational_function(int d, SplitMix64& rng,
                                                      int support) {
  LatticeFunction<BigRational> f(d);
  for (int i = 0; i < support; ++i) {
    Point p(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      p[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(rng.next_below(9)) - 4;
    f.add(p, BigRational(static_cast<std::int64_t>(rng.next_below(19)) - 9,
                         1 + static_cast<std::int64_t>(rng.next_below(7))));
  }
  return f;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("sphere_count examples") {
  CHECK(sphere_count(5, 0) == 1);
  CHECK(sphere_count(5, 1) == 10);
  CHECK(sphere_count(4, 3) == 32);
}

TEST_CASE("sphere_count against brute force") {
  for (int d = 1; d <= 4; ++d)
    for (std::int64_t n = 0; n <= 50; ++n) CHECK(sphere_count(d, n) == count_oracle(d, n));
  for (std::int64_t n = 0; n <= 30; ++n) CHECK(sphere_count(5, n) == count_oracle(5, n));
}

TEST_CASE("Jacobi: r_4(n) = 8 sigma(n) for odd n") {
  for (std::uint64_t n = 1; n <= 99; n += 2)
    CHECK(sphere_count(4, static_cast<std::int64_t>(n)) == 8 * divisor_sum(n));
}

TEST_CASE("sphere_points examples") {
  PointList p22 = sphere_points(2, 2);
  CHECK(p22.size() == 4);  // (+-1, +-1)
  for (std::size_t i = 0; i < p22.size(); ++i) {
    CHECK(std::abs(p22[i][0]) == 1);
    CHECK(std::abs(p22[i][1]) == 1);
  }
  PointList origin = sphere_points(3, 0);
  REQUIRE(origin.size() == 1);
  CHECK(origin[0][0] == 0);

  CHECK(sphere_points(5, 2).size() == 40);
}

TEST_CASE("sphere_points count matches sphere_count") {
  for (int d = 2; d <= 5; ++d)
    for (std::int64_t n = 0; n <= 25; ++n)
      CHECK(sphere_points(d, n).size() == sphere_count(d, n));
}

TEST_CASE("spherical_average of a delta") {
  LatticeFunction<BigRational> delta(5);
  delta.add(Point{0, 0, 0, 0, 0}, BigRational(1));
  auto avg = spherical_average(delta, 1);
  CHECK(avg.support_size() == 10);
  CHECK(avg.at(Point{1, 0, 0, 0, 0}) == BigRational(1, 10));
  CHECK(avg.at(Point{0, 0, 0, -1, 0}) == BigRational(1, 10));
  CHECK(avg.at(Point{1, 1, 0, 0, 0}) == BigRational(0));
}

TEST_CASE("mass conservation, exact, random rational inputs") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    int d = 2 + static_cast<int>(rng.next_below(3));
    auto f = random_rational_function(d, rng, 6);
    std::int64_t n = 1 + static_cast<std::int64_t>(rng.next_below(12));
    if (sphere_count(d, n) == 0) continue;
    auto avg = spherical_average(f, n);
    CHECK(avg.total_mass() == f.total_mass());
  }
}

TEST_CASE("averaging ones over a box is one deep inside") {
  LatticeFunction<BigRational> ones(3);
  for (std::int32_t a = -3; a <= 3; ++a)
    for (std::int32_t b = -3; b <= 3; ++b)
      for (std::int32_t c = -3; c <= 3; ++c) ones.add(Point{a, b, c}, BigRational(1));
  auto avg = spherical_average(ones, 4);  // radius 2 sphere
  CHECK(avg.at(Point{0, 0, 0}) == BigRational(1));
  CHECK(avg.at(Point{1, 0, 0}) == BigRational(1));
}

TEST_CASE("self-adjointness on rational inputs") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    int d = 2 + static_cast<int>(rng.next_below(2));
    auto f = random_rational_function(d, rng, 5);
    auto g = random_rational_function(d, rng, 5);
    std::int64_t n = 1 + static_cast<std::int64_t>(rng.next_below(9));
    if (sphere_count(d, n) == 0) continue;
    auto af = spherical_average(f, n);
    auto ag = spherical_average(g, n);
    BigRational lhs(0), rhs(0);
    for (const auto& [p, v] : af.entries()) lhs += v * g.at(p);
    for (const auto& [p, v] : ag.entries()) rhs += v * f.at(p);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("averages contract l1 and linf") {
  SplitMix64 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_rational_function(3, rng, 8);
    std::int64_t n = 1 + static_cast<std::int64_t>(rng.next_below(10));
    if (sphere_count(3, n) == 0) continue;
    auto avg = spherical_average(f, n);
    CHECK(avg.l1_norm() <= f.l1_norm());
    CHECK(avg.linf_norm() <= f.linf_norm());
  }
}

TEST_CASE("empty sphere error") {
  LatticeFunction<double> f(1);
  f.add(Point{0}, 1.0);
  CHECK_THROWS_AS(spherical_average(f, 3), EmptySphereError);  // 3 is not a square
}

TEST_CASE("dyadic maximal of a delta") {
  LatticeFunction<double> delta(5);
  delta.add(Point{0, 0, 0, 0, 0}, 1.0);
  auto dyadic = dyadic_maximal(delta, 1);
  CHECK(dyadic.at(Point{1, 1, 0, 0, 0}) == doctest::Approx(1.0 / 40.0));
  CHECK(dyadic.at(Point{1, 0, 0, 0, 0}) == doctest::Approx(1.0 / 10.0));
  LatticeFunction<double> zero(5);
  CHECK(dyadic_maximal(zero, 2).support_size() == 0);
}

TEST_CASE("dyadic maximal dominates each single scale") {
  SplitMix64 rng(5);
  LatticeFunction<double> f(3);
  for (int i = 0; i < 6; ++i) {
    Point p = {static_cast<std::int32_t>(rng.next_below(5)) - 2,
               static_cast<std::int32_t>(rng.next_below(5)) - 2,
               static_cast<std::int32_t>(rng.next_below(5)) - 2};
    f.add(p, rng.next_unit());
  }
  std::int64_t Lambda = 2;
  auto dyadic = dyadic_maximal(f, Lambda);
  for (std::int64_t n = Lambda * Lambda; n < 4 * Lambda * Lambda; ++n) {
    if (sphere_count(3, n) == 0) continue;
    auto avg = spherical_average(f, n);
    for (const auto& [p, v] : avg.entries()) CHECK(dyadic.at(p) >= std::fabs(v) - 1e-12);
  }
}

TEST_CASE("full maximal certification on a delta") {
  LatticeFunction<double> delta(5);
  delta.add(Point{0, 0, 0, 0, 0}, 1.0);
  auto full = full_maximal(delta, 100);
  CHECK(full.sup.at(Point{1, 0, 0, 0, 0}) == doctest::Approx(0.1));
  CHECK(full.tail_bound < 0.1);
  CHECK(full.certified);
  // r_5 >= 100 on (100, 200]
  auto table = sphere_count_table(5, 200);
  for (std::int64_t n = 101; n <= 200; ++n) CHECK(table[static_cast<std::size_t>(n)] >= 100);
}

TEST_CASE("indicator fast paths agree with the generic operator") {
  SplitMix64 rng(91);
  PointSet e;
  e.d = 3;
  LatticeFunction<double> f(3);
  for (int i = 0; i < 12; ++i) {
    std::int32_t buf[3];
    Point p(3);
    for (int j = 0; j < 3; ++j) {
      buf[j] = static_cast<std::int32_t>(rng.next_below(7)) - 3;
      p[static_cast<std::size_t>(j)] = buf[j];
    }
    if (f.at(p) == 0.0) {
      e.push(std::span<const std::int32_t>(buf, 3));
      f.add(p, 1.0);
    }
  }
  std::int64_t Lambda = 2;
  auto rd = sphere_count_table(3, 4 * Lambda * Lambda);
  auto dyadic = dyadic_maximal(f, Lambda);
  for (std::int32_t x0 = -6; x0 <= 6; ++x0)
    for (std::int32_t x1 = -6; x1 <= 6; ++x1) {
      std::int32_t x[3] = {x0, x1, 1};
      double fast = indicator_dyadic_max_at(e, Lambda, x, rd);
      CHECK(fast == doctest::Approx(dyadic.at(Point{x0, x1, 1})).epsilon(1e-12));
    }
  auto full = full_maximal(f, 9);
  auto rd9 = sphere_count_table(3, 9);
  for (std::int32_t x0 = -4; x0 <= 4; ++x0) {
    std::int32_t x[3] = {x0, 0, 0};
    CHECK(indicator_full_max_at(e, 9, x, rd9) ==
          doctest::Approx(full.sup.at(Point{x0, 0, 0})).epsilon(1e-12));
  }
}

TEST_CASE("serialization round trip") {
  LatticeFunction<double> f(2);
  f.add(Point{3, -1}, 0.5);
  f.add(Point{-2, 7}, -1.25);
  std::stringstream ss;
  serialize(f, ss);
  auto g = deserialize(ss);
  CHECK(g.dim() == 2);
  CHECK(g.support_size() == 2);
  CHECK(g.at(Point{3, -1}) == 0.5);
  CHECK(g.at(Point{-2, 7}) == -1.25);
}

}  // TEST_SUITE
