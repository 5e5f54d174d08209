#include "spherelab/farey.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "spherelab/arith.hpp"
#include "spherelab/errors.hpp"
#include "spherelab/numerics.hpp"

using namespace spherelab;
using namespace spherelab::farey;

namespace {

// Enumerate-and-sort oracle for the sequence.
std::vector<Fraction> sequence_oracle(std::uint64_t level) {
  std::vector<Fraction> out;
  for (std::uint64_t q = 1; q <= level; ++q)
    for (std::uint64_t a = 0; a < q; ++a)
      if (a == 0 ? q == 1 : std::gcd(a, q) == 1) out.push_back({a, q});
  std::sort(out.begin(), out.end(), [](const Fraction& x, const Fraction& y) {
    return x.num * y.den < y.num * x.den;
  });
  return out;
}

// Direct membership oracle over every interval at the level.
std::vector<std::uint64_t> covering_oracle(Rat tau, std::uint64_t q, std::uint64_t level) {
  std::int64_t r = tau.num % tau.den;
  if (r < 0) r += tau.den;
  tau = make_rat(r, tau.den);
  std::vector<std::uint64_t> out;
  std::uint64_t lo = q == 1 ? 0 : 1;
  for (std::uint64_t a = lo; a < std::max<std::uint64_t>(q, 1); ++a) {
    if (q > 1 && std::gcd(a, q) != 1) continue;
    if (interval_contains(farey_interval(a, q, level), tau)) out.push_back(a);
    if (q == 1) break;
  }
  return out;
}

}  // namespace

TEST_SUITE("farey") {

TEST_CASE("sequence examples") {
  auto f1 = farey_sequence(1);
  REQUIRE(f1.size() == 1);
  CHECK(f1[0].num == 0);
  CHECK(f1[0].den == 1);

  auto f3 = farey_sequence(3);
  REQUIRE(f3.size() == 4);  // 0/1 1/3 1/2 2/3
  CHECK(f3[1].num == 1);
  CHECK(f3[1].den == 3);
  CHECK(f3[2].num == 1);
  CHECK(f3[2].den == 2);
  CHECK(f3[3].num == 2);
  CHECK(f3[3].den == 3);

  auto f5 = farey_sequence(5);
  auto it = std::find_if(f5.begin(), f5.end(),
                         [](const Fraction& f) { return f.num == 2 && f.den == 5; });
  REQUIRE(it != f5.end());
  CHECK((it - 1)->num == 1);
  CHECK((it - 1)->den == 3);
  CHECK((it + 1)->num == 1);
  CHECK((it + 1)->den == 2);
}

TEST_CASE("sequence against enumerate-and-sort oracle") {
  for (std::uint64_t level = 1; level <= 40; ++level) {
    auto got = farey_sequence(level);
    auto want = sequence_oracle(level);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].num == want[i].num);
      CHECK(got[i].den == want[i].den);
    }
  }
}

TEST_CASE("neighbor denominator examples") {
  CHECK(neighbor_denominators(2, 5, 5) == std::pair<std::uint64_t, std::uint64_t>{3, 2});
  CHECK(neighbor_denominators(1, 3, 5) == std::pair<std::uint64_t, std::uint64_t>{4, 5});
  CHECK(neighbor_denominators(1, 2, 2) == std::pair<std::uint64_t, std::uint64_t>{1, 1});
}

TEST_CASE("neighbor formula matches positional neighbors") {
  for (std::uint64_t level = 1; level <= 60; ++level) {
    auto seq = farey_sequence(level);
    std::size_t n = seq.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Fraction& f = seq[i];
      auto [ql, qr] = neighbor_denominators(f.num, f.den, level);
      // circle neighbors with wrap-around
      const Fraction& left = seq[(i + n - 1) % n];
      const Fraction& right = seq[(i + 1) % n];
      CHECK(ql == left.den);
      CHECK(qr == right.den);
    }
  }
}

TEST_CASE("farey neighbor identity |a/q - a'/q'| = 1/(q q')") {
  for (std::uint64_t level = 1; level <= 60; ++level) {
    auto seq = farey_sequence(level);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      Rat gap = rat_sub(make_rat(static_cast<std::int64_t>(seq[i + 1].num),
                                 static_cast<std::int64_t>(seq[i + 1].den)),
                        make_rat(static_cast<std::int64_t>(seq[i].num),
                                 static_cast<std::int64_t>(seq[i].den)));
      CHECK(gap.num == 1);
      CHECK(static_cast<std::uint64_t>(gap.den) == seq[i].den * seq[i + 1].den);
    }
  }
}

TEST_CASE("interval examples") {
  Interval i25 = farey_interval(2, 5, 5);
  CHECK(rat_eq(i25.left, make_rat(3, 8)));
  CHECK(rat_eq(i25.right, make_rat(3, 7)));

  Interval full = farey_interval(0, 1, 1);
  CHECK(rat_eq(full.left, make_rat(-1, 2)));
  CHECK(rat_eq(full.right, make_rat(1, 2)));

  Interval half = farey_interval(1, 2, 3);
  CHECK(rat_eq(half.left, make_rat(2, 5)));
  CHECK(rat_eq(half.right, make_rat(3, 5)));
}

TEST_CASE("intervals tile the circle exactly") {
  for (std::uint64_t level = 1; level <= 80; ++level) {
    auto seq = farey_sequence(level);
    Rat total = make_rat(0, 1);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      Interval iv = farey_interval(seq[i].num, seq[i].den, level);
      total = rat_add(total, rat_sub(iv.right, iv.left));
      // shared mediant endpoints with the successor
      const Fraction& next = seq[(i + 1) % seq.size()];
      Interval nx = farey_interval(next.num, next.den, level);
      Rat right = iv.right;
      Rat nleft = nx.left;
      if (i + 1 == seq.size()) right = rat_sub(right, make_rat(1, 1));  // wrap
      CHECK(rat_eq(right, nleft));
    }
    CHECK(rat_eq(total, make_rat(1, 1)));
  }
}

TEST_CASE("half lengths scaled by q Lambda stay in [1/2, 1]") {
  for (std::uint64_t level = 1; level <= 80; ++level) {
    for (const Fraction& f : farey_sequence(level)) {
      Interval iv = farey_interval(f.num, f.den, level);
      Rat center = make_rat(static_cast<std::int64_t>(f.num),
                            static_cast<std::int64_t>(f.den));
      for (Rat half : {rat_sub(iv.right, center), rat_sub(center, iv.left)}) {
        // q * Lambda * half in [1/2, 1]
        Rat scaled = make_rat(half.num * static_cast<std::int64_t>(f.den * level),
                              half.den);
        CHECK(rat_cmp(scaled, make_rat(1, 2)) >= 0);
        CHECK(rat_cmp(scaled, make_rat(1, 1)) <= 0);
      }
    }
  }
}

TEST_CASE("covering examples") {
  // q = 1 at level 1: the whole circle
  CHECK(covering_fractions(make_rat(7, 13), 1, 1) == std::vector<std::uint64_t>{0});
  // tau = 3/10, q = 3, level 4: I(1/3) = [2/7, 3/8)
  CHECK(covering_fractions(make_rat(3, 10), 3, 4) == std::vector<std::uint64_t>{1});
  // boundary tau = 1/2 at q = 5, level 5 resolved by the half-open convention
  auto got = covering_fractions(make_rat(1, 2), 5, 5);
  CHECK(got == covering_oracle(make_rat(1, 2), 5, 5));
}

TEST_CASE("inverse range examples") {
  auto r2 = inverse_range(make_rat(1, 2), 2, 2);
  REQUIRE(r2.has_value());
  CHECK(r2->n1 == 1);
  CHECK(r2->n2 == 1);

  auto r3 = inverse_range(make_rat(3, 10), 3, 4);
  REQUIRE(r3.has_value());
  CHECK(r3->n1 == 1);
  CHECK(r3->n2 == 1);

  // agreement with the covering set by direct comparison
  Rat tau = rat_add(make_rat(1, 5), make_rat(1, 1000));
  auto cover = covering_fractions(tau, 4, 5);
  auto rng = inverse_range(tau, 4, 5);
  if (cover.empty()) {
    CHECK(!rng.has_value());
  } else {
    REQUIRE(rng.has_value());
    std::vector<std::uint64_t> expect;
    for (std::uint64_t c = rng->n1; c <= rng->n2; ++c)
      if (std::gcd(c, 4ull) == 1)
        expect.push_back(spherelab::arith::mod_inverse(static_cast<std::int64_t>(c), 4).value);
    std::sort(expect.begin(), expect.end());
    std::vector<std::uint64_t> got = cover;
    std::sort(got.begin(), got.end());
    CHECK(got == expect);
  }
}

TEST_CASE("proposition roundtrip, exhaustive small levels") {
  SplitMix64 rng(42);
  for (std::uint64_t level = 1; level <= 24; ++level) {
    std::vector<Rat> taus;
    for (const Fraction& f : farey_sequence(level)) {
      Interval iv = farey_interval(f.num, f.den, level);
      for (Rat end : {iv.left, iv.right}) {
        taus.push_back(end);
        taus.push_back(rat_add(end, make_rat(1, 9973)));
        taus.push_back(rat_sub(end, make_rat(1, 9973)));
      }
    }
    for (int i = 0; i < 60; ++i) {
      std::int64_t den = 1 + static_cast<std::int64_t>(rng.next_below(100000));
      taus.push_back(make_rat(static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(den))), den));
    }
    for (const Rat& tau : taus)
      for (std::uint64_t q = 1; q <= level; ++q) {
        auto rng_q = inverse_range(tau, q, level);  // must not throw
        auto cover = covering_oracle(tau, q, level);
        CHECK(rng_q.has_value() == !cover.empty());
      }
  }
}

TEST_CASE("every tau lies in exactly one interval") {
  SplitMix64 rng(7);
  for (std::uint64_t level : {1ull, 2ull, 5ull, 17ull, 40ull}) {
    auto seq = farey_sequence(level);
    for (int i = 0; i < 200; ++i) {
      std::int64_t den = 1 + static_cast<std::int64_t>(rng.next_below(1u << 20));
      Rat tau = make_rat(static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(den))), den);
      int hits = 0;
      for (const Fraction& f : seq)
        if (interval_contains(farey_interval(f.num, f.den, level), tau)) ++hits;
      CHECK(hits == 1);
    }
  }
}

}  // TEST_SUITE
