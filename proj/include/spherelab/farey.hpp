#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace spherelab::farey {

// Exact rational with int64 components, always reduced, den > 0.
// Comparisons cross-multiply in 128-bit, which is exact for every quantity
// this module produces at levels up to 2^15 (mediant denominators stay below
// 2*level^2); levels beyond that are outside the supported range and the
// constructors guard against overflow.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

Rat make_rat(std::int64_t num, std::int64_t den);
Rat rat_add(Rat a, Rat b);
Rat rat_sub(Rat a, Rat b);
int rat_cmp(Rat a, Rat b);  // sign of a - b
inline bool rat_eq(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
double rat_double(Rat a);

// Reduced fraction a/q in [0,1) with q <= level; 0/1 is the sole q = 1 entry.
struct Fraction {
  std::uint64_t num;
  std::uint64_t den;
};

// Half-open arc [left, right) around center; for 0/1 the arc straddles the
// origin of the circle and left is negative.
struct Interval {
  Fraction center;
  Rat left;
  Rat right;
};

struct InverseRange {
  std::uint64_t n1;
  std::uint64_t n2;
};

// All reduced fractions in [0,1) with denominator <= level, ascending,
// generated by the Stern-Brocot next-term recurrence.
std::vector<Fraction> farey_sequence(std::uint64_t level);

// Denominators of the left and right sequence neighbors of a/q at the given
// level: (max q' <= level with q' = +a^{-1} mod q, max q' <= level with
// q' = -a^{-1} mod q).  The 0/1 fraction wraps around the circle.
std::pair<std::uint64_t, std::uint64_t> neighbor_denominators(std::uint64_t a,
                                                              std::uint64_t q,
                                                              std::uint64_t level);

// The dissection arc of a/q: endpoints are the mediants with the two
// neighbors, exact.
Interval farey_interval(std::uint64_t a, std::uint64_t q, std::uint64_t level);

bool interval_contains(const Interval& iv, Rat tau);

// { a in Z_q^x : I(a,q) contains tau }, computed geometrically.  tau is
// normalized to [0,1) first.  q = 1 always yields {0}.
std::vector<std::uint64_t> covering_fractions(Rat tau, std::uint64_t q,
                                              std::uint64_t level);

// The covering set expressed as an inverse range {a : n1 <= a^{-1} <= n2} on
// representatives in [1, q) ([0,0] for q = 1); std::nullopt when the covering
// set is empty.  Throws PropositionViolationError if the covering set is not
// an inverse range.
std::optional<InverseRange> inverse_range(Rat tau, std::uint64_t q,
                                          std::uint64_t level);

}  // namespace spherelab::farey
