#include "spherelab/farey.hpp"

#include <numeric>
#include <stdexcept>

#include "spherelab/arith.hpp"
#include "spherelab/errors.hpp"

namespace spherelab::farey {

namespace {

constexpr std::uint64_t kMaxLevel = 1ull << 15;

void check_level(std::uint64_t level) {
  if (level == 0) throw std::invalid_argument("farey: level must be >= 1");
  if (level > kMaxLevel) throw BadRangeError("farey: level above supported range 2^15");
}

void check_fraction(std::uint64_t a, std::uint64_t q, std::uint64_t level) {
  check_level(level);
  if (q == 0 || q > level) throw BadRangeError("farey: need 1 <= q <= level");
  if (q == 1) {
    if (a != 0) throw BadRangeError("farey: the q = 1 fraction is 0/1");
    return;
  }
  if (a == 0 || a >= q || std::gcd(a, q) != 1)
    throw BadRangeError("farey: a/q must be reduced with 0 < a < q");
}

}  // namespace

Rat make_rat(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("Rat: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

Rat rat_add(Rat a, Rat b) {
  __int128 n = static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
  __int128 d = static_cast<__int128>(a.den) * b.den;
  if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
    throw BadRangeError("Rat: overflow in addition");
  return make_rat(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

Rat rat_sub(Rat a, Rat b) { return rat_add(a, {-b.num, b.den}); }

int rat_cmp(Rat a, Rat b) {
  __int128 lhs = static_cast<__int128>(a.num) * b.den;
  __int128 rhs = static_cast<__int128>(b.num) * a.den;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

double rat_double(Rat a) {
  return static_cast<double>(a.num) / static_cast<double>(a.den);
}

std::vector<Fraction> farey_sequence(std::uint64_t level) {
  check_level(level);
  std::vector<Fraction> out;
  out.push_back({0, 1});
  if (level == 1) return out;
  // Stern-Brocot recurrence: given consecutive a/b < c/d in F_level, the
  // successor is (kc - a)/(kd - b) with k = floor((level + b)/d).
  std::uint64_t a = 0, b = 1, c = 1, d = level;
  while (c < d) {  // stop before reaching 1/1
    out.push_back({c, d});
    std::uint64_t k = (level + b) / d;
    std::uint64_t c2 = k * c - a;
    std::uint64_t d2 = k * d - b;
    a = c;
    b = d;
    c = c2;
    d = d2;
  }
  return out;
}

std::pair<std::uint64_t, std::uint64_t> neighbor_denominators(std::uint64_t a,
                                                              std::uint64_t q,
                                                              std::uint64_t level) {
  check_fraction(a, q, level);
  if (q == 1) return {level, level};  // wrap-around: neighbors are +-1/level
  // Left neighbor satisfies a*q' - a'*q = 1, hence q' = +a^{-1} (mod q);
  // the right neighbor comes with the opposite sign.  The sequence neighbor
  // is the largest admissible representative below the level.
  std::uint64_t inv = arith::mod_inverse(static_cast<std::int64_t>(a), q).value;
  std::uint64_t left = inv + q * ((level - inv) / q);
  std::uint64_t neg = q - inv;
  std::uint64_t right = neg + q * ((level - neg) / q);
  return {left, right};
}

Interval farey_interval(std::uint64_t a, std::uint64_t q, std::uint64_t level) {
  check_fraction(a, q, level);
  auto [ql, qr] = neighbor_denominators(a, q, level);
  // Mediant endpoints with the two neighbors.  Numerators recovered from the
  // determinant identity; for 0/1 the left neighbor is -1/level across 0.
  std::int64_t al, ar;
  if (q == 1) {
    al = -1;
    ar = 1;
  } else {
    al = static_cast<std::int64_t>((a * ql - 1) / q);
    ar = static_cast<std::int64_t>((a * qr + 1) / q);
  }
  Interval iv;
  iv.center = {a, q};
  iv.left = make_rat(static_cast<std::int64_t>(a) + al,
                     static_cast<std::int64_t>(q + ql));
  iv.right = make_rat(static_cast<std::int64_t>(a) + ar,
                      static_cast<std::int64_t>(q + qr));
  return iv;
}

bool interval_contains(const Interval& iv, Rat tau) {
  // tau is expected in [0,1); the 0/1 interval straddles 0, so membership is
  // also checked at tau - 1.
  if (rat_cmp(iv.left, tau) <= 0 && rat_cmp(tau, iv.right) < 0) return true;
  if (iv.left.num < 0) {
    Rat shifted = rat_sub(tau, {1, 1});
    if (rat_cmp(iv.left, shifted) <= 0 && rat_cmp(shifted, iv.right) < 0) return true;
  }
  return false;
}

namespace {

Rat normalize_circle(Rat tau) {
  std::int64_t r = tau.num % tau.den;
  if (r < 0) r += tau.den;
  return make_rat(r, tau.den);
}

}  // namespace

std::vector<std::uint64_t> covering_fractions(Rat tau, std::uint64_t q,
                                              std::uint64_t level) {
  check_level(level);
  if (q == 0 || q > level) throw BadRangeError("covering_fractions: need 1 <= q <= level");
  tau = normalize_circle(tau);
  std::vector<std::uint64_t> out;
  if (q == 1) {
    if (interval_contains(farey_interval(0, 1, level), tau)) out.push_back(0);
    return out;
  }
  for (std::uint64_t a = 1; a < q; ++a) {
    if (std::gcd(a, q) != 1) continue;
    if (interval_contains(farey_interval(a, q, level), tau)) out.push_back(a);
  }
  return out;
}

std::optional<InverseRange> inverse_range(Rat tau, std::uint64_t q,
                                          std::uint64_t level) {
  std::vector<std::uint64_t> covering = covering_fractions(tau, q, level);
  if (covering.empty()) return std::nullopt;
  if (q == 1) return InverseRange{0, 0};

  std::uint64_t n1 = q, n2 = 0;
  for (std::uint64_t a : covering) {
    std::uint64_t inv = arith::mod_inverse(static_cast<std::int64_t>(a), q).value;
    n1 = std::min(n1, inv);
    n2 = std::max(n2, inv);
  }
  // Round trip: every unit with inverse in [n1, n2] must be covered, i.e. the
  // count of units in the range equals the covering cardinality.
  std::size_t units = 0;
  for (std::uint64_t c = n1; c <= n2; ++c)
    if (std::gcd(c, q) == 1) ++units;
  if (units != covering.size())
    throw PropositionViolationError("inverse_range: covering set is not an inverse range");
  return InverseRange{n1, n2};
}

}  // namespace spherelab::farey
