#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spherelab/bigint.hpp"
#include "spherelab/numerics.hpp"

namespace spherelab::moments {

struct MomentReport {
  std::uint64_t Q = 0;
  int k = 0;
  std::int64_t N = 0;
  std::uint64_t M = 0;
  double value = 0.0;
  double bound_ratio = 0.0;  // value / Q
};

// [ (1/M) sum_{n in [N, N+M)} ( sum_{Q <= q < 2Q} |c_q(n)| )^k ]^{1/k}.
// Inner sums are exact integers; only the k-th root is floating point.
// Requires the averaging window M >= Q^k (HypothesisViolatedError).
MomentReport ramanujan_moment(std::uint64_t Q, int k, std::int64_t N, std::uint64_t M);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  // Measured constant A such that value <= A * x^{1+delta} across the sweep.
  double measured_a = 0.0;
  std::vector<double> xs;  // the swept parameter
  std::vector<double> ys;  // the measured values
};

// Log-log fit of ramanujan_moment over the given dyadic Q list with M = Q^k.
SlopeFit moment_slope(int k, std::span<const std::uint64_t> q_list, std::int64_t N,
                      double delta_fit);

// sum over q-tuples in [Q,2Q)^k of 1/lcm(q-tuple).  Throws
// BudgetExceededError when the tuple count exceeds the budget.
double lcm_reciprocal_sum(std::uint64_t Q, int k, std::uint64_t tuple_budget = 1ull << 26);
BigRational lcm_reciprocal_sum_exact(std::uint64_t Q, int k);  // small Q only

SlopeFit lcm_sum_slope(int k, std::span<const std::uint64_t> q_list, double delta_fit);

// sum_{n=1}^{lcm(q)} prod_j gcd(q_j, n), exact; evaluated prime power by
// prime power (the summand is multiplicative over a CRT splitting of the
// period), so huge lcm costs nothing.
BigInt gcd_product_period_sum(std::span<const std::uint64_t> qs);

struct GcdBoundReport {
  double max_ratio = 0.0;              // max S(q) / Q^{k(1+delta)}
  std::vector<std::uint64_t> argmax;   // tuple achieving it
  int trials = 0;
};

GcdBoundReport gcd_product_bound_check(std::uint64_t Q, int k, int trials,
                                       std::uint64_t seed, double delta = 0.2);

// Restricted Kloosterman scan: max over b in [1,q) and all inverse ranges
// 1 <= x <= y < q of |sum|, via prefix-walk diameters.
struct KloostermanScan {
  std::uint64_t q = 0;
  double max_abs = 0.0;
  double normalized = 0.0;  // max over b of max_abs / ( (b,q)^{1/2} q^{1/2} )
};

KloostermanScan kloosterman_scan(std::uint64_t q);

// Fit of log(normalized max) against log q over primes <= q_max.
SlopeFit kloosterman_slope(std::uint64_t q_max);

}  // namespace spherelab::moments
