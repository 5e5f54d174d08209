#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spherelab/bigint.hpp"
#include "spherelab/numerics.hpp"

namespace spherelab::arith {

struct Residue {
  std::uint64_t value;    // in [0, modulus)
  std::uint64_t modulus;  // >= 1
};

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);

// Moebius function, via factorization.
int mobius(std::uint64_t n);

std::uint64_t euler_phi(std::uint64_t n);

// Sieved tables for [0, n_max]; index 0 holds a placeholder.
std::vector<std::uint64_t> phi_table(std::uint64_t n_max);
std::vector<int> mobius_table(std::uint64_t n_max);

// Unique r in [0,q) with a*r == 1 (mod q); r = 0 for q = 1.
// Throws NotCoprimeError if gcd(a, q) > 1.
Residue mod_inverse(std::int64_t a, std::uint64_t q);

// Ramanujan sum c_q(n) by the Hoelder closed form
//   c_q(n) = mu(q/g) * phi(q) / phi(q/g),  g = gcd(q, n mod q).
// Exact; c_q is q-periodic so negative n is reduced first.
std::int64_t ramanujan_sum(std::uint64_t q, std::int64_t n);

// The literal exponential sum over units, in double precision; cross-check
// entry point for the closed form.
Complex ramanujan_sum_direct(std::uint64_t q, std::int64_t n);

// |c_q(r)| for r in [0, q); one period, used by the moment sweeps.
std::vector<std::int64_t> ramanujan_row(std::uint64_t q);

// (1/q) sum_{n=0}^{q-1} e^{2 pi i (a n^2 - b n)/q}.
Complex gauss_sum_1d(std::int64_t a, std::int64_t b, std::uint64_t q);

// G(a/q, l) for all l in [0, q); O(q^2) once instead of O(q) per l with a
// fresh trig call each term.  Feeds the exhaustive Gauss-bound scans.
std::vector<Complex> gauss_sum_1d_row(std::int64_t a, std::uint64_t q);

// Normalized complete quadratic Gauss sum over (Z/q)^d, evaluated as the
// product of 1-D sums over the coordinates of ell.  Requires gcd(a,q) = 1.
Complex gauss_sum(std::int64_t a, std::uint64_t q, std::span<const std::int64_t> ell);

// Returns the pair
//   ( sum_{ell in (Z/q)^d} G(a/q, ell) e^{2 pi i ell.x / q},  e^{2 pi i a|x|^2 / q} );
// the two components agree identically, which collapses the main-term
// symbol to the arithmetic kernel factor.  d = x.size().
std::pair<Complex, Complex> gauss_inversion_check(std::int64_t a, std::uint64_t q,
                                                  std::span<const std::int64_t> x);

// sum over a in Z_q^x with x <= a^{-1} <= y of e^{2 pi i a b / q}.
// Preconditions: q >= 2 and 1 <= x <= y < q (BadRangeError otherwise).
Complex kloosterman_restricted(std::int64_t b, std::uint64_t q, std::uint64_t x,
                               std::uint64_t y);

// Exact lcm of a vector of positive integers.
BigInt lcm_vec(std::span<const std::uint64_t> qs);

// sum_{n=1}^{limit} prod_j gcd(q_j, n), exact.
BigInt gcd_product_sum(std::span<const std::uint64_t> qs, std::uint64_t limit);

}  // namespace spherelab::arith
