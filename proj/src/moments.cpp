#include "spherelab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spherelab/arith.hpp"
#include "spherelab/errors.hpp"
#include "spherelab/parallel.hpp"

namespace spherelab::moments {

namespace {

std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > UINT64_MAX / base) throw BudgetExceededError("pow_u64: overflow");
    out *= base;
  }
  return out;
}

BigInt pow_bigint(std::int64_t base, int exp) {
  BigInt out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

MomentReport ramanujan_moment(std::uint64_t Q, int k, std::int64_t N, std::uint64_t M) {
  if (Q == 0 || k < 1) throw std::invalid_argument("ramanujan_moment: need Q >= 1, k >= 1");
  if (M < pow_u64(Q, k))
    throw HypothesisViolatedError("ramanujan_moment: window must satisfy M >= Q^k");

  // One period of |c_q| per modulus in the dyadic block.
  std::vector<std::vector<std::int64_t>> rows;
  rows.reserve(Q);
  for (std::uint64_t q = Q; q < 2 * Q; ++q) rows.push_back(arith::ramanujan_row(q));

  const std::int64_t lo = N;
  const std::int64_t hi = N + static_cast<std::int64_t>(M);  // half-open window
  const int chunks = 64;
  // inner <= sum of q over the block < 2^21 at Q = 1024, so inner^k fits an
  // int64 for k <= 3 and the per-chunk totals fit 128 bits comfortably.
  const bool narrow = k <= 3 && Q <= (1u << 20);
  BigInt total = parallel_reduce<BigInt>(
      lo, hi, chunks, BigInt(0),
      [&](std::int64_t a, std::int64_t b) {
        unsigned __int128 fast = 0;
        BigInt wide = 0;
        for (std::int64_t n = a; n < b; ++n) {
          std::int64_t inner = 0;
          for (std::uint64_t q = Q; q < 2 * Q; ++q) {
            std::int64_t r = n % static_cast<std::int64_t>(q);
            if (r < 0) r += static_cast<std::int64_t>(q);
            inner += rows[q - Q][static_cast<std::uint64_t>(r)];
          }
          if (narrow) {
            unsigned __int128 term = static_cast<unsigned __int128>(inner);
            for (int e = 1; e < k; ++e) term *= static_cast<unsigned __int128>(inner);
            fast += term;
          } else {
            wide += pow_bigint(inner, k);
          }
        }
        if (narrow) {
          wide = static_cast<std::uint64_t>(fast >> 64);
          wide <<= 64;
          wide += static_cast<std::uint64_t>(fast);
        }
        return wide;
      },
      [](BigInt x, const BigInt& y) { return x + y; });

  double mean = static_cast<double>(total) / static_cast<double>(M);
  MomentReport rep;
  rep.Q = Q;
  rep.k = k;
  rep.N = N;
  rep.M = M;
  rep.value = std::pow(mean, 1.0 / k);
  rep.bound_ratio = rep.value / static_cast<double>(Q);
  return rep;
}

SlopeFit moment_slope(int k, std::span<const std::uint64_t> q_list, std::int64_t N,
                      double delta_fit) {
  SlopeFit fit;
  for (std::uint64_t Q : q_list) {
    MomentReport rep = ramanujan_moment(Q, k, N, pow_u64(Q, k));
    fit.xs.push_back(static_cast<double>(Q));
    fit.ys.push_back(rep.value);
  }
  std::vector<double> lx(fit.xs.size()), ly(fit.ys.size());
  for (std::size_t i = 0; i < fit.xs.size(); ++i) {
    lx[i] = std::log(fit.xs[i]);
    ly[i] = std::log(fit.ys[i]);
  }
  LineFit lf = fit_line(lx.data(), ly.data(), lx.size());
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  for (std::size_t i = 0; i < fit.xs.size(); ++i)
    fit.measured_a = std::max(fit.measured_a,
                              fit.ys[i] / std::pow(fit.xs[i], 1.0 + delta_fit));
  return fit;
}

double lcm_reciprocal_sum(std::uint64_t Q, int k, std::uint64_t tuple_budget) {
  if (Q == 0 || k < 1) throw std::invalid_argument("lcm_reciprocal_sum: need Q >= 1, k >= 1");
  if (pow_u64(Q, k) > tuple_budget)
    throw BudgetExceededError("lcm_reciprocal_sum: Q^k tuples exceed the budget");
  // Enumerate tuples odometer style.
  std::vector<std::uint64_t> q(static_cast<std::size_t>(k), Q);
  Kahan acc;
  for (;;) {
    std::uint64_t l = q[0];
    for (int j = 1; j < k; ++j) l = std::lcm(l, q[static_cast<std::size_t>(j)]);
    acc.add(1.0 / static_cast<double>(l));
    int j = 0;
    while (j < k) {
      if (++q[static_cast<std::size_t>(j)] < 2 * Q) break;
      q[static_cast<std::size_t>(j)] = Q;
      ++j;
    }
    if (j == k) break;
  }
  return acc.value();
}

BigRational lcm_reciprocal_sum_exact(std::uint64_t Q, int k) {
  if (pow_u64(Q, k) > (1ull << 14))
    throw BudgetExceededError("lcm_reciprocal_sum_exact: too many tuples for the exact path");
  std::vector<std::uint64_t> q(static_cast<std::size_t>(k), Q);
  BigRational acc = 0;
  for (;;) {
    std::uint64_t l = q[0];
    for (int j = 1; j < k; ++j) l = std::lcm(l, q[static_cast<std::size_t>(j)]);
    acc += BigRational(1, l);
    int j = 0;
    while (j < k) {
      if (++q[static_cast<std::size_t>(j)] < 2 * Q) break;
      q[static_cast<std::size_t>(j)] = Q;
      ++j;
    }
    if (j == k) break;
  }
  return acc;
}

SlopeFit lcm_sum_slope(int k, std::span<const std::uint64_t> q_list, double delta_fit) {
  SlopeFit fit;
  for (std::uint64_t Q : q_list) {
    fit.xs.push_back(static_cast<double>(Q));
    fit.ys.push_back(lcm_reciprocal_sum(Q, k));
  }
  std::vector<double> lx(fit.xs.size()), ly(fit.ys.size());
  for (std::size_t i = 0; i < fit.xs.size(); ++i) {
    lx[i] = std::log(fit.xs[i]);
    ly[i] = std::log(fit.ys[i]);
  }
  LineFit lf = fit_line(lx.data(), ly.data(), lx.size());
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  for (std::size_t i = 0; i < fit.xs.size(); ++i)
    fit.measured_a = std::max(fit.measured_a,
                              fit.ys[i] / std::pow(fit.xs[i], delta_fit * k));
  return fit;
}

BigInt gcd_product_period_sum(std::span<const std::uint64_t> qs) {
  if (qs.empty()) throw std::invalid_argument("gcd_product_period_sum: empty tuple");
  // n -> prod_j (q_j, n) is determined by the residue of n modulo each prime
  // power of the lcm, so the period sum splits as a product over primes p:
  //   S_p = sum_{t=0}^{e_p} #{ n mod p^{e_p} : v_p(n) = t } * prod_j p^{min(v_p(q_j), t)}
  // with #{...} = phi(p^{e_p - t}) for t < e_p and 1 for t = e_p.
  std::vector<std::pair<std::uint64_t, int>> primes;  // (p, e_p of lcm)
  std::vector<std::vector<int>> valuations;           // per prime, per j
  for (std::size_t j = 0; j < qs.size(); ++j) {
    for (const auto& [p, e] : arith::factorize(qs[j])) {
      std::size_t idx = 0;
      for (; idx < primes.size(); ++idx)
        if (primes[idx].first == p) break;
      if (idx == primes.size()) {
        primes.emplace_back(p, 0);
        valuations.emplace_back(qs.size(), 0);
      }
      primes[idx].second = std::max(primes[idx].second, e);
      valuations[idx][j] = e;
    }
  }
  BigInt total = 1;
  for (std::size_t idx = 0; idx < primes.size(); ++idx) {
    auto [p, e] = primes[idx];
    BigInt sp = 0;
    BigInt pe = pow_bigint(static_cast<std::int64_t>(p), e);
    for (int t = 0; t <= e; ++t) {
      BigInt count;
      if (t < e) {
        BigInt rest = pow_bigint(static_cast<std::int64_t>(p), e - t);
        count = rest - rest / p;  // phi(p^{e-t})
      } else {
        count = 1;
      }
      BigInt weight = 1;
      for (std::size_t j = 0; j < qs.size(); ++j)
        weight *= pow_bigint(static_cast<std::int64_t>(p), std::min(valuations[idx][j], t));
      sp += count * weight;
    }
    total *= sp;
  }
  return total;
}

GcdBoundReport gcd_product_bound_check(std::uint64_t Q, int k, int trials,
                                       std::uint64_t seed, double delta) {
  GcdBoundReport rep;
  rep.trials = trials;
  SplitMix64 rng(seed);
  double denom = std::pow(static_cast<double>(Q), k * (1.0 + delta));
  for (int t = 0; t < trials; ++t) {
    std::vector<std::uint64_t> q(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) q[static_cast<std::size_t>(j)] = Q + rng.next_below(Q);
    BigInt s = gcd_product_period_sum(q);
    double ratio = static_cast<double>(s) / denom;
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.argmax = q;
    }
  }
  return rep;
}

KloostermanScan kloosterman_scan(std::uint64_t q) {
  if (q < 2) throw std::invalid_argument("kloosterman_scan: q must be >= 2");
  KloostermanScan scan;
  scan.q = q;
  // For fixed b, K(b; x, y) = P(y) - P(x-1) where P is the prefix walk of
  // e^{2 pi i c^{-1} b / q} over units c; the max over ranges is the diameter
  // of the prefix point set.
  std::vector<std::uint64_t> inv(q, 0);
  for (std::uint64_t c = 1; c < q; ++c)
    if (std::gcd(c, q) == 1) inv[c] = arith::mod_inverse(static_cast<std::int64_t>(c), q).value;

  for (std::uint64_t b = 1; b < q; ++b) {
    std::vector<Complex> prefix;
    prefix.reserve(q);
    prefix.emplace_back(0.0, 0.0);
    KahanComplex acc;
    for (std::uint64_t c = 1; c < q; ++c) {
      if (inv[c] != 0)
        acc.add(unit_phase_frac(static_cast<std::int64_t>(inv[c] * b % q), q));
      prefix.push_back(acc.value());
    }
    double diam_sq = 0.0;
    for (std::size_t i = 0; i < prefix.size(); ++i)
      for (std::size_t j = i + 1; j < prefix.size(); ++j) {
        double dx = prefix[i].real() - prefix[j].real();
        double dy = prefix[i].imag() - prefix[j].imag();
        diam_sq = std::max(diam_sq, dx * dx + dy * dy);
      }
    double max_abs = std::sqrt(diam_sq);
    scan.max_abs = std::max(scan.max_abs, max_abs);
    double norm = max_abs / (std::sqrt(static_cast<double>(std::gcd(b, q))) *
                             std::sqrt(static_cast<double>(q)));
    scan.normalized = std::max(scan.normalized, norm);
  }
  return scan;
}

SlopeFit kloosterman_slope(std::uint64_t q_max) {
  SlopeFit fit;
  std::vector<std::uint64_t> primes;
  for (std::uint64_t q = 2; q <= q_max; ++q) {
    bool prime = true;
    for (std::uint64_t p = 2; p * p <= q; ++p)
      if (q % p == 0) {
        prime = false;
        break;
      }
    if (prime) primes.push_back(q);
  }
  fit.xs.resize(primes.size());
  fit.ys.resize(primes.size());
  parallel_for(0, static_cast<std::int64_t>(primes.size()), [&](std::int64_t i) {
    KloostermanScan scan = kloosterman_scan(primes[static_cast<std::size_t>(i)]);
    fit.xs[static_cast<std::size_t>(i)] = static_cast<double>(scan.q);
    fit.ys[static_cast<std::size_t>(i)] = scan.normalized;
  });
  std::vector<double> lx(fit.xs.size()), ly(fit.ys.size());
  for (std::size_t i = 0; i < fit.xs.size(); ++i) {
    lx[i] = std::log(fit.xs[i]);
    ly[i] = std::log(fit.ys[i]);
  }
  LineFit lf = fit_line(lx.data(), ly.data(), lx.size());
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  return fit;
}

}  // namespace spherelab::moments
