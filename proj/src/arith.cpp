#include "spherelab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "spherelab/errors.hpp"

namespace spherelab::arith {

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

int mobius(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("mobius: n must be positive");
  int sign = 1;
  for (const auto& [p, e] : factorize(n)) {
    (void)p;
    if (e > 1) return 0;
    sign = -sign;
  }
  return sign;
}

std::uint64_t euler_phi(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("euler_phi: n must be positive");
  std::uint64_t phi = n;
  for (const auto& [p, e] : factorize(n)) {
    (void)e;
    phi -= phi / p;
  }
  return phi;
}

std::vector<std::uint64_t> phi_table(std::uint64_t n_max) {
  std::vector<std::uint64_t> phi(n_max + 1);
  for (std::uint64_t i = 0; i <= n_max; ++i) phi[i] = i;
  for (std::uint64_t p = 2; p <= n_max; ++p) {
    if (phi[p] == p) {  // p prime
      for (std::uint64_t m = p; m <= n_max; m += p) phi[m] -= phi[m] / p;
    }
  }
  return phi;
}

std::vector<int> mobius_table(std::uint64_t n_max) {
  std::vector<int> mu(n_max + 1, 1);
  std::vector<bool> composite(n_max + 1, false);
  std::vector<std::uint64_t> primes;
  if (n_max >= 1) mu[1] = 1;
  for (std::uint64_t i = 2; i <= n_max; ++i) {
    if (!composite[i]) {
      primes.push_back(i);
      mu[i] = -1;
    }
    for (std::uint64_t p : primes) {
      if (i * p > n_max) break;
      composite[i * p] = true;
      if (i % p == 0) {
        mu[i * p] = 0;
        break;
      }
      mu[i * p] = -mu[i];
    }
  }
  return mu;
}

Residue mod_inverse(std::int64_t a, std::uint64_t q) {
  if (q == 0) throw std::invalid_argument("mod_inverse: modulus must be positive");
  if (q == 1) return {0, 1};
  std::int64_t m = static_cast<std::int64_t>(q);
  std::int64_t r = a % m;
  if (r < 0) r += m;
  // Extended Euclid on (r, q).
  std::int64_t old_r = r, cur_r = m;
  std::int64_t old_s = 1, cur_s = 0;
  while (cur_r != 0) {
    std::int64_t quot = old_r / cur_r;
    std::int64_t tr = old_r - quot * cur_r;
    old_r = cur_r;
    cur_r = tr;
    std::int64_t ts = old_s - quot * cur_s;
    old_s = cur_s;
    cur_s = ts;
  }
  if (old_r != 1) throw NotCoprimeError("mod_inverse: gcd(a, q) > 1");
  if (old_s < 0) old_s += m;
  return {static_cast<std::uint64_t>(old_s), q};
}

std::int64_t ramanujan_sum(std::uint64_t q, std::int64_t n) {
  if (q == 0) throw std::invalid_argument("ramanujan_sum: q must be positive");
  if (q == 1) return 1;
  std::int64_t m = static_cast<std::int64_t>(q);
  std::int64_t r = n % m;
  if (r < 0) r += m;
  std::uint64_t g = std::gcd(q, static_cast<std::uint64_t>(r));
  std::uint64_t qg = q / g;
  int mu = mobius(qg);
  if (mu == 0) return 0;
  std::uint64_t value = euler_phi(q) / euler_phi(qg);
  return mu * static_cast<std::int64_t>(value);
}

Complex ramanujan_sum_direct(std::uint64_t q, std::int64_t n) {
  if (q == 0) throw std::invalid_argument("ramanujan_sum_direct: q must be positive");
  KahanComplex acc;
  if (q == 1) {
    acc.add(Complex{1.0, 0.0});
    return acc.value();
  }
  for (std::uint64_t a = 1; a < q; ++a) {
    if (std::gcd(a, q) != 1) continue;
    acc.add(unit_phase_frac(static_cast<std::int64_t>(a) * n, q));
  }
  return acc.value();
}

std::vector<std::int64_t> ramanujan_row(std::uint64_t q) {
  std::vector<std::int64_t> row(q);
  std::uint64_t phi_q = euler_phi(q);
  for (std::uint64_t r = 0; r < q; ++r) {
    std::uint64_t g = std::gcd(q, r);  // gcd(q, 0) = q
    std::uint64_t qg = q / g;
    int mu = mobius(qg);
    if (mu == 0) {
      row[r] = 0;
      continue;
    }
    std::int64_t v = mu * static_cast<std::int64_t>(phi_q / euler_phi(qg));
    row[r] = v < 0 ? -v : v;
  }
  return row;
}

namespace {

// e^{2 pi i k / q} for k in [0, q).
std::vector<Complex> phase_table(std::uint64_t q) {
  std::vector<Complex> ph(q);
  for (std::uint64_t k = 0; k < q; ++k)
    ph[k] = unit_phase(static_cast<double>(k) / static_cast<double>(q));
  return ph;
}

}  // namespace

Complex gauss_sum_1d(std::int64_t a, std::int64_t b, std::uint64_t q) {
  if (q == 0) throw std::invalid_argument("gauss_sum_1d: q must be positive");
  KahanComplex acc;
  const std::int64_t m = static_cast<std::int64_t>(q);
  for (std::int64_t n = 0; n < m; ++n) {
    // (a n^2 - b n) mod q, kept exact before the trig call.
    std::int64_t e = (a % m) * ((n * n) % m) - (b % m) * n;
    acc.add(unit_phase_frac(e, q));
  }
  Complex s = acc.value();
  return s / static_cast<double>(q);
}

std::vector<Complex> gauss_sum_1d_row(std::int64_t a, std::uint64_t q) {
  if (q == 0) throw std::invalid_argument("gauss_sum_1d_row: q must be positive");
  const std::int64_t m = static_cast<std::int64_t>(q);
  std::vector<Complex> ph = phase_table(q);
  std::vector<Complex> row(q);
  std::int64_t ar = a % m;
  if (ar < 0) ar += m;
  for (std::int64_t l = 0; l < m; ++l) {
    KahanComplex acc;
    for (std::int64_t n = 0; n < m; ++n) {
      std::int64_t e = (ar * ((n * n) % m) - l * n) % m;
      if (e < 0) e += m;
      acc.add(ph[static_cast<std::uint64_t>(e)]);
    }
    row[static_cast<std::uint64_t>(l)] = acc.value() / static_cast<double>(q);
  }
  return row;
}

Complex gauss_sum(std::int64_t a, std::uint64_t q, std::span<const std::int64_t> ell) {
  if (q == 0) throw std::invalid_argument("gauss_sum: q must be positive");
  if (q == 1) return {1.0, 0.0};
  std::int64_t r = a % static_cast<std::int64_t>(q);
  if (r < 0) r += static_cast<std::int64_t>(q);
  if (std::gcd(static_cast<std::uint64_t>(r), q) != 1)
    throw NotCoprimeError("gauss_sum: gcd(a, q) > 1");
  Complex prod{1.0, 0.0};
  for (std::int64_t lj : ell) prod *= gauss_sum_1d(a, lj, q);
  return prod;
}

namespace {

// Per (a, q) table of t -> sum_l G(a/q, l) e^{2 pi i l t / q}; the inversion
// check is exhaustive over x in a period, so each coordinate factor is one
// lookup.  Bounded memo, guarded for concurrent callers.
const std::vector<Complex>& inversion_coord_table(std::int64_t a, std::uint64_t q) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<Complex>> cache;
  std::int64_t m = static_cast<std::int64_t>(q);
  std::int64_t ar = a % m;
  if (ar < 0) ar += m;
  std::scoped_lock lock(mu);
  auto key = std::make_pair(q, static_cast<std::uint64_t>(ar));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() > 8192) cache.clear();
  std::vector<Complex> g1 = gauss_sum_1d_row(ar, q);
  std::vector<Complex> ph = phase_table(q);
  std::vector<Complex> tab(q);
  for (std::uint64_t t = 0; t < q; ++t) {
    KahanComplex acc;
    for (std::uint64_t l = 0; l < q; ++l) acc.add(g1[l] * ph[(l * t) % q]);
    tab[t] = acc.value();
  }
  return cache.emplace(key, std::move(tab)).first->second;
}

}  // namespace

std::pair<Complex, Complex> gauss_inversion_check(std::int64_t a, std::uint64_t q,
                                                  std::span<const std::int64_t> x) {
  if (q == 0) throw std::invalid_argument("gauss_inversion_check: q must be positive");
  if (q == 1) return {Complex{1.0, 0.0}, Complex{1.0, 0.0}};
  std::int64_t r = a % static_cast<std::int64_t>(q);
  if (r < 0) r += static_cast<std::int64_t>(q);
  if (std::gcd(static_cast<std::uint64_t>(r), q) != 1)
    throw NotCoprimeError("gauss_inversion_check: gcd(a, q) > 1");

  // The ell sum tensor-factors coordinate by coordinate.
  const std::vector<Complex>& tab = inversion_coord_table(r, q);
  Complex lhs{1.0, 0.0};
  std::int64_t norm_sq = 0;
  const std::int64_t m = static_cast<std::int64_t>(q);
  for (std::int64_t xj : x) {
    std::int64_t t = xj % m;
    if (t < 0) t += m;
    lhs *= tab[static_cast<std::uint64_t>(t)];
    norm_sq = (norm_sq + t * t) % m;
  }
  Complex rhs = unit_phase_frac((r % m) * norm_sq, q);
  return {lhs, rhs};
}

Complex kloosterman_restricted(std::int64_t b, std::uint64_t q, std::uint64_t x,
                               std::uint64_t y) {
  if (q < 2) throw std::invalid_argument("kloosterman_restricted: q must be >= 2");
  if (x < 1 || x > y || y >= q)
    throw BadRangeError("kloosterman_restricted: need 1 <= x <= y < q");
  // Substituting c = a^{-1} turns the inverse-range constraint into a plain
  // summation range: a = c^{-1} for units c in [x, y].
  KahanComplex acc;
  for (std::uint64_t c = x; c <= y; ++c) {
    if (std::gcd(c, q) != 1) continue;
    std::uint64_t a = mod_inverse(static_cast<std::int64_t>(c), q).value;
    acc.add(unit_phase_frac(static_cast<std::int64_t>(a) * b, q));
  }
  return acc.value();
}

BigInt lcm_vec(std::span<const std::uint64_t> qs) {
  BigInt l = 1;
  for (std::uint64_t q : qs) {
    if (q == 0) throw std::invalid_argument("lcm_vec: entries must be positive");
    BigInt bq = q;
    l = l / boost::multiprecision::gcd(l, bq) * bq;
  }
  return l;
}

BigInt gcd_product_sum(std::span<const std::uint64_t> qs, std::uint64_t limit) {
  if (limit == 0) throw std::invalid_argument("gcd_product_sum: limit must be >= 1");
  BigInt total = 0;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    BigInt term = 1;
    for (std::uint64_t q : qs) term *= std::gcd(q, n);
    total += term;
  }
  return total;
}

}  // namespace spherelab::arith
