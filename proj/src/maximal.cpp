#include "spherelab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spherelab/errors.hpp"
#include "spherelab/numerics.hpp"
#include "spherelab/parallel.hpp"

namespace spherelab::maximal {

namespace {

double rational_to_double(const BigRational& q) { return static_cast<double>(q); }

std::int64_t isqrt_floor(std::int64_t n) {
  if (n < 0) return -1;
  std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

void enumerate_box(int d, std::int64_t lo, std::int64_t hi,
                   const std::function<void(const std::int32_t*)>& emit) {
  std::vector<std::int32_t> c(static_cast<std::size_t>(d), static_cast<std::int32_t>(lo));
  for (;;) {
    emit(c.data());
    int j = 0;
    while (j < d) {
      if (++c[static_cast<std::size_t>(j)] <= hi) break;
      c[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(lo);
      ++j;
    }
    if (j == d) break;
  }
}

// Canonical representatives of the hyperoctahedral orbits: coordinates
// nonincreasing and nonnegative, bounded per-coordinate by cmax and in norm
// by norm_sq_max.
struct Canonical {
  std::vector<std::int32_t> flat;
  std::vector<double> orbit;  // orbit cardinality per representative
  int d;

  std::size_t size() const { return orbit.size(); }
};

void enumerate_canonical(int d, int j, std::int64_t cmax, std::int64_t budget,
                         std::int32_t* coords, Canonical& out) {
  if (j == d) {
    // orbit = d! / prod(multiplicities!) * 2^{nonzero count}
    double perms = 1.0;
    int run = 1;
    int factorial_n = 1;
    for (int i = 1; i <= d; ++i) factorial_n *= i;
    perms = factorial_n;
    for (int i = 1; i < d; ++i) {
      if (coords[i] == coords[i - 1]) {
        ++run;
        perms /= run;
      } else {
        run = 1;
      }
    }
    int nonzero = 0;
    for (int i = 0; i < d; ++i)
      if (coords[i] != 0) ++nonzero;
    out.flat.insert(out.flat.end(), coords, coords + d);
    out.orbit.push_back(perms * std::pow(2.0, nonzero));
    return;
  }
  std::int64_t upper = std::min<std::int64_t>(cmax, isqrt_floor(budget));
  if (j > 0) upper = std::min<std::int64_t>(upper, coords[j - 1]);
  for (std::int64_t v = 0; v <= upper; ++v) {
    coords[j] = static_cast<std::int32_t>(v);
    enumerate_canonical(d, j + 1, cmax, budget - v * v, coords, out);
  }
}

}  // namespace

Family parse_family(const std::string& s) {
  if (s == "ball") return Family::Ball;
  if (s == "box") return Family::Box;
  if (s == "sphere_shell" || s == "shell") return Family::SphereShell;
  if (s == "random_density" || s == "random") return Family::RandomDensity;
  throw std::invalid_argument("unknown family: " + s);
}

std::string family_string(Family f) {
  switch (f) {
    case Family::Ball: return "ball";
    case Family::Box: return "box";
    case Family::SphereShell: return "sphere_shell";
    case Family::RandomDensity: return "random_density";
  }
  return "?";
}

lattice::PointSet make_family(Family f, int d, std::int64_t Lambda, std::uint64_t seed,
                              const Budget& budget) {
  if (d < 1 || d > 8) throw std::invalid_argument("make_family: d must be in [1,8]");
  if (Lambda < 1) throw std::invalid_argument("make_family: Lambda must be >= 1");
  lattice::PointSet E;
  E.d = d;
  auto guard = [&] {
    if (E.size() > budget.max_set_points)
      throw BudgetExceededError("make_family: set exceeds the point budget");
  };
  switch (f) {
    case Family::Ball: {
      std::int64_t R = Lambda;
      enumerate_box(d, -R, R, [&](const std::int32_t* c) {
        std::int64_t s = 0;
        for (int j = 0; j < d; ++j) s += static_cast<std::int64_t>(c[j]) * c[j];
        if (s <= R * R) {
          E.push(std::span<const std::int32_t>(c, static_cast<std::size_t>(d)));
          guard();
        }
      });
      break;
    }
    case Family::Box: {
      std::int64_t lo = -((Lambda + 1) / 2), hi = Lambda / 2;
      enumerate_box(d, lo, hi, [&](const std::int32_t* c) {
        E.push(std::span<const std::int32_t>(c, static_cast<std::size_t>(d)));
        guard();
      });
      break;
    }
    case Family::SphereShell: {
      std::int64_t R = isqrt_floor(Lambda * Lambda + Lambda) + 1;
      enumerate_box(d, -R, R, [&](const std::int32_t* c) {
        std::int64_t s = 0;
        for (int j = 0; j < d; ++j) s += static_cast<std::int64_t>(c[j]) * c[j];
        if (s >= Lambda * Lambda && s < Lambda * Lambda + Lambda) {
          E.push(std::span<const std::int32_t>(c, static_cast<std::size_t>(d)));
          guard();
        }
      });
      break;
    }
    case Family::RandomDensity: {
      SplitMix64 rng(seed ^ (static_cast<std::uint64_t>(Lambda) << 32));
      enumerate_box(d, -Lambda, Lambda, [&](const std::int32_t* c) {
        if ((rng.next() & 3u) == 0) {
          E.push(std::span<const std::int32_t>(c, static_cast<std::size_t>(d)));
          guard();
        }
      });
      break;
    }
  }
  if (E.size() == 0) throw std::invalid_argument("make_family: empty set");
  return E;
}

NormEstimate restricted_ratio(const lattice::PointSet& E, const BigRational& inv_p,
                              const BigRational& inv_r, std::int64_t Lambda,
                              bool symmetric, const Budget& budget) {
  if (E.size() == 0) throw std::invalid_argument("restricted_ratio: E must be nonempty");
  if (Lambda < 1 || (Lambda & (Lambda - 1)) != 0)
    throw std::invalid_argument("restricted_ratio: Lambda must be a power of two");
  const int d = E.d;
  std::vector<std::uint64_t> rd = lattice::sphere_count_table(d, 4 * Lambda * Lambda);

  // r' from 1/r' = 1 - 1/r; 1/r = 1 collapses to the sup norm.
  BigRational inv_rp = BigRational(1) - inv_r;
  const bool sup_norm = inv_rp == 0;
  const double rp = sup_norm ? 0.0 : 1.0 / rational_to_double(inv_rp);

  std::int64_t cmax = 0;
  std::int64_t rad_sq = 0;
  for (std::size_t i = 0; i < E.size(); ++i) {
    std::int64_t s = 0;
    for (int j = 0; j < d; ++j) {
      std::int64_t c = E[i][j];
      cmax = std::max(cmax, c < 0 ? -c : c);
      s += c * c;
    }
    rad_sq = std::max(rad_sq, s);
  }
  const std::int64_t reach_c = cmax + 2 * Lambda;
  const std::int64_t reach_r = isqrt_floor(rad_sq) + 2 * Lambda;

  struct Acc {
    Kahan power_sum;
    double sup = 0.0;
    std::vector<std::int32_t> witness;
  };

  auto combine = [&](Acc a, const Acc& b) {
    a.power_sum.add(b.power_sum.value());
    if (b.sup > a.sup) {
      a.sup = b.sup;
      a.witness = b.witness;
    }
    return a;
  };

  Acc result;
  if (symmetric) {
    Canonical canon;
    canon.d = d;
    std::int32_t coords[8] = {0};
    enumerate_canonical(d, 0, reach_c, reach_r * reach_r, coords, canon);
    const std::int64_t total = static_cast<std::int64_t>(canon.size());
    if (static_cast<std::uint64_t>(total) * E.size() > budget.max_pair_ops)
      throw BudgetExceededError("restricted_ratio: pair budget exceeded");
    result = parallel_reduce<Acc>(
        0, total, 256, Acc{},
        [&](std::int64_t lo, std::int64_t hi) {
          Acc acc;
          for (std::int64_t i = lo; i < hi; ++i) {
            const std::int32_t* x =
                canon.flat.data() + static_cast<std::size_t>(i) * d;
            double v = lattice::indicator_dyadic_max_at(E, Lambda, x, rd);
            if (v == 0.0) continue;
            if (!sup_norm) acc.power_sum.add(canon.orbit[static_cast<std::size_t>(i)] *
                                             std::pow(v, rp));
            if (v > acc.sup) {
              acc.sup = v;
              acc.witness.assign(x, x + d);
            }
          }
          return acc;
        },
        combine);
  } else {
    // Gather over the full output box bbox(E) + [-2 Lambda, 2 Lambda]^d.
    std::int64_t lo[8], hi[8];
    for (int j = 0; j < d; ++j) {
      lo[j] = INT64_MAX;
      hi[j] = INT64_MIN;
    }
    for (std::size_t i = 0; i < E.size(); ++i)
      for (int j = 0; j < d; ++j) {
        lo[j] = std::min<std::int64_t>(lo[j], E[i][j]);
        hi[j] = std::max<std::int64_t>(hi[j], E[i][j]);
      }
    std::uint64_t total = 1;
    for (int j = 0; j < d; ++j) {
      lo[j] -= 2 * Lambda;
      hi[j] += 2 * Lambda;
      total *= static_cast<std::uint64_t>(hi[j] - lo[j] + 1);
    }
    if (total * E.size() > budget.max_pair_ops)
      throw BudgetExceededError("restricted_ratio: pair budget exceeded");
    result = parallel_reduce<Acc>(
        0, static_cast<std::int64_t>(total), 256, Acc{},
        [&](std::int64_t a, std::int64_t b) {
          Acc acc;
          std::int32_t x[8];
          for (std::int64_t idx = a; idx < b; ++idx) {
            std::uint64_t rem = static_cast<std::uint64_t>(idx);
            for (int j = d - 1; j >= 0; --j) {
              std::uint64_t w = static_cast<std::uint64_t>(hi[j] - lo[j] + 1);
              x[j] = static_cast<std::int32_t>(lo[j] + static_cast<std::int64_t>(rem % w));
              rem /= w;
            }
            double v = lattice::indicator_dyadic_max_at(E, Lambda, x, rd);
            if (v == 0.0) continue;
            if (!sup_norm) acc.power_sum.add(std::pow(v, rp));
            if (v > acc.sup) {
              acc.sup = v;
              acc.witness.assign(x, x + d);
            }
          }
          return acc;
        },
        combine);
  }

  NormEstimate est;
  est.d = d;
  est.Lambda = Lambda;
  est.inv_p = inv_p;
  est.inv_r = inv_r;
  est.set_size = E.size();
  est.norm = sup_norm ? result.sup : std::pow(result.power_sum.value(), 1.0 / rp);
  est.ratio = est.norm / std::pow(static_cast<double>(E.size()),
                                  rational_to_double(inv_p));
  std::ostringstream w;
  w << "argmax=(";
  for (std::size_t j = 0; j < result.witness.size(); ++j)
    w << (j ? "," : "") << result.witness[j];
  w << ") value=" << result.sup;
  est.witness = w.str();
  return est;
}

ScalingFit scaling_fit(Family f, const BigRational& inv_p, const BigRational& inv_r,
                       int d, std::span<const std::int64_t> lambdas,
                       std::uint64_t seed, const Budget& budget) {
  ScalingFit fit;
  const bool symmetric = f != Family::RandomDensity;
  for (std::int64_t Lambda : lambdas) {
    double best = 0.0;
    int instances = f == Family::RandomDensity ? 3 : 1;
    for (int inst = 0; inst < instances; ++inst) {
      lattice::PointSet E = make_family(f, d, Lambda, seed + static_cast<std::uint64_t>(inst), budget);
      NormEstimate est = restricted_ratio(E, inv_p, inv_r, Lambda, symmetric, budget);
      est.family = family_string(f);
      best = std::max(best, est.ratio);
    }
    fit.rows.push_back({Lambda, best});
  }
  std::vector<double> lx, ly;
  for (const ScalingRow& row : fit.rows) {
    lx.push_back(std::log(static_cast<double>(row.Lambda)));
    ly.push_back(std::log(row.ratio));
  }
  LineFit lf = fit_line(lx.data(), ly.data(), lx.size());
  fit.slope = lf.slope;
  fit.r2 = lf.r2;
  fit.theoretical =
      d * ((1.0 - rational_to_double(inv_r)) - rational_to_double(inv_p));
  fit.excess = fit.slope - fit.theoretical;
  return fit;
}

}  // namespace spherelab::maximal
