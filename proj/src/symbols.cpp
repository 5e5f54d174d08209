#include "spherelab/symbols.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "spherelab/arith.hpp"
#include "spherelab/errors.hpp"
#include "spherelab/parallel.hpp"

namespace spherelab::symbols {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGL = 16;
constexpr double kGLNode[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kGLWeight[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

// Composite GL quadrature of f over [a, b].
template <class F>
double composite_gl(F&& f, double a, double b, int panels) {
  Kahan acc;
  double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double mid = a + (p + 0.5) * w;
    for (int i = 0; i < kGL; ++i)
      acc.add(kGLWeight[i] * f(mid + 0.5 * w * kGLNode[i]));
  }
  return acc.value() * 0.5 * w;
}

// Smooth step: 0 at u <= 0, 1 at u >= 1.
double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double a = std::exp(-1.0 / u);
  double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

}  // namespace

double BumpProfile::phi(double t) const {
  double a = std::fabs(t);
  if (a <= 0.125) return 1.0;
  if (a >= 0.25) return 0.0;
  return smooth_step((0.25 - a) / 0.125);
}

double BumpProfile::phi_nd(std::span<const double> xi) const {
  double prod = 1.0;
  for (double c : xi) {
    prod *= phi(c);
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

double BumpProfile::check_direct(double z) const {
  // phi-check(z) = 2 int_0^{1/4} phi(t) cos(2 pi t z) dt (phi is even).
  double az = std::fabs(z);
  int panels = 4 + static_cast<int>(az / 4.0);
  return 2.0 * composite_gl(
                   [&](double t) { return phi(t) * std::cos(kTwoPi * t * z); },
                   0.0, 0.25, panels);
}

BumpProfile::BumpProfile() : grid_step_(1.0 / 64.0), grid_max_(128.0) {
  std::size_t count = static_cast<std::size_t>(grid_max_ / grid_step_) + 4;
  table_.resize(count);
  parallel_for(0, static_cast<std::int64_t>(count), [&](std::int64_t i) {
    table_[static_cast<std::size_t>(i)] = check_direct(static_cast<double>(i) * grid_step_);
  });
  // Catmull-Rom error ~ h^4/384 * max|f''''|; |f''''| <= 2 (pi/2)^4 / 4.
  interp_error_ = std::pow(grid_step_, 4) / 384.0 * 3.1;
}

double BumpProfile::check_value(double z) const {
  double az = std::fabs(z);
  if (az >= grid_max_) return check_direct(az);
  double u = az / grid_step_;
  std::size_t i = static_cast<std::size_t>(u);
  if (i == 0) i = 1;  // keep the 4-point stencil inside the table
  double f = u - static_cast<double>(i);
  double p0 = table_[i - 1], p1 = table_[i], p2 = table_[i + 1], p3 = table_[i + 2];
  // Catmull-Rom cubic.
  return p1 + 0.5 * f * (p2 - p0 +
                         f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                              f * (3.0 * (p1 - p2) + p3 - p0)));
}

const BumpProfile& BumpProfile::standard() {
  static BumpProfile instance;
  return instance;
}

double SymbolContext::lambda() const { return std::sqrt(static_cast<double>(n)); }

const lattice::PointList& SymbolContext::sphere() const {
  if (!sphere_)
    sphere_ = std::make_shared<lattice::PointList>(lattice::sphere_points(d, n));
  return *sphere_;
}

SymbolContext make_context(int d, std::int64_t n, std::int64_t Lambda,
                           const BumpProfile* bump) {
  if (d < 1 || d > 8) throw std::invalid_argument("make_context: d must be in [1,8]");
  if (Lambda < 1 || n < Lambda * Lambda || n >= 4 * Lambda * Lambda)
    throw std::invalid_argument("make_context: need Lambda^2 <= n < 4 Lambda^2");
  if (lattice::sphere_count(d, n) == 0)
    throw EmptySphereError("make_context: r_d(n) = 0");
  SymbolContext ctx;
  ctx.d = d;
  ctx.n = n;
  ctx.Lambda = Lambda;
  ctx.bump = bump ? bump : &BumpProfile::standard();
  return ctx;
}

Complex exact_symbol(const SymbolContext& ctx, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != ctx.d)
    throw std::invalid_argument("exact_symbol: wrong frequency dimension");
  const lattice::PointList& sphere = ctx.sphere();
  KahanComplex acc;
  for (std::size_t i = 0; i < sphere.size(); ++i) {
    const std::int32_t* y = sphere[i];
    double phase = 0.0;
    for (int j = 0; j < ctx.d; ++j) phase -= y[j] * xi[static_cast<std::size_t>(j)];
    acc.add(unit_phase(phase));
  }
  return acc.value() / static_cast<double>(sphere.size());
}

double sphere_ft(int d, double lambda, double xi_norm) {
  if (d < 1) throw std::invalid_argument("sphere_ft: d must be >= 1");
  if (lambda <= 0.0) throw std::invalid_argument("sphere_ft: lambda must be positive");
  double rho = std::fabs(xi_norm);
  if (d == 1) return std::cos(kTwoPi * lambda * rho);
  // int_0^pi cos(2 pi lambda rho cos t) sin^{d-2} t dt, normalized by the
  // same quadrature at rho = 0 so the value at 0 is exactly 1.
  int panels = 8 + static_cast<int>(2.0 * lambda * rho);
  double num = composite_gl(
      [&](double t) {
        return std::cos(kTwoPi * lambda * rho * std::cos(t)) *
               std::pow(std::sin(t), d - 2);
      },
      0.0, 3.14159265358979323846, panels);
  double den = composite_gl([&](double t) { return std::pow(std::sin(t), d - 2); },
                            0.0, 3.14159265358979323846, panels);
  return num / den;
}

namespace {

// Shared per-q work of the main symbol: nearest ell/q, the bump factor, the
// surface-measure transform, and the unit Gauss sum block.
Complex q_block_term(const SymbolContext& ctx, std::uint64_t q,
                     std::span<const double> xi) {
  const int d = ctx.d;
  double eta[8];
  double scaled[8];
  double norm_sq = 0.0;
  std::int64_t ell[8];
  for (int j = 0; j < d; ++j) {
    double v = xi[static_cast<std::size_t>(j)] * static_cast<double>(q);
    std::int64_t lj = static_cast<std::int64_t>(std::llround(v));
    ell[j] = lj;
    eta[j] = xi[static_cast<std::size_t>(j)] - static_cast<double>(lj) / static_cast<double>(q);
    scaled[j] = eta[j] * static_cast<double>(q);
    norm_sq += eta[j] * eta[j];
  }
  double bump = ctx.bump->phi_nd(std::span<const double>(scaled, static_cast<std::size_t>(d)));
  if (bump == 0.0) return {0.0, 0.0};
  // Grid sweeps revisit the same |eta| many times; memoize the quadrature
  // per thread, keyed on the exact double bits of (lambda^2, |eta|^2).
  static thread_local std::unordered_map<std::uint64_t, double> ft_cache;
  static thread_local std::uint64_t ft_cache_tag = 0;
  std::uint64_t tag = (static_cast<std::uint64_t>(ctx.d) << 56) ^
                      static_cast<std::uint64_t>(ctx.n);
  if (tag != ft_cache_tag) {
    ft_cache.clear();
    ft_cache_tag = tag;
  }
  std::uint64_t key;
  static_assert(sizeof(key) == sizeof(norm_sq));
  std::memcpy(&key, &norm_sq, sizeof(key));
  double surface;
  auto hit = ft_cache.find(key);
  if (hit != ft_cache.end()) {
    surface = hit->second;
  } else {
    surface = sphere_ft(d, ctx.lambda(), std::sqrt(norm_sq));
    if (ft_cache.size() < (1u << 20)) ft_cache.emplace(key, surface);
  }

  Complex arithmetic{0.0, 0.0};
  if (q == 1) {
    arithmetic = {1.0, 0.0};
  } else {
    std::vector<std::int64_t> ell_vec(ell, ell + d);
    for (std::uint64_t a = 1; a < q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      Complex g = arith::gauss_sum(static_cast<std::int64_t>(a), q, ell_vec);
      arithmetic += unit_phase_frac(-static_cast<std::int64_t>(a) * ctx.n, q) * g;
    }
  }
  return arithmetic * (bump * surface);
}

}  // namespace

Complex main_symbol(const SymbolContext& ctx, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != ctx.d)
    throw std::invalid_argument("main_symbol: wrong frequency dimension");
  KahanComplex acc;
  for (std::int64_t q = 1; q <= ctx.Lambda; ++q)
    acc.add(q_block_term(ctx, static_cast<std::uint64_t>(q), xi));
  return acc.value();
}

Complex main_symbol_block(const SymbolContext& ctx, std::uint64_t Q,
                          std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != ctx.d)
    throw std::invalid_argument("main_symbol_block: wrong frequency dimension");
  KahanComplex acc;
  for (std::uint64_t q = Q; q < 2 * Q && q <= static_cast<std::uint64_t>(ctx.Lambda); ++q)
    acc.add(q_block_term(ctx, q, xi));
  return acc.value();
}

namespace {

// Acklam's rational approximation of the inverse normal CDF, polished with
// one Halley step against erfc; ~1e-15 relative over (0,1).
double inverse_normal_cdf(double p) {
  constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                           -2.759285104469687e+02, 1.383577518672690e+02,
                           -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                           -1.556989798598866e+02, 6.680131188771972e+01,
                           -1.328068155288572e+01};
  constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                           -2.400758277161838e+00, -2.549732539343734e+00,
                           4.374664141464968e+00,  2.938163982698783e+00};
  constexpr double dd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                            2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double r = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((dd[0] * r + dd[1]) * r + dd[2]) * r + dd[3]) * r + 1.0);
  } else if (p <= 1.0 - p_low) {
    double r = p - 0.5;
    double s = r * r;
    x = (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * r /
        (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
  } else {
    double r = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((dd[0] * r + dd[1]) * r + dd[2]) * r + dd[3]) * r + 1.0);
  }
  // Halley refinement.
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(kTwoPi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double out = 0.0;
  while (index > 0) {
    out += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return out;
}

constexpr std::uint64_t kHaltonBase[8] = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace

KernelEstimate block_kernel_direct(std::uint64_t Q, const SymbolContext& ctx,
                                   std::span<const std::int32_t> x,
                                   const QmcOptions& opt) {
  if (static_cast<int>(x.size()) != ctx.d)
    throw std::invalid_argument("block_kernel_direct: wrong point dimension");
  if (Q < 1 || static_cast<std::int64_t>(Q) > ctx.Lambda)
    throw std::invalid_argument("block_kernel_direct: need 1 <= Q <= Lambda");
  const int d = ctx.d;
  const double lambda = ctx.lambda();
  std::int64_t norm_sq = 0;
  for (int j = 0; j < d; ++j)
    norm_sq += static_cast<std::int64_t>(x[static_cast<std::size_t>(j)]) *
               x[static_cast<std::size_t>(j)];

  // Ramanujan factors are exact; only the surface integrals are sampled.
  // S_q(x) = int Phi-check_q(x - lambda u) d sigma(u), with the product form
  // Phi-check_q(z) = q^{-d} prod_j phi-check(z_j / q).
  std::vector<std::int64_t> cq;
  std::vector<std::uint64_t> qs;
  for (std::uint64_t q = Q; q < 2 * Q && q <= static_cast<std::uint64_t>(ctx.Lambda); ++q) {
    qs.push_back(q);
    cq.push_back(arith::ramanujan_sum(q, norm_sq - ctx.n));
  }

  const int batches = std::max(2, opt.batches);
  const std::uint64_t pairs = std::max<std::uint64_t>(batches, opt.samples / 2);
  const std::uint64_t per_batch = pairs / batches;
  SplitMix64 rng(opt.seed);
  std::vector<double> shift(static_cast<std::size_t>(d) * batches);
  for (double& s : shift) s = rng.next_unit();

  std::vector<double> batch_mean(batches, 0.0);
  parallel_for(0, batches, [&](std::int64_t bi) {
    Kahan acc;
    const double* sh = shift.data() + static_cast<std::size_t>(bi) * d;
    for (std::uint64_t i = 0; i < per_batch; ++i) {
      double g[8];
      double len = 0.0;
      for (int j = 0; j < d; ++j) {
        double u = radical_inverse(i + 1, kHaltonBase[j]) + sh[j];
        u -= std::floor(u);
        u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
        g[j] = inverse_normal_cdf(u);
        len += g[j] * g[j];
      }
      len = std::sqrt(len);
      if (len == 0.0) len = 1.0;
      // Antithetic pair +-u.
      for (int sign = 0; sign < 2; ++sign) {
        double term = 0.0;
        Kahan block;
        for (std::size_t qi = 0; qi < qs.size(); ++qi) {
          if (cq[qi] == 0) continue;
          double q = static_cast<double>(qs[qi]);
          double prod = 1.0;
          for (int j = 0; j < d; ++j) {
            double y = lambda * (sign ? -g[j] : g[j]) / len;
            prod *= ctx.bump->check_value((x[static_cast<std::size_t>(j)] - y) / q);
          }
          block.add(static_cast<double>(cq[qi]) * prod / std::pow(q, d));
        }
        term = block.value();
        acc.add(0.5 * term);
      }
    }
    batch_mean[static_cast<std::size_t>(bi)] =
        acc.value() / static_cast<double>(per_batch);
  });

  double mean = 0.0;
  for (double m : batch_mean) mean += m;
  mean /= batches;
  double var = 0.0;
  for (double m : batch_mean) var += (m - mean) * (m - mean);
  var /= (batches - 1);
  double se = std::sqrt(var / batches);

  KernelEstimate est;
  est.value = mean;
  est.std_error = se;
  est.samples = per_batch * static_cast<std::uint64_t>(batches) * 2;
  if (se > std::max(opt.rel_tol * std::fabs(mean), opt.abs_tol))
    throw QuadratureNotConvergedError("block_kernel_direct: standard error above target");
  return est;
}

std::size_t Grid::index(std::span<const int> coord) const {
  std::size_t idx = 0;
  for (int j = 0; j < d; ++j) {
    int c = coord[static_cast<std::size_t>(j)] % n;
    if (c < 0) c += n;
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c);
  }
  return idx;
}

Grid block_kernel_spectral(std::uint64_t Q, const SymbolContext& ctx, int N) {
  if (N < 2 || (N & (N - 1)) != 0)
    throw std::invalid_argument("block_kernel_spectral: N must be a power of two");
  double total_d = std::pow(static_cast<double>(N), ctx.d);
  if (total_d > static_cast<double>(1 << 24))
    throw GridTooLargeError("block_kernel_spectral: N^d exceeds 2^24");
  const std::size_t total = static_cast<std::size_t>(total_d);
  const int d = ctx.d;

  fftw_complex* data = fftw_alloc_complex(total);
  // Sample the block symbol on the DFT grid, frequencies wrapped to
  // [-1/2, 1/2)^d.
  parallel_for(0, static_cast<std::int64_t>(total), [&](std::int64_t idx) {
    std::size_t rem = static_cast<std::size_t>(idx);
    double xi[8];
    for (int j = d - 1; j >= 0; --j) {
      int k = static_cast<int>(rem % static_cast<std::size_t>(N));
      rem /= static_cast<std::size_t>(N);
      xi[j] = (k < N / 2 ? k : k - N) / static_cast<double>(N);
    }
    Complex s = main_symbol_block(ctx, Q, std::span<const double>(xi, static_cast<std::size_t>(d)));
    data[idx][0] = s.real();
    data[idx][1] = s.imag();
  });

  {
    static std::mutex plan_mu;  // FFTW planning is not thread-safe
    std::scoped_lock lock(plan_mu);
    std::vector<int> dims(static_cast<std::size_t>(d), N);
    fftw_plan plan = fftw_plan_dft(d, dims.data(), data, data, FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  Grid g;
  g.d = d;
  g.n = N;
  g.values.resize(total);
  double scale = 1.0 / static_cast<double>(total);
  double max_imag = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    g.values[i] = data[i][0] * scale;
    max_imag = std::max(max_imag, std::fabs(data[i][1]) * scale);
  }
  g.max_imag = max_imag;
  fftw_free(data);
  return g;
}

void write_grid(const Grid& g, std::ostream& os) {
  const char magic[8] = {'S', 'L', 'G', 'R', 'I', 'D', '0', '1'};
  os.write(magic, 8);
  std::uint32_t d32 = static_cast<std::uint32_t>(g.d);
  std::uint32_t n32 = static_cast<std::uint32_t>(g.n);
  os.write(reinterpret_cast<const char*>(&d32), 4);
  os.write(reinterpret_cast<const char*>(&n32), 4);
  os.write(reinterpret_cast<const char*>(g.values.data()),
           static_cast<std::streamsize>(g.values.size() * sizeof(double)));
}

Grid read_grid(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "SLGRID01")
    throw std::invalid_argument("read_grid: bad magic");
  std::uint32_t d32 = 0, n32 = 0;
  is.read(reinterpret_cast<char*>(&d32), 4);
  is.read(reinterpret_cast<char*>(&n32), 4);
  Grid g;
  g.d = static_cast<int>(d32);
  g.n = static_cast<int>(n32);
  std::size_t total = 1;
  for (int j = 0; j < g.d; ++j) total *= static_cast<std::size_t>(g.n);
  g.values.resize(total);
  is.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(total * sizeof(double)));
  if (!is) throw std::invalid_argument("read_grid: truncated payload");
  return g;
}

SupReport residual_symbol_sup(const SymbolContext& ctx, int resolution) {
  if (resolution < 1) throw std::invalid_argument("residual_symbol_sup: resolution >= 1");
  double total_d = std::pow(static_cast<double>(resolution), ctx.d);
  if (total_d > static_cast<double>(1 << 26))
    throw GridTooLargeError("residual_symbol_sup: grid exceeds 2^26 points");
  const std::size_t total = static_cast<std::size_t>(total_d);
  const int d = ctx.d;

  struct Best {
    double value = -1.0;
    std::size_t index = 0;
  };
  const int chunks = 64;
  Best best = parallel_reduce<Best>(
      0, static_cast<std::int64_t>(total), chunks, Best{},
      [&](std::int64_t lo, std::int64_t hi) {
        Best b;
        for (std::int64_t idx = lo; idx < hi; ++idx) {
          std::size_t rem = static_cast<std::size_t>(idx);
          double xi[8];
          for (int j = d - 1; j >= 0; --j) {
            int k = static_cast<int>(rem % static_cast<std::size_t>(resolution));
            rem /= static_cast<std::size_t>(resolution);
            xi[j] = -0.5 + static_cast<double>(k) / static_cast<double>(resolution);
          }
          std::span<const double> view(xi, static_cast<std::size_t>(d));
          double v = std::abs(exact_symbol(ctx, view) - main_symbol(ctx, view));
          if (v > b.value) {
            b.value = v;
            b.index = static_cast<std::size_t>(idx);
          }
        }
        return b;
      },
      [](Best a, const Best& b) {
        if (b.value > a.value || (b.value == a.value && b.index < a.index)) return b;
        return a;
      });

  SupReport rep;
  rep.sup = best.value;
  rep.points = total;
  rep.argmax.resize(static_cast<std::size_t>(d));
  std::size_t rem = best.index;
  for (int j = d - 1; j >= 0; --j) {
    int k = static_cast<int>(rem % static_cast<std::size_t>(resolution));
    rem /= static_cast<std::size_t>(resolution);
    rep.argmax[static_cast<std::size_t>(j)] =
        -0.5 + static_cast<double>(k) / static_cast<double>(resolution);
  }
  return rep;
}

}  // namespace spherelab::symbols
