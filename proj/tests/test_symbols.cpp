#include "spherelab/symbols.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "spherelab/arith.hpp"
#include "spherelab/errors.hpp"
#include "spherelab/lattice.hpp"
#include "spherelab/numerics.hpp"

using namespace spherelab;
using namespace spherelab::symbols;

namespace {

// Independent Simpson quadrature for the bump transform oracle.
double check_oracle(const BumpProfile& bump, double z) {
  const int n = 4096;  // even
  const double h = 0.25 / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double t = i * h;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * bump.phi(t) * std::cos(kTwoPi * t * z);
  }
  return 2.0 * acc * h / 3.0;
}

}  // namespace

TEST_SUITE("symbols") {

TEST_CASE("bump plateau and support") {
  const BumpProfile& b = BumpProfile::standard();
  CHECK(b.phi(0.0) == 1.0);
  CHECK(b.phi(0.124) == 1.0);
  CHECK(b.phi(-0.125) == 1.0);
  CHECK(b.phi(0.25) == 0.0);
  CHECK(b.phi(-0.3) == 0.0);
  for (double t = 0.125; t <= 0.245; t += 0.005) {
    CHECK(b.phi(t) >= 0.0);
    CHECK(b.phi(t) <= 1.0);
    CHECK(b.phi(t) >= b.phi(t + 0.005) - 1e-12);  // monotone down the ramp
  }
  std::vector<double> xi = {0.05, -0.1, 0.0};
  CHECK(b.phi_nd(xi) == 1.0);
  std::vector<double> xi2 = {0.05, 0.3};
  CHECK(b.phi_nd(xi2) == 0.0);
}

TEST_CASE("bump transform table against Simpson oracle") {
  const BumpProfile& b = BumpProfile::standard();
  for (double z : {0.0, 0.37, 1.0, 2.71, 9.5, 31.25, 63.8, 127.0, 200.0}) {
    CHECK(b.check_value(z) == doctest::Approx(check_oracle(b, z)).epsilon(5e-7));
    CHECK(b.check_value(-z) == b.check_value(z));
  }
  // value at 0 is the integral of phi: between the plateau and support sizes
  CHECK(b.check_value(0.0) > 0.25);
  CHECK(b.check_value(0.0) < 0.5);
}

TEST_CASE("exact symbol basics") {
  SymbolContext ctx = make_context(5, 1, 1);
  std::vector<double> zero(5, 0.0);
  CHECK(std::abs(exact_symbol(ctx, zero) - Complex{1, 0}) < 1e-12);
  // d=5, n=1: (1/5) sum_j cos(2 pi xi_j)
  std::vector<double> xi = {0.1, -0.2, 0.3, 0.05, 0.45};
  double expect = 0.0;
  for (double c : xi) expect += std::cos(kTwoPi * c);
  expect /= 5.0;
  Complex got = exact_symbol(ctx, xi);
  CHECK(got.real() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(got.imag()) < 1e-12);
  // conjugate symmetry
  std::vector<double> neg = xi;
  for (double& c : neg) c = -c;
  Complex mirrored = exact_symbol(ctx, neg);
  CHECK(mirrored.real() == doctest::Approx(got.real()).epsilon(1e-12));
  CHECK(mirrored.imag() == doctest::Approx(-got.imag()).epsilon(1e-12));
}

TEST_CASE("sphere_ft closed forms") {
  CHECK(sphere_ft(3, 1.0, 0.0) == doctest::Approx(1.0));
  for (double rho : {0.05, 0.3, 0.77, 1.9}) {
    double sinc = std::sin(kTwoPi * rho) / (kTwoPi * rho);
    CHECK(sphere_ft(3, 1.0, rho) == doctest::Approx(sinc).epsilon(1e-8));
    double u = kTwoPi * 2.5 * rho;  // d=5, lambda=2.5: 3 (sin u - u cos u)/u^3
    double closed5 = 3.0 * (std::sin(u) - u * std::cos(u)) / (u * u * u);
    CHECK(sphere_ft(5, 2.5, rho) == doctest::Approx(closed5).epsilon(1e-8));
  }
  // d=1 degenerates to a cosine
  CHECK(sphere_ft(1, 3.0, 0.25) == doctest::Approx(std::cos(kTwoPi * 0.75)));
}

TEST_CASE("sphere_ft decay") {
  // |value| <= C (1 + lambda rho)^{-(d-1)/2} on a log grid; C stays small
  for (int d : {3, 4, 5}) {
    for (double x : {1.0, 4.0, 16.0, 64.0}) {
      double v = std::fabs(sphere_ft(d, x, 1.0));
      CHECK(v <= 3.0 * std::pow(1.0 + x, -(d - 1) / 2.0));
    }
  }
}

TEST_CASE("main symbol at level 1 is the bump times the surface transform") {
  for (std::int64_t n : {1, 2, 3}) {
    SymbolContext ctx = make_context(5, n, 1);
    std::vector<double> xi = {0.07, -0.12, 0.02, 0.2, -0.33};
    double norm = 0.0;
    for (double c : xi) norm += c * c;
    double expect = ctx.bump->phi_nd(xi) * sphere_ft(5, ctx.lambda(), std::sqrt(norm));
    Complex got = main_symbol(ctx, xi);
    CHECK(got.real() == doctest::Approx(expect).epsilon(1e-10));
    CHECK(std::abs(got.imag()) < 1e-12);
  }
}

TEST_CASE("q-block vanishes away from its frequency supports") {
  SymbolContext ctx = make_context(4, 5, 2);
  // both coordinates at distance 1/4 from every ell/2
  std::vector<double> xi = {0.25, 0.25, 0.25, 0.25};
  CHECK(std::abs(main_symbol_block(ctx, 2, xi)) == 0.0);
}

TEST_CASE("level-2 block matches a hand expansion at xi = (1/2, 0, ...)") {
  // q = 2 at xi = e_1/2: ell* = (1,0,0,0), eta = 0, Phi = 1, F(0) = 1; the
  // single unit a = 1 contributes e^{-pi i n} G(1/2, ell*).
  for (std::int64_t n : {4, 6}) {
    SymbolContext ctx = make_context(4, n, 2);
    std::vector<double> xi = {0.5, 0.0, 0.0, 0.0};
    std::vector<std::int64_t> ell = {1, 0, 0, 0};
    Complex expect = unit_phase_frac(-n, 2) * arith::gauss_sum(1, 2, ell);
    Complex got = main_symbol_block(ctx, 2, xi);
    CHECK(got.real() == doctest::Approx(expect.real()).epsilon(1e-10));
    CHECK(got.imag() == doctest::Approx(expect.imag()).epsilon(1e-10));
  }
}

TEST_CASE("kernel arithmetic factor collapses via Gauss inversion") {
  // sum_a e^{-2 pi i n a / q} e^{2 pi i a |x|^2 / q} = c_q(|x|^2 - n)
  for (std::uint64_t q = 2; q <= 12; ++q) {
    for (std::int64_t n : {1, 7, 20}) {
      for (std::int64_t norm_sq : {0, 5, 13}) {
        Complex acc{0, 0};
        for (std::uint64_t a = 1; a < q; ++a) {
          if (std::gcd(a, q) != 1) continue;
          acc += unit_phase_frac(static_cast<std::int64_t>(a) * (norm_sq - n), q);
        }
        CHECK(acc.real() ==
              doctest::Approx(static_cast<double>(arith::ramanujan_sum(q, norm_sq - n)))
                  .epsilon(1e-9));
        CHECK(std::abs(acc.imag()) < 1e-9);
      }
    }
  }
}

TEST_CASE("DFT of the averaged delta matches the exact symbol") {
  // A_lambda delta_0 on a box covering its support; the DFT at any frequency
  // equals the exact symbol there.
  const int d = 2;
  const std::int64_t n = 25;
  SymbolContext ctx = make_context(d, n, 4);
  lattice::LatticeFunction<double> delta(d);
  delta.add(lattice::Point{0, 0}, 1.0);
  auto avg = lattice::spherical_average(delta, n);
  SplitMix64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> xi = {rng.next_unit() - 0.5, rng.next_unit() - 0.5};
    KahanComplex dft;
    for (const auto& [p, v] : avg.entries()) {
      double phase = -(p[0] * xi[0] + p[1] * xi[1]);
      dft.add(v * unit_phase(phase));
    }
    CHECK(std::abs(dft.value() - exact_symbol(ctx, xi)) < 1e-9);
  }
}

TEST_CASE("spectral kernel satisfies Parseval") {
  SymbolContext ctx = make_context(2, 25, 4);
  const int N = 32;
  Grid g = block_kernel_spectral(1, ctx, N);
  // sum_x K(x)^2 = (1/N^d) sum_k |s(k)|^2
  double lhs = 0.0;
  for (double v : g.values) lhs += v * v;
  double rhs = 0.0;
  for (int k0 = 0; k0 < N; ++k0)
    for (int k1 = 0; k1 < N; ++k1) {
      std::vector<double> xi = {(k0 < N / 2 ? k0 : k0 - N) / static_cast<double>(N),
                                (k1 < N / 2 ? k1 : k1 - N) / static_cast<double>(N)};
      rhs += std::norm(main_symbol_block(ctx, 1, xi));
    }
  rhs /= N * N;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  CHECK(g.max_imag < 1e-12);
  CHECK_THROWS_AS(block_kernel_spectral(1, make_context(5, 1, 1), 64), GridTooLargeError);
}

TEST_CASE("grid io round trip") {
  SymbolContext ctx = make_context(2, 25, 4);
  Grid g = block_kernel_spectral(1, ctx, 8);
  std::stringstream ss;
  write_grid(g, ss);
  Grid h = read_grid(ss);
  CHECK(h.d == g.d);
  CHECK(h.n == g.n);
  CHECK(h.values == g.values);
}

TEST_CASE("direct and spectral block kernels agree") {
  SymbolContext ctx = make_context(2, 25, 4);
  const int N = 32;
  for (std::uint64_t Q : {1ull, 2ull}) {
    Grid g = block_kernel_spectral(Q, ctx, N);
    QmcOptions opt;
    opt.samples = 1 << 16;
    opt.rel_tol = 1e-2;
    opt.abs_tol = 1e-7;
    for (std::vector<std::int32_t> x : {std::vector<std::int32_t>{1, 0},
                                        std::vector<std::int32_t>{3, -4},
                                        std::vector<std::int32_t>{5, 2}}) {
      KernelEstimate direct = block_kernel_direct(Q, ctx, x, opt);
      std::vector<int> coord(x.begin(), x.end());
      double spectral = g.values[g.index(coord)];
      CHECK(std::fabs(direct.value - spectral) <=
            4.0 * direct.std_error + 1e-5);  // QMC error + periodization tail
    }
  }
}

TEST_CASE("direct kernel at a lattice point on the sphere") {
  // |x|^2 = n makes every Ramanujan factor phi(q) (maximal).
  SymbolContext ctx = make_context(2, 25, 4);
  std::vector<std::int32_t> x = {3, 4};
  QmcOptions opt;
  opt.samples = 1 << 14;
  opt.rel_tol = 1e-2;
  opt.abs_tol = 1e-7;
  KernelEstimate est = block_kernel_direct(2, ctx, x, opt);
  CHECK(est.samples > 0);
  CHECK(std::isfinite(est.value));
}

TEST_CASE("residual sup symmetry and refinement") {
  SymbolContext ctx = make_context(5, 2, 1);
  // |exact - main| is even in xi
  SplitMix64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> xi(5);
    for (double& c : xi) c = rng.next_unit() - 0.5;
    std::vector<double> neg = xi;
    for (double& c : neg) c = -c;
    double a = std::abs(exact_symbol(ctx, xi) - main_symbol(ctx, xi));
    double b = std::abs(exact_symbol(ctx, neg) - main_symbol(ctx, neg));
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }
  SupReport coarse = residual_symbol_sup(ctx, 4);
  SupReport fine = residual_symbol_sup(ctx, 8);  // nested refinement
  CHECK(coarse.sup >= 0.0);
  CHECK(fine.sup >= coarse.sup - 1e-15);
  CHECK(coarse.argmax.size() == 5);
}

TEST_CASE("dyadic Ramanujan block sums grow slowly in the window length") {
  // max_{m <= M} |sum_{Q <= q < 2Q} c_q(m)| / Q against M on a log grid.
  const std::uint64_t Q = 8;
  std::vector<std::vector<std::int64_t>> signed_rows;
  for (std::uint64_t q = Q; q < 2 * Q; ++q) {
    std::vector<std::int64_t> row(q);
    for (std::uint64_t s = 0; s < q; ++s)
      row[s] = arith::ramanujan_sum(q, static_cast<std::int64_t>(s));
    signed_rows.push_back(row);
  }
  std::vector<double> lx, ly;
  double running = 0.0;
  std::uint64_t m = 1;
  for (std::uint64_t M : {100ull, 1000ull, 10000ull, 100000ull}) {
    for (; m <= M; ++m) {
      std::int64_t s = 0;
      for (std::uint64_t q = Q; q < 2 * Q; ++q) s += signed_rows[q - Q][m % q];
      running = std::max(running, std::fabs(static_cast<double>(s)) / Q);
    }
    lx.push_back(std::log(static_cast<double>(M)));
    ly.push_back(std::log(running));
  }
  LineFit fit = fit_line(lx.data(), ly.data(), lx.size());
  CHECK(fit.slope < 0.15);
}

}  // TEST_SUITE
