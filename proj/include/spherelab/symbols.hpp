#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spherelab/lattice.hpp"
#include "spherelab/numerics.hpp"

namespace spherelab::symbols {

// Smooth plateau bump: phi = 1 on [-1/8, 1/8], supported in [-1/4, 1/4],
// built from e^{-1/t} mollifier steps.  Its inverse Fourier transform is
// tabulated once on a dense grid and interpolated cubically; far tail values
// fall back to direct quadrature.
class BumpProfile {
 public:
  BumpProfile();

  double phi(double t) const;                           // the 1-D profile
  double phi_nd(std::span<const double> xi) const;      // product bump Phi
  double check_value(double z) const;                   // phi-check at z
  double check_interp_error() const { return interp_error_; }

  static const BumpProfile& standard();

 private:
  double check_direct(double z) const;  // quadrature, any z

  double grid_step_;
  double grid_max_;
  double interp_error_;
  std::vector<double> table_;
};

// Dimension / radius / dyadic level bundle for one symbol evaluation.
struct SymbolContext {
  int d = 0;
  std::int64_t n = 0;       // lambda^2
  std::int64_t Lambda = 0;  // dyadic level, Lambda^2 <= n < 4 Lambda^2
  const BumpProfile* bump = nullptr;

  double lambda() const;
  const lattice::PointList& sphere() const;  // lattice points with |y|^2 = n

 private:
  friend SymbolContext make_context(int, std::int64_t, std::int64_t,
                                    const BumpProfile*);
  mutable std::shared_ptr<lattice::PointList> sphere_;
};

SymbolContext make_context(int d, std::int64_t n, std::int64_t Lambda,
                           const BumpProfile* bump = nullptr);

// (1/r_d(n)) sum_{|y|^2 = n} e^{-2 pi i y.xi}: the multiplier symbol of the
// discrete spherical average, evaluated directly from the sphere points.
Complex exact_symbol(const SymbolContext& ctx, std::span<const double> xi);

// Fourier transform of the unit-mass surface measure of the radius-lambda
// sphere at frequency magnitude |xi|; real by symmetry, normalized to 1 at 0.
double sphere_ft(int d, double lambda, double xi_norm);

// Main-term symbol: for each q <= Lambda only the nearest ell/q contributes
// (the per-q bumps have disjoint supports), weighted by the unit Gauss sums.
Complex main_symbol(const SymbolContext& ctx, std::span<const double> xi);

// Same restricted to the dyadic block q in [Q, 2Q) (intersected with
// [1, Lambda]).
Complex main_symbol_block(const SymbolContext& ctx, std::uint64_t Q,
                          std::span<const double> xi);

struct QmcOptions {
  std::uint64_t samples = 1ull << 16;  // total evaluations, antithetic pairs
  int batches = 16;                    // randomized-shift batches for the SE
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  std::uint64_t seed = 0x5eedu;
};

struct KernelEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

// Spatial kernel of the q-block at lattice point x:
//   sum_{Q <= q < 2Q} c_q(|x|^2 - n) * (d sigma_lambda * Phi-check_q)(x),
// the surface integral evaluated by randomized quasi-Monte Carlo with the
// reported standard error.  Throws QuadratureNotConvergedError if the target
// is not met within the sample budget.
KernelEstimate block_kernel_direct(std::uint64_t Q, const SymbolContext& ctx,
                                   std::span<const std::int32_t> x,
                                   const QmcOptions& opt = {});

struct Grid {
  int d = 0;
  int n = 0;                   // points per axis
  std::vector<double> values;  // row-major, size n^d
  double max_imag = 0.0;       // diagnostic: inverse-DFT imaginary residue

  std::size_t index(std::span<const int> coord) const;
};

// Samples the q-block of the main symbol on the N^d frequency grid and
// applies the inverse DFT: the periodized block kernel on (Z/N)^d.
// N must be a power of two with N^d <= 2^24 (GridTooLargeError).
Grid block_kernel_spectral(std::uint64_t Q, const SymbolContext& ctx, int N);

// Binary grid format: magic "SLGRID01", u32 d, u32 n, then row-major f64.
void write_grid(const Grid& g, std::ostream& os);
Grid read_grid(std::istream& is);

struct SupReport {
  double sup = 0.0;
  std::vector<double> argmax;
  std::uint64_t points = 0;
};

// max over the sampled frequency grid of |exact - main|: an empirical upper
// bound proxy for the residual symbol at this resolution (not a certificate).
SupReport residual_symbol_sup(const SymbolContext& ctx, int resolution);

}  // namespace spherelab::symbols
