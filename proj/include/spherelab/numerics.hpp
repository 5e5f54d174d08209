#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace spherelab {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Kahan compensated accumulator.  Oscillatory exponential sums cancel almost
// completely, so the naive running error (~n eps * sum of |terms|) would eat
// the 1e-9 tolerances at q ~ 10^3 term counts and beyond.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

struct KahanComplex {
  Kahan re;
  Kahan im;

  void add(Complex z) {
    re.add(z.real());
    im.add(z.imag());
  }
  Complex value() const { return {re.value(), im.value()}; }
};

// e^{2 pi i t}.
inline Complex unit_phase(double turns) {
  double t = turns - std::floor(turns);
  return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
}

// e^{2 pi i num/den} with the fraction reduced modulo 1 in exact integer
// arithmetic first; keeps phases accurate for large |num|.
inline Complex unit_phase_frac(std::int64_t num, std::uint64_t den) {
  std::int64_t d = static_cast<std::int64_t>(den);
  std::int64_t r = num % d;
  if (r < 0) r += d;
  return unit_phase(static_cast<double>(r) / static_cast<double>(d));
}

// Least-squares fit of y = slope*x + intercept with coefficient of
// determination; used by every log-log growth check.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit fit_line(const double* xs, const double* ys, std::size_t n) {
  LineFit out;
  if (n < 2) return out;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mx;
    double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return out;
}

// splitmix64: tiny seedable generator for reproducible experiment sampling.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, bound); bound > 0.  Rejection-free modulo is fine here:
  // determinism matters, uniformity bias at desk scale does not.
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace spherelab
