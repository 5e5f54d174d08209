#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spherelab/bigint.hpp"
#include "spherelab/lattice.hpp"

namespace spherelab::maximal {

enum class Family { Ball, Box, SphereShell, RandomDensity };

Family parse_family(const std::string& s);
std::string family_string(Family f);

struct Budget {
  std::uint64_t max_pair_ops = 1ull << 34;  // (output point, set point) pairs
  std::uint64_t max_set_points = 1ull << 21;
};

// Test-set generator adapted to the scale:
//   ball:           { |z|^2 <= Lambda^2 }
//   box:            [-(Lambda+1)/2, Lambda/2]^d  (side Lambda+1, centered)
//   sphere_shell:   { Lambda^2 <= |z|^2 < Lambda^2 + Lambda }
//   random_density: density-1/4 seeded subset of [-Lambda, Lambda]^d
// The first three are symmetric under coordinate permutation and sign flips,
// which the norm evaluation exploits.
lattice::PointSet make_family(Family f, int d, std::int64_t Lambda, std::uint64_t seed,
                              const Budget& budget = {});

struct NormEstimate {
  std::string family;
  int d = 0;
  std::int64_t Lambda = 0;
  BigRational inv_p;
  BigRational inv_r;
  double norm = 0.0;       // || sup-dyadic A 1_E ||_{r'} over all of Z^d
  double ratio = 0.0;      // norm / |E|^{1/p}
  std::uint64_t set_size = 0;
  std::string witness;
};

// Restricted-input norm ratio || dyadic max of A 1_E ||_{r'} / |E|^{1/p} at
// level Lambda; exponents given as exact (1/p, 1/r); 1/r = 1 means r' = inf.
// symmetric = true switches to the orbit-reduced evaluation (requires E to be
// invariant under coordinate permutations and sign changes).
NormEstimate restricted_ratio(const lattice::PointSet& E, const BigRational& inv_p,
                              const BigRational& inv_r, std::int64_t Lambda,
                              bool symmetric, const Budget& budget = {});

struct ScalingRow {
  std::int64_t Lambda = 0;
  double ratio = 0.0;
};

struct ScalingFit {
  double slope = 0.0;
  double r2 = 0.0;
  double theoretical = 0.0;  // d (1/r' - 1/p)
  double excess = 0.0;       // slope - theoretical
  std::vector<ScalingRow> rows;
};

// Lower-bound consistency fit: log max-ratio over the family against
// log Lambda, compared with the scaling exponent.  A finite family certifies
// only a lower bound on the operator norm; the slope comparison is a
// consistency check, not an upper-bound verification.
ScalingFit scaling_fit(Family f, const BigRational& inv_p, const BigRational& inv_r,
                       int d, std::span<const std::int64_t> lambdas,
                       std::uint64_t seed, const Budget& budget = {});

}  // namespace spherelab::maximal
