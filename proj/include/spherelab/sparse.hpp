#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spherelab/bigint.hpp"
#include "spherelab/lattice.hpp"

namespace spherelab::sparse {

using Volume = unsigned __int128;

// Half-open integer box prod_j [lo_j, hi_j).  Cubes, their concentric
// dilates, and witness geometry are all boxes.
struct Box {
  int d = 0;
  std::array<std::int64_t, 8> lo{};
  std::array<std::int64_t, 8> hi{};

  bool empty() const;
  Volume volume() const;
  bool contains_point(const std::int32_t* x) const;
  bool contains_box(const Box& other) const;
  bool operator==(const Box& other) const;
};

Box intersect(const Box& a, const Box& b);
Box translate(const Box& b, std::span<const std::int64_t> shift);

// Dyadic cube: corner is a multiple of the (power of two) side in the local
// grid of the decomposition.
struct DyadicCube {
  int d = 0;
  std::array<std::int64_t, 8> corner{};
  std::int64_t side = 1;

  Box box() const;
  Box dilate(std::int64_t factor) const;  // concentric: [c - k s, c + (k+1) s)
};

// |region ∩ union(boxes)|, exact.
Volume union_volume(const Box& region, std::span<const Box> boxes);

// Witness set given as outer \ union(holes).
struct Region {
  Box outer;
  std::vector<Box> holes;
};

Volume region_volume(const Region& r);
bool region_contains(const Region& r, const std::int32_t* x);

// Exact sup over lattice points of the number of witness regions covering
// the point.
int max_cover(std::span<const Region> witnesses);

struct SparseItem {
  Box cube;
  Region witness;  // E_Q, contained in cube
};

struct SparseCollection {
  std::vector<SparseItem> items;
  BigRational rho = BigRational(1, 2);
};

struct SparsityReport {
  bool ok = false;
  bool size_ok = false;     // every |E_Q| > rho |Q|
  bool overlap_ok = false;  // sup sum 1_{E_Q} <= 1/rho
  int max_overlap = 0;
  std::size_t worst_item = 0;  // first item failing the size condition
};

SparsityReport sparsity_check(const SparseCollection& s, const BigRational& rho);

// sum_Q <f>_{Q,p} <g>_{Q,r} |Q| with <h>_{Q,t} = ((1/|Q|) sum_{x in Q} |h|^t)^{1/t}.
double sparse_form(const SparseCollection& s, const lattice::LatticeFunction<double>& f,
                   const lattice::LatticeFunction<double>& g, double p, double r);

// Same form over a plain list of boxes with indicator inputs.
double indicator_form(std::span<const Box> cubes, const lattice::PointSet& e1,
                      const lattice::PointSet& e2, double p, double r);

// ---- argmax scale partition ----

// For each x in eval_box assigns the smallest dyadic Lambda <= Lambda_max
// attaining sup_Lambda of the dyadic maximal value of 1_{E1}; points where
// every scale vanishes map to the sentinel key 0.
std::map<std::int64_t, std::vector<lattice::Point>> argmax_partition(
    const lattice::PointSet& e1, std::int64_t lambda_max, const Box& eval_box);

// ---- stopping-time decomposition ----

struct StoppingOptions {
  double c0 = 1.0;          // initial stopping constant, doubled on packing failure
  int max_depth = 24;
  int max_retries = 40;
  std::int64_t enumerate_side = 8;        // exact-evaluation cell size
  std::uint64_t refine_budget = 1u << 20; // branch-and-bound splits per decision
};

struct StoppingNode {
  DyadicCube base;  // the cube playing the E role
  Box region;       // its concentric triple
  int depth = 0;
  std::uint64_t e1_count = 0;
  std::uint64_t e2_count = 0;
  std::vector<DyadicCube> stops;       // maximal stopping cubes
  std::vector<unsigned> stop_conds;    // bitmask per stop: 1,2,4 for conds 1..3
  std::vector<std::size_t> children;   // node indices (one per stop)
};

struct Decomposition {
  int d = 0;
  std::array<std::int64_t, 8> anchor{};  // local -> absolute shift
  std::vector<StoppingNode> nodes;       // nodes[0] is the root
  double c0_final = 0.0;
  int retries = 0;
  std::vector<Box> presparse;  // local coords: root region plus every 3Q
  std::vector<SparseCollection> buckets;  // 1/2-sparse split of the above
};

// Stopping-time decomposition of the pair (E1, E2): recursively selects the
// maximal dyadic subcubes of each node region satisfying any of
//   (1) <1_{3E} sup A 1_{E1}>_{Q,p} >= C0 <1_{E1}>_{3E,p}
//   (2) <1_{E1}>_{5Q,1}            >= C0 <1_{E1}>_{3E,1}
//   (3) <1_{E2}>_{5Q,1}            >= C0 <1_{E2}>_{3E,1}
// recursing into each 3Q with the sets localized there.  The packing
// sum |Q| <= |E|/100 is verified at every node; C0 doubles and the whole
// decomposition restarts when it fails.  The dyadic grid is anchored at the
// bounding-box corner of E1 and E2, so the output is translation invariant.
Decomposition stopping_decomposition(const lattice::PointSet& e1,
                                     const lattice::PointSet& e2, double p, double r,
                                     const StoppingOptions& opt = {});

struct DominationReport {
  double inner = 0.0;       // < sup A 1_{E1}, 1_{E2} >, sup over n <= lambda_sq_max
  double form_value = 0.0;  // indicator form over the pre-sparse collection
  double ratio = 0.0;
  double c0_final = 0.0;
  int retries = 0;
  bool exponent_in_range = true;  // (1/p, 1/r) inside Rstar(d)
};

// Measured sparse domination constant of the pair at exponents (1/p, 1/r).
DominationReport domination_constant(const lattice::PointSet& e1,
                                     const lattice::PointSet& e2,
                                     const BigRational& inv_p, const BigRational& inv_r,
                                     std::int64_t lambda_sq_max,
                                     const StoppingOptions& opt = {});

// JSON rendering of the tree (nested cubes with condition flags).
std::string tree_to_json(const Decomposition& dec);

}  // namespace spherelab::sparse
