#include "spherelab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "spherelab/errors.hpp"
#include "spherelab/numerics.hpp"
#include "spherelab/parallel.hpp"
#include "spherelab/regions.hpp"

namespace spherelab::sparse {

// ---------------------------------------------------------------- boxes ----

bool Box::empty() const {
  for (int j = 0; j < d; ++j)
    if (lo[static_cast<std::size_t>(j)] >= hi[static_cast<std::size_t>(j)]) return true;
  return d == 0;
}

Volume Box::volume() const {
  if (empty()) return 0;
  Volume v = 1;
  for (int j = 0; j < d; ++j)
    v *= static_cast<Volume>(hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)]);
  return v;
}

bool Box::contains_point(const std::int32_t* x) const {
  for (int j = 0; j < d; ++j) {
    std::size_t k = static_cast<std::size_t>(j);
    if (x[j] < lo[k] || x[j] >= hi[k]) return false;
  }
  return true;
}

bool Box::contains_box(const Box& other) const {
  for (int j = 0; j < d; ++j) {
    std::size_t k = static_cast<std::size_t>(j);
    if (other.lo[k] < lo[k] || other.hi[k] > hi[k]) return false;
  }
  return true;
}

bool Box::operator==(const Box& other) const {
  if (d != other.d) return false;
  for (int j = 0; j < d; ++j) {
    std::size_t k = static_cast<std::size_t>(j);
    if (lo[k] != other.lo[k] || hi[k] != other.hi[k]) return false;
  }
  return true;
}

Box intersect(const Box& a, const Box& b) {
  Box out;
  out.d = a.d;
  for (int j = 0; j < a.d; ++j) {
    std::size_t k = static_cast<std::size_t>(j);
    out.lo[k] = std::max(a.lo[k], b.lo[k]);
    out.hi[k] = std::min(a.hi[k], b.hi[k]);
    if (out.lo[k] > out.hi[k]) out.hi[k] = out.lo[k];
  }
  return out;
}

Box translate(const Box& b, std::span<const std::int64_t> shift) {
  Box out = b;
  for (int j = 0; j < b.d; ++j) {
    std::size_t k = static_cast<std::size_t>(j);
    out.lo[k] += shift[k];
    out.hi[k] += shift[k];
  }
  return out;
}

Box DyadicCube::box() const { return dilate(1); }

Box DyadicCube::dilate(std::int64_t factor) const {
  // Concentric odd dilate: [corner - m s, corner + (m+1) s) with factor = 2m+1.
  std::int64_t m = (factor - 1) / 2;
  Box out;
  out.d = d;
  for (int j = 0; j < d; ++j) {
    std::size_t k = static_cast<std::size_t>(j);
    out.lo[k] = corner[k] - m * side;
    out.hi[k] = corner[k] + (m + 1) * side;
  }
  return out;
}

namespace {

// First boundary of some box strictly inside the region along some axis.
std::optional<std::pair<int, std::int64_t>> find_split(const Box& region,
                                                       std::span<const Box> boxes) {
  for (const Box& b : boxes) {
    for (int j = 0; j < region.d; ++j) {
      std::size_t k = static_cast<std::size_t>(j);
      if (b.lo[k] > region.lo[k] && b.lo[k] < region.hi[k]) return {{j, b.lo[k]}};
      if (b.hi[k] > region.lo[k] && b.hi[k] < region.hi[k]) return {{j, b.hi[k]}};
    }
  }
  return std::nullopt;
}

Volume union_volume_rec(const Box& region, std::vector<Box>& scratch,
                        std::span<const Box> boxes) {
  scratch.clear();
  for (const Box& b : boxes) {
    Box c = intersect(b, region);
    if (c.empty()) continue;
    if (c.contains_box(region)) return region.volume();
    scratch.push_back(c);
  }
  if (scratch.empty()) return 0;
  std::vector<Box> clipped = scratch;
  auto split = find_split(region, clipped);
  // Every clipped box without an interior boundary equals the region, which
  // was handled above.
  if (!split) return region.volume();
  auto [axis, coord] = *split;
  Box left = region, right = region;
  left.hi[static_cast<std::size_t>(axis)] = coord;
  right.lo[static_cast<std::size_t>(axis)] = coord;
  std::vector<Box> inner;
  return union_volume_rec(left, inner, clipped) + union_volume_rec(right, inner, clipped);
}

}  // namespace

Volume union_volume(const Box& region, std::span<const Box> boxes) {
  std::vector<Box> scratch;
  return union_volume_rec(region, scratch, boxes);
}

Volume region_volume(const Region& r) {
  return r.outer.volume() - union_volume(r.outer, r.holes);
}

bool region_contains(const Region& r, const std::int32_t* x) {
  if (!r.outer.contains_point(x)) return false;
  for (const Box& h : r.holes)
    if (h.contains_point(x)) return false;
  return true;
}

namespace {

struct CoverItem {
  Box outer;
  std::vector<Box> holes;
};

void max_cover_rec(const Box& region, const std::vector<CoverItem>& items, int base,
                   int& best) {
  // Classify against the region; constant contributions accumulate in base.
  std::vector<CoverItem> alive;
  int full = base;
  std::vector<Box> boundaries;
  for (const CoverItem& it : items) {
    Box oc = intersect(it.outer, region);
    if (oc.empty()) continue;
    bool outer_full = oc.contains_box(region);
    CoverItem next;
    next.outer = oc;
    bool dead = false;
    for (const Box& h : it.holes) {
      Box hc = intersect(h, region);
      if (hc.empty()) continue;
      if (hc.contains_box(region)) {
        dead = true;
        break;
      }
      next.holes.push_back(hc);
    }
    if (dead) continue;
    if (outer_full && next.holes.empty()) {
      ++full;
      continue;
    }
    boundaries.push_back(next.outer);
    for (const Box& h : next.holes) boundaries.push_back(h);
    alive.push_back(std::move(next));
  }
  if (full + static_cast<int>(alive.size()) <= best) return;  // cannot improve
  if (alive.empty()) {
    best = std::max(best, full);
    return;
  }
  auto split = find_split(region, boundaries);
  if (!split) {
    // All alive geometry coincides with the region; holes equal to the region
    // were dropped, so every alive item covers it fully.
    best = std::max(best, full + static_cast<int>(alive.size()));
    return;
  }
  auto [axis, coord] = *split;
  Box left = region, right = region;
  left.hi[static_cast<std::size_t>(axis)] = coord;
  right.lo[static_cast<std::size_t>(axis)] = coord;
  max_cover_rec(left, alive, full, best);
  max_cover_rec(right, alive, full, best);
}

}  // namespace

int max_cover(std::span<const Region> witnesses) {
  if (witnesses.empty()) return 0;
  Box hull = witnesses[0].outer;
  std::vector<CoverItem> items;
  for (const Region& w : witnesses) {
    for (int j = 0; j < hull.d; ++j) {
      std::size_t k = static_cast<std::size_t>(j);
      hull.lo[k] = std::min(hull.lo[k], w.outer.lo[k]);
      hull.hi[k] = std::max(hull.hi[k], w.outer.hi[k]);
    }
    items.push_back({w.outer, w.holes});
  }
  int best = 0;
  max_cover_rec(hull, items, 0, best);
  return best;
}

SparsityReport sparsity_check(const SparseCollection& s, const BigRational& rho) {
  SparsityReport rep;
  rep.size_ok = true;
  std::int64_t num = static_cast<std::int64_t>(boost::multiprecision::numerator(rho));
  std::int64_t den = static_cast<std::int64_t>(boost::multiprecision::denominator(rho));
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    const SparseItem& it = s.items[i];
    // |E_Q| > rho |Q|, exact: den |E_Q| > num |Q|.
    Volume wv = region_volume(it.witness);
    Volume qv = it.cube.volume();
    if (!(wv * static_cast<Volume>(den) > qv * static_cast<Volume>(num))) {
      rep.size_ok = false;
      rep.worst_item = i;
      break;
    }
  }
  std::vector<Region> ws;
  ws.reserve(s.items.size());
  for (const SparseItem& it : s.items) ws.push_back(it.witness);
  rep.max_overlap = max_cover(ws);
  // sup sum 1_{E_Q} <= 1/rho: max_overlap * num <= den.
  rep.overlap_ok = static_cast<std::int64_t>(rep.max_overlap) * num <= den;
  rep.ok = rep.size_ok && rep.overlap_ok;
  return rep;
}

// ----------------------------------------------------------------- forms ----

namespace {

double box_average(const lattice::LatticeFunction<double>& f, const Box& q, double t) {
  Kahan acc;
  for (const auto& [p, v] : f.entries()) {
    if (!q.contains_point(p.data())) continue;
    acc.add(std::pow(std::fabs(v), t));
  }
  double vol = static_cast<double>(q.volume());
  return std::pow(acc.value() / vol, 1.0 / t);
}

std::uint64_t count_in_box(const lattice::PointSet& e, const Box& b) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (b.contains_point(e[i])) ++n;
  return n;
}

}  // namespace

double sparse_form(const SparseCollection& s, const lattice::LatticeFunction<double>& f,
                   const lattice::LatticeFunction<double>& g, double p, double r) {
  if (p < 1.0 || r < 1.0) throw std::invalid_argument("sparse_form: need p, r >= 1");
  Kahan acc;
  for (const SparseItem& it : s.items) {
    double vol = static_cast<double>(it.cube.volume());
    acc.add(box_average(f, it.cube, p) * box_average(g, it.cube, r) * vol);
  }
  return acc.value();
}

double indicator_form(std::span<const Box> cubes, const lattice::PointSet& e1,
                      const lattice::PointSet& e2, double p, double r) {
  Kahan acc;
  for (const Box& b : cubes) {
    std::uint64_t n1 = count_in_box(e1, b);
    if (n1 == 0) continue;
    std::uint64_t n2 = count_in_box(e2, b);
    if (n2 == 0) continue;
    double vol = static_cast<double>(b.volume());
    acc.add(std::pow(static_cast<double>(n1) / vol, 1.0 / p) *
            std::pow(static_cast<double>(n2) / vol, 1.0 / r) * vol);
  }
  return acc.value();
}

// ------------------------------------------------------ argmax partition ----

std::map<std::int64_t, std::vector<lattice::Point>> argmax_partition(
    const lattice::PointSet& e1, std::int64_t lambda_max, const Box& eval_box) {
  if (e1.size() == 0) throw std::invalid_argument("argmax_partition: E1 must be nonempty");
  if (lambda_max < 1 || (lambda_max & (lambda_max - 1)) != 0)
    throw std::invalid_argument("argmax_partition: lambda_max must be a power of two");
  const int d = e1.d;
  std::vector<std::uint64_t> rd = lattice::sphere_count_table(d, 4 * lambda_max * lambda_max);
  std::map<std::int64_t, std::vector<lattice::Point>> classes;

  std::vector<std::int32_t> x(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    x[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(eval_box.lo[static_cast<std::size_t>(j)]);
  for (;;) {
    double best = 0.0;
    std::int64_t arg = 0;  // sentinel: all scales vanish
    for (std::int64_t L = 1; L <= lambda_max; L *= 2) {
      double v = lattice::indicator_dyadic_max_at(e1, L, x.data(), rd);
      if (v > best) {  // strict: ties keep the smallest scale
        best = v;
        arg = L;
      }
    }
    classes[arg].push_back(lattice::Point(x.begin(), x.end()));
    int j = 0;
    while (j < d) {
      std::size_t k = static_cast<std::size_t>(j);
      if (++x[k] < eval_box.hi[k]) break;
      x[k] = static_cast<std::int32_t>(eval_box.lo[k]);
      ++j;
    }
    if (j == d) break;
  }
  return classes;
}

// --------------------------------------------- stopping-time decomposition ----

namespace {

struct RangeTables {
  std::vector<std::uint64_t> rd;
  // Sparse tables over rd for range min / max queries.
  std::vector<std::vector<std::uint64_t>> mn;
  std::vector<std::vector<std::uint64_t>> mx;

  void build(int d, std::int64_t n_max) {
    rd = lattice::sphere_count_table(d, n_max);
    std::size_t n = rd.size();
    int levels = 1;
    while ((1u << levels) <= n) ++levels;
    mn.assign(levels, {});
    mx.assign(levels, {});
    mn[0] = rd;
    mx[0] = rd;
    for (int l = 1; l < levels; ++l) {
      std::size_t len = n - (1u << l) + 1;
      mn[l].resize(len);
      mx[l].resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        mn[l][i] = std::min(mn[l - 1][i], mn[l - 1][i + (1u << (l - 1))]);
        mx[l][i] = std::max(mx[l - 1][i], mx[l - 1][i + (1u << (l - 1))]);
      }
    }
  }

  std::uint64_t range_min(std::int64_t a, std::int64_t b) const {  // inclusive
    std::size_t lo = static_cast<std::size_t>(a), hi = static_cast<std::size_t>(b);
    int l = 0;
    while ((2u << l) <= hi - lo + 1) ++l;
    return std::min(mn[l][lo], mn[l][hi + 1 - (1u << l)]);
  }
  std::uint64_t range_max(std::int64_t a, std::int64_t b) const {
    std::size_t lo = static_cast<std::size_t>(a), hi = static_cast<std::size_t>(b);
    int l = 0;
    while ((2u << l) <= hi - lo + 1) ++l;
    return std::max(mx[l][lo], mx[l][hi + 1 - (1u << l)]);
  }
};

struct Cell {
  std::array<std::int64_t, 8> corner{};
  std::int64_t side = 1;
};

// Exact-sum memo key: node base plus cell, stable across C0 retries.
using CellKey = std::array<std::int64_t, 18>;

CellKey make_key(const DyadicCube& base, const Cell& c) {
  CellKey k{};
  for (int j = 0; j < 8; ++j) k[static_cast<std::size_t>(j)] = base.corner[static_cast<std::size_t>(j)];
  k[8] = base.side;
  for (int j = 0; j < 8; ++j) k[9 + static_cast<std::size_t>(j)] = c.corner[static_cast<std::size_t>(j)];
  k[17] = c.side;
  return k;
}

// Certified evaluation of sum_{x in cell} g(x)^p against thresholds, where
// g = sup over radii <= n_max of the normalized sphere hit count against E1.
// Far cells are settled by interval bounds (g is squeezed between exact
// range statistics of r_d over the reachable distance window); only cells
// near E1 are ever enumerated.
class Cond1Engine {
 public:
  Cond1Engine(const lattice::PointSet& e1, std::int64_t n_max, double p,
              const RangeTables& tables, std::int64_t enumerate_side,
              std::uint64_t refine_budget,
              std::map<CellKey, double>& exact_cache, const DyadicCube& node_base)
      : e1_(e1),
        n_max_(n_max),
        p_(p),
        tables_(tables),
        enumerate_side_(enumerate_side),
        refine_budget_(refine_budget),
        cache_(exact_cache),
        base_(node_base) {}

  // true iff sum_{x in cell} g^p >= threshold, decided with certainty.
  bool decide(const Cell& cell, double threshold) {
    struct Entry {
      Cell cell;
      double lo, hi;
    };
    auto initial = bounds(cell);
    double lo_tot = initial.first, hi_tot = initial.second;
    std::vector<Entry> stack;
    if (initial.first != initial.second)
      stack.push_back({cell, initial.first, initial.second});
    std::uint64_t steps = 0;
    while (true) {
      if (lo_tot >= threshold) return true;
      if (hi_tot < threshold) return false;
      if (stack.empty()) return lo_tot >= threshold;  // totals are exact
      if (++steps > refine_budget_)
        throw RecursionBudgetError("stopping cond1: refinement budget exhausted");
      Entry e = stack.back();
      stack.pop_back();
      lo_tot -= e.lo;
      hi_tot -= e.hi;
      if (e.cell.side <= enumerate_side_) {
        double s = exact_sum(e.cell);
        lo_tot += s;
        hi_tot += s;
        continue;
      }
      std::int64_t half = e.cell.side / 2;
      const int d = e1_.d;
      for (int mask = 0; mask < (1 << d); ++mask) {
        Cell child;
        child.side = half;
        for (int j = 0; j < d; ++j) {
          std::size_t k = static_cast<std::size_t>(j);
          child.corner[k] = e.cell.corner[k] + ((mask >> j) & 1 ? half : 0);
        }
        auto b = bounds(child);
        lo_tot += b.first;
        hi_tot += b.second;
        if (b.first != b.second) stack.push_back({child, b.first, b.second});
      }
    }
  }

 private:
  // Interval [L, U] for sum_{x in cell} g^p.
  std::pair<double, double> bounds(const Cell& cell) const {
    const int d = e1_.d;
    std::int64_t m0 = std::numeric_limits<std::int64_t>::max();
    std::uint64_t active = 0;
    double lg = 0.0;
    for (std::size_t i = 0; i < e1_.size(); ++i) {
      const std::int32_t* z = e1_[i];
      std::int64_t dmin = 0, dmax = 0;
      for (int j = 0; j < d; ++j) {
        std::size_t k = static_cast<std::size_t>(j);
        std::int64_t a = cell.corner[k];
        std::int64_t b = cell.corner[k] + cell.side - 1;
        std::int64_t zj = z[j];
        std::int64_t below = zj < a ? a - zj : 0;
        std::int64_t above = zj > b ? zj - b : 0;
        std::int64_t near = below + above;  // one of them is 0
        dmin += near * near;
        std::int64_t far = std::max(zj - a, b - zj);
        dmax += far * far;
      }
      if (dmin <= n_max_) {
        ++active;
        m0 = std::min(m0, dmin);
        if (dmax <= n_max_ && d >= 4 && dmin >= 1) {
          // Every x in the cell realizes some radius in [dmin, dmax] against
          // this z, so g(x) >= 1 / max r_d over the window.
          double cand = 1.0 / static_cast<double>(tables_.range_max(dmin, dmax));
          lg = std::max(lg, cand);
        }
      }
    }
    double vol = std::pow(static_cast<double>(cell.side), d);
    if (active == 0) return {0.0, 0.0};
    std::int64_t m_lo = std::max<std::int64_t>(m0, 1);
    double ug = 1.0;
    if (m_lo <= n_max_) {
      // counts never exceed the active set size nor r_d itself
      double denom = static_cast<double>(tables_.range_min(m_lo, n_max_));
      ug = std::min(1.0, static_cast<double>(active) / denom);
    } else {
      // only radius 0 is reachable, which the sup excludes
      return {0.0, 0.0};
    }
    return {vol * std::pow(lg, p_), vol * std::pow(ug, p_)};
  }

  double exact_sum(const Cell& cell) {
    CellKey key = make_key(base_, cell);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const int d = e1_.d;
    Volume pts = 1;
    for (int j = 0; j < d; ++j) pts *= static_cast<Volume>(cell.side);
    std::span<const std::uint64_t> rd(tables_.rd);
    const bool square = p_ == 2.0;
    double total = parallel_reduce<double>(
        0, static_cast<std::int64_t>(pts), 16, 0.0,
        [&](std::int64_t lo, std::int64_t hi) {
          Kahan acc;
          std::int32_t x[8];
          for (std::int64_t idx = lo; idx < hi; ++idx) {
            std::int64_t rem = idx;
            for (int j = d - 1; j >= 0; --j) {
              std::size_t k = static_cast<std::size_t>(j);
              x[j] = static_cast<std::int32_t>(cell.corner[k] + rem % cell.side);
              rem /= cell.side;
            }
            double g = lattice::indicator_full_max_at(e1_, n_max_, x, rd);
            if (g > 0.0) acc.add(square ? g * g : std::pow(g, p_));
          }
          return acc.value();
        },
        [](double a, double b) { return a + b; });
    cache_.emplace(key, total);
    return total;
  }

  const lattice::PointSet& e1_;
  std::int64_t n_max_;
  double p_;
  const RangeTables& tables_;
  std::int64_t enumerate_side_;
  std::uint64_t refine_budget_;
  std::map<CellKey, double>& cache_;
  DyadicCube base_;
};

lattice::PointSet points_in_box(const lattice::PointSet& e, const Box& b) {
  lattice::PointSet out;
  out.d = e.d;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (b.contains_point(e[i]))
      out.push(std::span<const std::int32_t>(e[i], static_cast<std::size_t>(e.d)));
  return out;
}

// Largest squared distance from any corner of the box to any point of E.
std::int64_t max_dist_sq(const Box& b, const lattice::PointSet& e) {
  std::int64_t best = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const std::int32_t* z = e[i];
    std::int64_t s = 0;
    for (int j = 0; j < b.d; ++j) {
      std::size_t k = static_cast<std::size_t>(j);
      std::int64_t far = std::max(static_cast<std::int64_t>(z[j]) - b.lo[k],
                                  b.hi[k] - 1 - static_cast<std::int64_t>(z[j]));
      s += far * far;
    }
    best = std::max(best, s);
  }
  return best;
}

struct PackingFailure {};

}  // namespace

Decomposition stopping_decomposition(const lattice::PointSet& e1,
                                     const lattice::PointSet& e2, double p, double r,
                                     const StoppingOptions& opt) {
  if (e1.size() == 0 || e2.size() == 0)
    throw std::invalid_argument("stopping_decomposition: sets must be nonempty");
  if (e1.d != e2.d) throw std::invalid_argument("stopping_decomposition: dimension mismatch");
  if (p < 1.0 || r < 1.0) throw std::invalid_argument("stopping_decomposition: need p, r >= 1");
  const int d = e1.d;

  // Local coordinates anchored at the joint bounding box: the dyadic grid
  // travels with the data, which is what makes the whole construction
  // translation invariant.
  std::array<std::int64_t, 8> anchor{};
  std::int64_t extent = 1;
  {
    std::array<std::int64_t, 8> lo{}, hi{};
    for (int j = 0; j < d; ++j) {
      lo[static_cast<std::size_t>(j)] = std::numeric_limits<std::int64_t>::max();
      hi[static_cast<std::size_t>(j)] = std::numeric_limits<std::int64_t>::min();
    }
    auto absorb = [&](const lattice::PointSet& e) {
      for (std::size_t i = 0; i < e.size(); ++i)
        for (int j = 0; j < d; ++j) {
          std::size_t k = static_cast<std::size_t>(j);
          lo[k] = std::min<std::int64_t>(lo[k], e[i][j]);
          hi[k] = std::max<std::int64_t>(hi[k], e[i][j]);
        }
    };
    absorb(e1);
    absorb(e2);
    for (int j = 0; j < d; ++j) {
      std::size_t k = static_cast<std::size_t>(j);
      anchor[k] = lo[k];
      extent = std::max(extent, hi[k] - lo[k] + 1);
    }
  }
  std::int64_t side = 1;
  while (2 * side < extent) side *= 2;  // smallest power of two with 2*side >= extent

  auto localize = [&](const lattice::PointSet& e) {
    lattice::PointSet out;
    out.d = d;
    out.flat.reserve(e.flat.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      std::int32_t buf[8];
      for (int j = 0; j < d; ++j)
        buf[j] = static_cast<std::int32_t>(e[i][j] - anchor[static_cast<std::size_t>(j)]);
      out.push(std::span<const std::int32_t>(buf, static_cast<std::size_t>(d)));
    }
    return out;
  };
  lattice::PointSet e1l = localize(e1);
  lattice::PointSet e2l = localize(e2);

  std::map<CellKey, double> exact_cache;  // survives C0 retries
  RangeTables tables;
  std::int64_t tables_max = -1;

  Decomposition dec;
  dec.d = d;
  dec.anchor = anchor;

  double c0 = opt.c0;
  int retries = 0;
  for (;; c0 *= 2.0, ++retries) {
    if (retries > opt.max_retries)
      throw RecursionBudgetError("stopping_decomposition: retry budget exhausted");
    dec.nodes.clear();
    StoppingNode root;
    root.base.d = d;
    root.base.side = side;
    root.region = root.base.dilate(3);
    dec.nodes.push_back(root);

    try {
      for (std::size_t ni = 0; ni < dec.nodes.size(); ++ni) {
        // Note: dec.nodes grows inside the loop; index access only.
        Box region = dec.nodes[ni].region;
        DyadicCube base = dec.nodes[ni].base;
        int depth = dec.nodes[ni].depth;
        lattice::PointSet e1c = points_in_box(e1l, region);
        lattice::PointSet e2c = points_in_box(e2l, region);
        dec.nodes[ni].e1_count = e1c.size();
        dec.nodes[ni].e2_count = e2c.size();
        // The recursed bilinear term vanishes unless both sets meet the
        // region.
        if (e1c.size() == 0 || e2c.size() == 0) continue;
        if (depth >= opt.max_depth)
          throw RecursionBudgetError("stopping_decomposition: depth budget exhausted");

        std::int64_t n_max = max_dist_sq(region, e1c);
        if (n_max > tables_max) {
          tables.build(d, n_max);
          tables_max = n_max;
        }
        double region_vol = static_cast<double>(region.volume());
        double base1p = static_cast<double>(e1c.size()) / region_vol;  // <1_E1>_{R,p}^p
        double c0_pow_p = std::pow(c0, p);
        Cond1Engine engine(e1c, n_max, p, tables, opt.enumerate_side,
                           opt.refine_budget, exact_cache, base);

        std::uint64_t n1 = e1c.size(), n2 = e2c.size();
        std::vector<Cell> work;
        {
          // The 3^d top cells of the region, on the grid of the base side.
          Cell c;
          c.side = base.side;
          std::vector<int> idx(static_cast<std::size_t>(d), 0);
          for (;;) {
            for (int j = 0; j < d; ++j) {
              std::size_t k = static_cast<std::size_t>(j);
              c.corner[k] = region.lo[k] + idx[k] * base.side;
            }
            work.push_back(c);
            int j = 0;
            while (j < d) {
              if (++idx[static_cast<std::size_t>(j)] < 3) break;
              idx[static_cast<std::size_t>(j)] = 0;
              ++j;
            }
            if (j == d) break;
          }
        }
        while (!work.empty()) {
          Cell cell = work.back();
          work.pop_back();
          DyadicCube q;
          q.d = d;
          q.side = cell.side;
          q.corner = cell.corner;
          Box q5 = q.dilate(5);
          double vol5 = static_cast<double>(q5.volume());
          unsigned mask = 0;
          // (1): p-average of the maximal function over Q.
          double vol_q = std::pow(static_cast<double>(cell.side), d);
          if (engine.decide(cell, c0_pow_p * base1p * vol_q)) mask |= 1;
          // (2), (3): one-averages of the sets over 5Q against the region.
          if (static_cast<double>(count_in_box(e1c, q5)) / vol5 >=
              c0 * static_cast<double>(n1) / region_vol)
            mask |= 2;
          if (static_cast<double>(count_in_box(e2c, q5)) / vol5 >=
              c0 * static_cast<double>(n2) / region_vol)
            mask |= 4;
          if (mask != 0) {
            dec.nodes[ni].stops.push_back(q);
            dec.nodes[ni].stop_conds.push_back(mask);
            StoppingNode child;
            child.base = q;
            child.region = q.dilate(3);
            child.depth = depth + 1;
            dec.nodes[ni].children.push_back(dec.nodes.size());
            dec.nodes.push_back(child);
          } else if (cell.side > 1) {
            std::int64_t half = cell.side / 2;
            for (int m = 0; m < (1 << d); ++m) {
              Cell childc;
              childc.side = half;
              for (int j = 0; j < d; ++j) {
                std::size_t k = static_cast<std::size_t>(j);
                childc.corner[k] = cell.corner[k] + ((m >> j) & 1 ? half : 0);
              }
              work.push_back(childc);
            }
          }
        }
        // Packing: 100 sum |Q| <= |E|.
        Volume stop_vol = 0;
        for (const DyadicCube& q : dec.nodes[ni].stops) stop_vol += q.box().volume();
        if (stop_vol * 100 > base.box().volume()) throw PackingFailure{};
      }
    } catch (const PackingFailure&) {
      continue;  // double C0 and restart
    }
    break;
  }
  dec.c0_final = c0;
  dec.retries = retries;

  for (const StoppingNode& n : dec.nodes) dec.presparse.push_back(n.region);

  // Standard conversion to 1/2-sparse collections: place each box (largest
  // first) into the first bucket where, after carving out the boxes already
  // there, more than half of it survives as the witness.  Witnesses within a
  // bucket are then pairwise disjoint by construction.
  std::vector<std::size_t> order(dec.presparse.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    Volume va = dec.presparse[a].volume(), vb = dec.presparse[b].volume();
    if (va != vb) return va > vb;
    return dec.presparse[a].lo < dec.presparse[b].lo;
  });
  for (std::size_t oi : order) {
    const Box& b = dec.presparse[oi];
    bool placed = false;
    for (SparseCollection& bucket : dec.buckets) {
      std::vector<Box> holes;
      for (const SparseItem& it : bucket.items) {
        Box c = intersect(it.cube, b);
        if (!c.empty()) holes.push_back(c);
      }
      Volume wv = b.volume() - union_volume(b, holes);
      if (wv * 2 > b.volume()) {
        bucket.items.push_back({b, Region{b, std::move(holes)}});
        placed = true;
        break;
      }
    }
    if (!placed) {
      SparseCollection bucket;
      bucket.rho = BigRational(1, 2);
      bucket.items.push_back({b, Region{b, {}}});
      dec.buckets.push_back(std::move(bucket));
    }
  }
  return dec;
}

DominationReport domination_constant(const lattice::PointSet& e1,
                                     const lattice::PointSet& e2,
                                     const BigRational& inv_p, const BigRational& inv_r,
                                     std::int64_t lambda_sq_max,
                                     const StoppingOptions& opt) {
  if (lambda_sq_max < 1)
    throw std::invalid_argument("domination_constant: lambda_sq_max must be >= 1");
  const int d = e1.d;
  DominationReport rep;
  {
    regions::ConvexRegion rstar = regions::region_vertices(regions::Name::Rstar, d);
    rep.exponent_in_range = regions::contains(rstar, {inv_p, inv_r});
    if (!rep.exponent_in_range)
      std::cerr << "[sparse] warning: exponents outside the improving region\n";
  }
  double p = 1.0 / static_cast<double>(inv_p);
  double r = 1.0 / static_cast<double>(inv_r);

  // <sup A 1_{E1}, 1_{E2}> needs the maximal function only on E2.
  std::vector<std::uint64_t> rd = lattice::sphere_count_table(d, lambda_sq_max);
  Kahan inner;
  for (std::size_t i = 0; i < e2.size(); ++i)
    inner.add(lattice::indicator_full_max_at(e1, lambda_sq_max, e2[i], rd));
  rep.inner = inner.value();

  Decomposition dec = stopping_decomposition(e1, e2, p, r, opt);
  rep.c0_final = dec.c0_final;
  rep.retries = dec.retries;

  // The collection is stored in local coordinates; move it back next to the
  // sets before evaluating the form.
  std::vector<Box> absolute;
  absolute.reserve(dec.presparse.size());
  for (const Box& b : dec.presparse) absolute.push_back(translate(b, dec.anchor));
  rep.form_value = indicator_form(absolute, e1, e2, p, r);
  rep.ratio = rep.inner / rep.form_value;
  return rep;
}

namespace {

void node_json(const Decomposition& dec, std::size_t i, std::ostringstream& os) {
  const StoppingNode& n = dec.nodes[i];
  os << "{\"side\":" << n.base.side << ",\"corner\":[";
  for (int j = 0; j < dec.d; ++j)
    os << (j ? "," : "")
       << n.base.corner[static_cast<std::size_t>(j)] + dec.anchor[static_cast<std::size_t>(j)];
  os << "],\"depth\":" << n.depth << ",\"e1\":" << n.e1_count << ",\"e2\":" << n.e2_count
     << ",\"children\":[";
  for (std::size_t c = 0; c < n.children.size(); ++c) {
    if (c) os << ",";
    os << "{\"conds\":" << n.stop_conds[c] << ",\"node\":";
    node_json(dec, n.children[c], os);
    os << "}";
  }
  os << "]}";
}

}  // namespace

std::string tree_to_json(const Decomposition& dec) {
  std::ostringstream os;
  os << "{\"c0\":" << dec.c0_final << ",\"retries\":" << dec.retries << ",\"tree\":";
  node_json(dec, 0, os);
  os << "}";
  return os.str();
}

}  // namespace spherelab::sparse
