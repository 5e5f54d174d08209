#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "spherelab/bigint.hpp"
#include "spherelab/errors.hpp"

namespace spherelab::lattice {

using Point = std::vector<std::int32_t>;

// r_d(n) = #{ y in Z^d : |y|^2 = n } via the convolution recurrence
// r_d = r_{d-1} * r_1 with memoized per-dimension tables.
std::uint64_t sphere_count(int d, std::int64_t n);

// Read-only view of r_d on [0, n_max]; extends the memo as needed.
std::vector<std::uint64_t> sphere_count_table(int d, std::int64_t n_max);

// Flat row-major list of lattice points; the enumeration backtracks over
// coordinates with square-sum pruning.
struct PointList {
  int d = 0;
  std::vector<std::int32_t> flat;

  std::size_t size() const { return d ? flat.size() / static_cast<std::size_t>(d) : 0; }
  const std::int32_t* operator[](std::size_t i) const {
    return flat.data() + i * static_cast<std::size_t>(d);
  }
  void push(const std::int32_t* p) { flat.insert(flat.end(), p, p + d); }
};

PointList sphere_points(int d, std::int64_t n);

struct PointHash {
  std::size_t operator()(const Point& p) const {
    std::size_t h = 1469598103934665603ull;
    for (std::int32_t v : p) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Finitely supported function Z^d -> values.  T is double for throughput or
// BigRational for the exact oracles.
template <class T>
class LatticeFunction {
 public:
  explicit LatticeFunction(int d) : d_(d) {}

  int dim() const { return d_; }
  std::size_t support_size() const { return values_.size(); }

  void set(Point p, T v) {
    if (static_cast<int>(p.size()) != d_)
      throw std::invalid_argument("LatticeFunction: wrong point dimension");
    if (v == T(0))
      values_.erase(p);
    else
      values_[std::move(p)] = std::move(v);
  }
  void add(const Point& p, const T& v) {
    auto it = values_.find(p);
    if (it == values_.end())
      values_.emplace(p, v);
    else
      it->second += v;
  }
  T at(const Point& p) const {
    auto it = values_.find(p);
    return it == values_.end() ? T(0) : it->second;
  }

  const std::unordered_map<Point, T, PointHash>& entries() const { return values_; }

  T total_mass() const {
    T s(0);
    for (const auto& [p, v] : values_) s += v;
    return s;
  }
  T l1_norm() const {
    T s(0);
    for (const auto& [p, v] : values_) s += (v < T(0) ? -v : v);
    return s;
  }
  T linf_norm() const {
    T m(0);
    for (const auto& [p, v] : values_) {
      T a = v < T(0) ? -v : v;
      if (a > m) m = a;
    }
    return m;
  }

 private:
  int d_;
  std::unordered_map<Point, T, PointHash> values_;
};

// Line-oriented text format: header "d=<d>", then one support point per line.
void serialize(const LatticeFunction<double>& f, std::ostream& os);
void serialize(const LatticeFunction<BigRational>& f, std::ostream& os);
LatticeFunction<double> deserialize(std::istream& is);

// Convolution with the normalized counting measure of { |y|^2 = n }.
// Throws EmptySphereError when r_d(n) = 0.
template <class T>
LatticeFunction<T> spherical_average(const LatticeFunction<T>& f, std::int64_t n);

// Pointwise max of |A_lambda f| over n = lambda^2 in [Lambda^2, 4 Lambda^2)
// with r_d(n) > 0.
template <class T>
LatticeFunction<T> dyadic_maximal(const LatticeFunction<T>& f, std::int64_t Lambda);

template <class T>
struct FullMaximal {
  LatticeFunction<T> sup;
  double tail_bound = 0.0;  // ||f||_1 / min r_d on (n_max, 2 n_max]
  bool certified = false;   // tail bound below the computed max
};

// Pointwise sup over all n <= n_max plus a rigorous tail report; the sup is
// certified only when no radius beyond the truncation can compete.
template <class T>
FullMaximal<T> full_maximal(const LatticeFunction<T>& f, std::int64_t n_max);

// ---- Indicator-set fast paths (shared by the norm and sparse labs) ----

struct PointSet {
  int d = 0;
  std::vector<std::int32_t> flat;

  std::size_t size() const { return d ? flat.size() / static_cast<std::size_t>(d) : 0; }
  const std::int32_t* operator[](std::size_t i) const {
    return flat.data() + i * static_cast<std::size_t>(d);
  }
  void push(std::span<const std::int32_t> p) {
    flat.insert(flat.end(), p.begin(), p.end());
  }
};

// max over n in [lambda^2, 4 lambda^2) of #{z in E : |x-z|^2 = n} / r_d(n).
double indicator_dyadic_max_at(const PointSet& E, std::int64_t Lambda,
                               const std::int32_t* x,
                               std::span<const std::uint64_t> rd_table);

// Same with n ranging over [1, n_max].
double indicator_full_max_at(const PointSet& E, std::int64_t n_max,
                             const std::int32_t* x,
                             std::span<const std::uint64_t> rd_table);

}  // namespace spherelab::lattice
