#include "spherelab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

namespace spherelab::lattice {

namespace {

// Memoized r_d tables, d <= 8.  Guarded: concurrent maximal operators share
// them.
struct RdCache {
  std::mutex mu;
  std::vector<std::uint64_t> tables[9];

  // Ensures tables[dd] covers [0, n_max] for all dd <= d.
  void extend(int d, std::int64_t n_max) {
    std::scoped_lock lock(mu);
    std::size_t need = static_cast<std::size_t>(n_max) + 1;
    if (tables[1].size() < need) {
      std::vector<std::uint64_t>& r1 = tables[1];
      r1.assign(need, 0);
      r1[0] = 1;
      for (std::int64_t j = 1; static_cast<std::size_t>(j) * j < need; ++j)
        r1[static_cast<std::size_t>(j * j)] = 2;
    }
    for (int dd = 2; dd <= d; ++dd) {
      std::vector<std::uint64_t>& rd = tables[dd];
      if (rd.size() >= need) continue;
      const std::vector<std::uint64_t>& prev = tables[dd - 1];
      std::size_t old = rd.size();
      rd.resize(need, 0);
      for (std::size_t n = old; n < need; ++n) {
        std::uint64_t total = prev[n];  // j = 0
        for (std::int64_t j = 1; static_cast<std::size_t>(j) * j <= n; ++j)
          total += 2 * prev[n - static_cast<std::size_t>(j) * j];
        rd[n] = total;
      }
    }
  }
};

RdCache& rd_cache() {
  static RdCache cache;
  return cache;
}

void check_dim(int d) {
  if (d < 1 || d > 8) throw std::invalid_argument("lattice: dimension must be in [1,8]");
}

}  // namespace

std::uint64_t sphere_count(int d, std::int64_t n) {
  check_dim(d);
  if (n < 0) throw std::invalid_argument("sphere_count: n must be >= 0");
  RdCache& c = rd_cache();
  c.extend(d, n);
  std::scoped_lock lock(c.mu);
  return c.tables[d][static_cast<std::size_t>(n)];
}

std::vector<std::uint64_t> sphere_count_table(int d, std::int64_t n_max) {
  check_dim(d);
  if (n_max < 0) throw std::invalid_argument("sphere_count_table: n_max must be >= 0");
  RdCache& c = rd_cache();
  c.extend(d, n_max);
  std::scoped_lock lock(c.mu);
  return std::vector<std::uint64_t>(c.tables[d].begin(),
                                    c.tables[d].begin() + n_max + 1);
}

namespace {

void enumerate_sphere(int d, std::int64_t remaining, std::int32_t* coords, int j,
                      PointList& out) {
  if (j == d - 1) {
    std::int64_t r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(remaining))));
    while (r * r > remaining) --r;
    while ((r + 1) * (r + 1) <= remaining) ++r;
    if (r * r != remaining) return;
    if (r == 0) {
      coords[j] = 0;
      out.push(coords);
      return;
    }
    coords[j] = static_cast<std::int32_t>(-r);
    out.push(coords);
    coords[j] = static_cast<std::int32_t>(r);
    out.push(coords);
    return;
  }
  // Any later coordinate is at most sqrt(remaining) in absolute value.
  std::int64_t r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(remaining))));
  while (r * r > remaining) --r;
  while ((r + 1) * (r + 1) <= remaining) ++r;
  for (std::int64_t v = -r; v <= r; ++v) {
    coords[j] = static_cast<std::int32_t>(v);
    enumerate_sphere(d, remaining - v * v, coords, j + 1, out);
  }
}

}  // namespace

PointList sphere_points(int d, std::int64_t n) {
  check_dim(d);
  if (n < 0) throw std::invalid_argument("sphere_points: n must be >= 0");
  PointList out;
  out.d = d;
  std::int32_t coords[8] = {0};
  enumerate_sphere(d, n, coords, 0, out);
  return out;
}

void serialize(const LatticeFunction<double>& f, std::ostream& os) {
  os << "d=" << f.dim() << "\n";
  // Deterministic order for byte-stable artifacts.
  std::vector<const Point*> keys;
  keys.reserve(f.support_size());
  for (const auto& [p, v] : f.entries()) keys.push_back(&p);
  std::sort(keys.begin(), keys.end(),
            [](const Point* a, const Point* b) { return *a < *b; });
  os.precision(17);
  for (const Point* p : keys) {
    for (std::int32_t c : *p) os << c << ' ';
    os << f.at(*p) << "\n";
  }
}

void serialize(const LatticeFunction<BigRational>& f, std::ostream& os) {
  os << "d=" << f.dim() << "\n";
  std::vector<const Point*> keys;
  keys.reserve(f.support_size());
  for (const auto& [p, v] : f.entries()) keys.push_back(&p);
  std::sort(keys.begin(), keys.end(),
            [](const Point* a, const Point* b) { return *a < *b; });
  for (const Point* p : keys) {
    for (std::int32_t c : *p) os << c << ' ';
    os << f.at(*p) << "\n";
  }
}

LatticeFunction<double> deserialize(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("d=", 0) != 0)
    throw std::invalid_argument("deserialize: missing d= header");
  int d = std::stoi(header.substr(2));
  LatticeFunction<double> f(d);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Point p(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) ls >> p[j];
    double v = 0;
    ls >> v;
    if (!ls) throw std::invalid_argument("deserialize: malformed line: " + line);
    f.add(p, v);
  }
  return f;
}

namespace {

template <class T>
T reciprocal_count(std::uint64_t r);

template <>
double reciprocal_count<double>(std::uint64_t r) {
  return 1.0 / static_cast<double>(r);
}
template <>
BigRational reciprocal_count<BigRational>(std::uint64_t r) {
  return BigRational(1, r);
}

}  // namespace

template <class T>
LatticeFunction<T> spherical_average(const LatticeFunction<T>& f, std::int64_t n) {
  std::uint64_t r = sphere_count(f.dim(), n);
  if (r == 0) throw EmptySphereError("spherical_average: r_d(n) = 0");
  PointList sphere = sphere_points(f.dim(), n);
  T w = reciprocal_count<T>(r);
  LatticeFunction<T> out(f.dim());
  // The kernel is even, so scattering from each support point is the same as
  // gathering at each output point.
  Point x(static_cast<std::size_t>(f.dim()));
  for (const auto& [p, v] : f.entries()) {
    T pv = v * w;
    for (std::size_t i = 0; i < sphere.size(); ++i) {
      const std::int32_t* y = sphere[i];
      for (int j = 0; j < f.dim(); ++j) x[static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(j)] + y[j];
      out.add(x, pv);
    }
  }
  return out;
}

template <class T>
LatticeFunction<T> dyadic_maximal(const LatticeFunction<T>& f, std::int64_t Lambda) {
  if (Lambda < 1) throw std::invalid_argument("dyadic_maximal: Lambda must be >= 1");
  LatticeFunction<T> out(f.dim());
  for (std::int64_t n = Lambda * Lambda; n < 4 * Lambda * Lambda; ++n) {
    if (sphere_count(f.dim(), n) == 0) continue;
    LatticeFunction<T> avg = spherical_average(f, n);
    for (const auto& [p, v] : avg.entries()) {
      T a = v < T(0) ? -v : v;
      if (a > out.at(p)) out.set(p, a);
    }
  }
  return out;
}

template <class T>
FullMaximal<T> full_maximal(const LatticeFunction<T>& f, std::int64_t n_max) {
  if (n_max < 1) throw std::invalid_argument("full_maximal: n_max must be >= 1");
  FullMaximal<T> result{LatticeFunction<T>(f.dim()), 0.0, false};
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (sphere_count(f.dim(), n) == 0) continue;
    LatticeFunction<T> avg = spherical_average(f, n);
    for (const auto& [p, v] : avg.entries()) {
      T a = v < T(0) ? -v : v;
      if (a > result.sup.at(p)) result.sup.set(p, a);
    }
  }
  // Tail: no average beyond the truncation exceeds ||f||_1 / r_d(n), and
  // counts on (n_max, 2 n_max] witness the least normalization nearby.
  std::vector<std::uint64_t> table = sphere_count_table(f.dim(), 2 * n_max);
  std::uint64_t r_min = 0;
  for (std::int64_t n = n_max + 1; n <= 2 * n_max; ++n) {
    std::uint64_t r = table[static_cast<std::size_t>(n)];
    if (r == 0) continue;
    if (r_min == 0 || r < r_min) r_min = r;
  }
  double l1 = static_cast<double>(f.l1_norm());
  result.tail_bound =
      r_min == 0 ? std::numeric_limits<double>::infinity() : l1 / static_cast<double>(r_min);
  result.certified = result.tail_bound < static_cast<double>(result.sup.linf_norm());
  return result;
}

template LatticeFunction<double> spherical_average(const LatticeFunction<double>&, std::int64_t);
template LatticeFunction<BigRational> spherical_average(const LatticeFunction<BigRational>&, std::int64_t);
template LatticeFunction<double> dyadic_maximal(const LatticeFunction<double>&, std::int64_t);
template LatticeFunction<BigRational> dyadic_maximal(const LatticeFunction<BigRational>&, std::int64_t);
template FullMaximal<double> full_maximal(const LatticeFunction<double>&, std::int64_t);
template FullMaximal<BigRational> full_maximal(const LatticeFunction<BigRational>&, std::int64_t);

double indicator_dyadic_max_at(const PointSet& E, std::int64_t Lambda,
                               const std::int32_t* x,
                               std::span<const std::uint64_t> rd_table) {
  const std::int64_t lo = Lambda * Lambda, hi = 4 * Lambda * Lambda;  // [lo, hi)
  const int d = E.d;
  const std::size_t m = E.size();
  // Counts per radius in the dyadic window.
  static thread_local std::vector<std::uint32_t> counts;
  counts.assign(static_cast<std::size_t>(hi - lo), 0);
  const std::int32_t* z = E.flat.data();
  for (std::size_t i = 0; i < m; ++i, z += d) {
    std::int64_t dist = 0;
    for (int j = 0; j < d; ++j) {
      std::int64_t t = static_cast<std::int64_t>(x[j]) - z[j];
      dist += t * t;
    }
    if (dist >= lo && dist < hi) ++counts[static_cast<std::size_t>(dist - lo)];
  }
  double best = 0.0;
  for (std::int64_t n = lo; n < hi; ++n) {
    std::uint32_t c = counts[static_cast<std::size_t>(n - lo)];
    if (c == 0) continue;
    double v = static_cast<double>(c) / static_cast<double>(rd_table[static_cast<std::size_t>(n)]);
    if (v > best) best = v;
  }
  return best;
}

double indicator_full_max_at(const PointSet& E, std::int64_t n_max,
                             const std::int32_t* x,
                             std::span<const std::uint64_t> rd_table) {
  const int d = E.d;
  const std::size_t m = E.size();
  // Realized distances are few (at most |E|), so bucket them in a small map
  // laid out as sorted pairs.
  static thread_local std::vector<std::int64_t> dists;
  dists.clear();
  const std::int32_t* z = E.flat.data();
  for (std::size_t i = 0; i < m; ++i, z += d) {
    std::int64_t dist = 0;
    for (int j = 0; j < d; ++j) {
      std::int64_t t = static_cast<std::int64_t>(x[j]) - z[j];
      dist += t * t;
    }
    if (dist >= 1 && dist <= n_max) dists.push_back(dist);
  }
  if (dists.empty()) return 0.0;
  std::sort(dists.begin(), dists.end());
  double best = 0.0;
  for (std::size_t i = 0; i < dists.size();) {
    std::size_t j = i;
    while (j < dists.size() && dists[j] == dists[i]) ++j;
    double v = static_cast<double>(j - i) /
               static_cast<double>(rd_table[static_cast<std::size_t>(dists[i])]);
    if (v > best) best = v;
    i = j;
  }
  return best;
}

}  // namespace spherelab::lattice
