// Batch experiment driver: one subcommand per laboratory, structured JSON/CSV
// output, seeded and budgeted.  Exit codes: 0 ok, 1 invariant or check
// failure, 2 configuration error, 3 budget exceeded.

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spherelab/arith.hpp"
#include "spherelab/errors.hpp"
#include "spherelab/farey.hpp"
#include "spherelab/lattice.hpp"
#include "spherelab/maximal.hpp"
#include "spherelab/moments.hpp"
#include "spherelab/numerics.hpp"
#include "spherelab/parallel.hpp"
#include "spherelab/regions.hpp"
#include "spherelab/sparse.hpp"
#include "spherelab/symbols.hpp"

namespace {

using nlohmann::json;
using namespace spherelab;

struct Output {
  std::string path;     // empty = stdout
  std::string format;   // json | csv | text

  void emit(const json& record) const {
    std::ostringstream body;
    if (format == "json") {
      body << record.dump(2) << "\n";
    } else if (format == "csv") {
      // Flat records only: one header line from the keys, one value line.
      std::string header, values;
      for (auto it = record.begin(); it != record.end(); ++it) {
        if (!header.empty()) {
          header += ",";
          values += ",";
        }
        header += it.key();
        values += it.value().is_string() ? it.value().get<std::string>()
                                         : it.value().dump();
      }
      body << header << "\n" << values << "\n";
    } else {
      for (auto it = record.begin(); it != record.end(); ++it)
        body << it.key() << " = " << it.value().dump() << "\n";
    }
    if (path.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream os(path);
      os << body.str();
    }
  }
};

BigRational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return BigRational(BigInt(s));
  return BigRational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

std::vector<std::uint64_t> dyadic_list(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = lo; q <= hi; q *= 2) out.push_back(q);
  return out;
}

int run_ramanujan_moment(int k, std::uint64_t q_max, std::int64_t N, const Output& out) {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::uint64_t> qs = dyadic_list(2, q_max);
  moments::SlopeFit fit = moments::moment_slope(k, qs, N, 0.2);
  json rec{{"schema", 1},
           {"op", "ramanujan-moment"},
           {"params", {{"k", k}, {"q_max", q_max}, {"N", N}}},
           {"slope", fit.slope},
           {"r2", fit.r2},
           {"measured_a_delta_0.2", fit.measured_a},
           {"moments", fit.ys},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return 0;
}

int run_lcm_sum(int k, std::uint64_t q_max, const Output& out) {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::uint64_t> qs = dyadic_list(2, q_max);
  moments::SlopeFit fit = moments::lcm_sum_slope(k, qs, 0.2);
  json rec{{"schema", 1},
           {"op", "lcm-sum"},
           {"params", {{"k", k}, {"q_max", q_max}}},
           {"slope", fit.slope},
           {"r2", fit.r2},
           {"measured_a_delta_0.2", fit.measured_a},
           {"values", fit.ys},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return 0;
}

int run_kloosterman_scan(std::uint64_t q_max, const Output& out) {
  auto start = std::chrono::steady_clock::now();
  moments::SlopeFit fit = moments::kloosterman_slope(q_max);
  json rec{{"schema", 1},
           {"op", "kloosterman-scan"},
           {"params", {{"q_max", q_max}}},
           {"slope", fit.slope},
           {"r2", fit.r2},
           {"normalized_max", fit.ys},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return fit.slope <= 0.25 ? 0 : 1;
}

int run_gauss_scan(std::uint64_t q_max, int d_max, int samples, std::uint64_t seed,
                   const Output& out) {
  auto start = std::chrono::steady_clock::now();
  SplitMix64 rng(seed);
  double worst = 0.0;
  json argmax;
  for (std::uint64_t q = 1; q <= q_max; ++q) {
    for (std::uint64_t a = q == 1 ? 0 : 1; a < std::max<std::uint64_t>(q, 1); ++a) {
      if (q > 1 && std::gcd(a, q) != 1) continue;
      std::vector<double> mag(q);
      std::vector<Complex> row = arith::gauss_sum_1d_row(static_cast<std::int64_t>(a), q);
      for (std::uint64_t l = 0; l < q; ++l) mag[l] = std::abs(row[l]);
      for (int d = 1; d <= d_max; ++d) {
        for (int s = 0; s < samples; ++s) {
          double prod = 1.0;
          for (int j = 0; j < d; ++j) prod *= mag[rng.next_below(q)];
          double scaled = std::pow(static_cast<double>(q), d / 2.0) * prod;
          if (scaled > worst) {
            worst = scaled;
            argmax = json{{"q", q}, {"a", a}, {"d", d}};
          }
        }
      }
      if (q == 1) break;
    }
  }
  json rec{{"schema", 1},
           {"op", "gauss-scan"},
           {"params", {{"q_max", q_max}, {"d_max", d_max}, {"samples", samples}, {"seed", seed}}},
           {"max_scaled", worst},
           {"bound", std::pow(2.0, d_max / 2.0)},
           {"argmax", argmax},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return worst <= std::pow(2.0, d_max / 2.0) + 1e-9 ? 0 : 1;
}

int run_farey_check(std::uint64_t lambda_max, int random_taus, std::uint64_t seed,
                    const Output& out) {
  auto start = std::chrono::steady_clock::now();
  std::uint64_t violations = 0;
  std::uint64_t checks = 0;
  std::atomic<std::uint64_t> vio{0}, cnt{0};
  parallel_for(1, static_cast<std::int64_t>(lambda_max) + 1, [&](std::int64_t L) {
    std::uint64_t level = static_cast<std::uint64_t>(L);
    SplitMix64 rng(seed ^ (level * 0x9e37u));
    std::vector<farey::Fraction> seq = farey::farey_sequence(level);
    std::vector<farey::Rat> taus;
    for (const farey::Fraction& fr : seq) {
      farey::Interval iv = farey::farey_interval(fr.num, fr.den, level);
      for (farey::Rat end : {iv.left, iv.right}) {
        taus.push_back(end);
        taus.push_back(farey::rat_add(end, farey::make_rat(1, 4 * level * level + 7)));
        taus.push_back(farey::rat_sub(end, farey::make_rat(1, 4 * level * level + 7)));
      }
    }
    for (int i = 0; i < random_taus; ++i) {
      std::int64_t den = 1 + static_cast<std::int64_t>(rng.next_below(1u << 20));
      std::int64_t num = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(den)));
      taus.push_back(farey::make_rat(num, den));
    }
    for (const farey::Rat& tau : taus) {
      for (std::uint64_t q = 1; q <= level; ++q) {
        ++cnt;
        try {
          (void)farey::inverse_range(tau, q, level);
        } catch (const PropositionViolationError&) {
          ++vio;
        }
      }
    }
  });
  violations = vio.load();
  checks = cnt.load();
  json rec{{"schema", 1},
           {"op", "farey-check"},
           {"params", {{"lambda_max", lambda_max}, {"random_taus", random_taus}, {"seed", seed}}},
           {"checks", checks},
           {"violations", violations},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return violations == 0 ? 0 : 1;
}

int run_rd_table(int d, std::int64_t n_max, const Output& out) {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::uint64_t> table = lattice::sphere_count_table(d, n_max);
  json rec{{"schema", 1},
           {"op", "rd-table"},
           {"params", {{"d", d}, {"n_max", n_max}}},
           {"r", table},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return 0;
}

int run_maxop_ratio(int d, const std::string& family, std::int64_t Lambda,
                    const std::string& inv_p, const std::string& inv_r,
                    std::uint64_t seed, const Output& out) {
  auto start = std::chrono::steady_clock::now();
  maximal::Family f = maximal::parse_family(family);
  lattice::PointSet E = maximal::make_family(f, d, Lambda, seed);
  maximal::NormEstimate est = maximal::restricted_ratio(
      E, parse_rational(inv_p), parse_rational(inv_r), Lambda,
      f != maximal::Family::RandomDensity);
  json rec{{"schema", 1},
           {"op", "maxop-ratio"},
           {"family", family},
           {"d", d},
           {"p_inv", inv_p},
           {"r_inv", inv_r},
           {"Lambda", Lambda},
           {"set_size", est.set_size},
           {"norm", est.norm},
           {"ratio", est.ratio},
           {"witness", est.witness},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return 0;
}

int run_maxop_scaling(int d, const std::string& family, std::int64_t lambda_max,
                      const std::string& inv_p, const std::string& inv_r,
                      std::uint64_t seed, const Output& out) {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::int64_t> lambdas;
  for (std::int64_t L = 1; L <= lambda_max; L *= 2) lambdas.push_back(L);
  maximal::ScalingFit fit =
      maximal::scaling_fit(maximal::parse_family(family), parse_rational(inv_p),
                           parse_rational(inv_r), d, lambdas, seed);
  json rows = json::array();
  for (const maximal::ScalingRow& row : fit.rows)
    rows.push_back({{"Lambda", row.Lambda}, {"ratio", row.ratio}});
  json rec{{"schema", 1},
           {"op", "maxop-scaling"},
           {"family", family},
           {"d", d},
           {"p_inv", inv_p},
           {"r_inv", inv_r},
           {"slope", fit.slope},
           {"r2", fit.r2},
           {"theoretical", fit.theoretical},
           {"excess", fit.excess},
           {"rows", rows},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return 0;
}

int run_symbol_compare(int d, std::int64_t n, std::int64_t Lambda, int resolution,
                       const Output& out) {
  auto start = std::chrono::steady_clock::now();
  symbols::SymbolContext ctx = symbols::make_context(d, n, Lambda);
  symbols::SupReport rep = symbols::residual_symbol_sup(ctx, resolution);
  json rec{{"schema", 1},
           {"op", "symbol-compare"},
           {"params", {{"d", d}, {"n", n}, {"Lambda", Lambda}, {"resolution", resolution}}},
           {"residual_sup", rep.sup},
           {"argmax", rep.argmax},
           {"points", rep.points},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return 0;
}

int run_kernel_check(int d, std::int64_t n, std::int64_t Lambda, std::uint64_t Q, int N,
                     int spots, std::uint64_t seed, const Output& out) {
  auto start = std::chrono::steady_clock::now();
  symbols::SymbolContext ctx = symbols::make_context(d, n, Lambda);
  symbols::Grid grid = symbols::block_kernel_spectral(Q, ctx, N);
  SplitMix64 rng(seed);
  json points = json::array();
  double worst = 0.0;
  int converged = 0;
  for (int s = 0; s < spots; ++s) {
    std::vector<std::int32_t> x(static_cast<std::size_t>(d));
    std::vector<int> coord(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      int c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N / 2))) - N / 4;
      x[static_cast<std::size_t>(j)] = c;
      coord[static_cast<std::size_t>(j)] = c;
    }
    symbols::QmcOptions opt;
    opt.rel_tol = 1e-3;
    opt.abs_tol = 1e-8;
    opt.seed = seed + static_cast<std::uint64_t>(s);
    try {
      symbols::KernelEstimate direct = symbols::block_kernel_direct(Q, ctx, x, opt);
      double spectral = grid.values[grid.index(coord)];
      double diff = std::fabs(direct.value - spectral);
      worst = std::max(worst, diff - 4.0 * direct.std_error);
      ++converged;
      points.push_back({{"x", x},
                        {"direct", direct.value},
                        {"std_error", direct.std_error},
                        {"spectral", spectral},
                        {"diff", diff}});
    } catch (const QuadratureNotConvergedError&) {
      points.push_back({{"x", x}, {"converged", false}});
    }
  }
  json rec{{"schema", 1},
           {"op", "kernel-check"},
           {"params",
            {{"d", d}, {"n", n}, {"Lambda", Lambda}, {"Q", Q}, {"N", N}, {"spots", spots}}},
           {"max_excess_disagreement", worst},
           {"converged", converged},
           {"points", points},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return 0;
}

int run_regions_emit(int d, const std::string& which, const Output& out) {
  auto start = std::chrono::steady_clock::now();
  std::vector<regions::Name> names;
  if (which == "all") {
    names = {regions::Name::T,     regions::Name::Tstar, regions::Name::Qstar,
             regions::Name::Rstar, regions::Name::Sstar, regions::Name::R,
             regions::Name::S};
  } else {
    names = {regions::parse_name(which)};
  }
  json table = json::object();
  std::ostringstream polygons;
  for (regions::Name name : names) {
    regions::ConvexRegion reg = regions::region_vertices(name, d);
    json verts = json::array();
    polygons << "# " << regions::name_string(name) << "(" << d << ")\n";
    for (const regions::ExponentPoint& v : reg.vertices) {
      std::ostringstream vx, vy;
      vx << v.inv_p;
      vy << v.inv_r;
      verts.push_back({vx.str(), vy.str()});
      polygons << vx.str() << " " << vy.str() << "\n";
    }
    table[regions::name_string(name)] = verts;
  }
  json rec{{"schema", 1},
           {"op", "regions-emit"},
           {"params", {{"d", d}, {"region", which}}},
           {"vertices", table},
           {"polygons", polygons.str()},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return 0;
}

int run_sparse_verify(int d, int pairs, int points, std::int64_t box,
                      const std::string& inv_p, const std::string& inv_r,
                      std::int64_t lambda_sq_max, std::uint64_t seed, const Output& out) {
  auto start = std::chrono::steady_clock::now();
  BigRational ip = parse_rational(inv_p), ir = parse_rational(inv_r);
  json rows = json::array();
  bool all_ok = true;
  for (int pair = 0; pair < pairs; ++pair) {
    SplitMix64 rng(seed + static_cast<std::uint64_t>(pair));
    auto sample = [&](int count) {
      lattice::PointSet e;
      e.d = d;
      for (int i = 0; i < count; ++i) {
        std::int32_t buf[8];
        for (int j = 0; j < d; ++j)
          buf[j] = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(box)));
        e.push(std::span<const std::int32_t>(buf, static_cast<std::size_t>(d)));
      }
      return e;
    };
    lattice::PointSet e1 = sample(points), e2 = sample(points);
    sparse::DominationReport rep =
        sparse::domination_constant(e1, e2, ip, ir, lambda_sq_max);
    sparse::Decomposition dec = sparse::stopping_decomposition(
        e1, e2, 1.0 / static_cast<double>(ip), 1.0 / static_cast<double>(ir));
    bool sparse_ok = true;
    for (const sparse::SparseCollection& bucket : dec.buckets)
      sparse_ok = sparse_ok && sparse::sparsity_check(bucket, BigRational(1, 2)).ok;
    all_ok = all_ok && sparse_ok && std::isfinite(rep.ratio);
    rows.push_back({{"pair", pair},
                    {"ratio", rep.ratio},
                    {"c0", rep.c0_final},
                    {"retries", rep.retries},
                    {"buckets", dec.buckets.size()},
                    {"nodes", dec.nodes.size()},
                    {"sparsity_ok", sparse_ok}});
  }
  json rec{{"schema", 1},
           {"op", "sparse-verify"},
           {"params",
            {{"d", d},
             {"pairs", pairs},
             {"points", points},
             {"box", box},
             {"p_inv", inv_p},
             {"r_inv", inv_r},
             {"lambda_sq_max", lambda_sq_max},
             {"seed", seed}}},
           {"rows", rows},
           {"ok", all_ok},
           {"runtime_ms", ms_since(start)}};
  out.emit(rec);
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete spherical maximal means laboratory"};
  app.require_subcommand(1);

  Output out;
  out.format = "json";
  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--output", out.path, "output file (default: stdout)");
  app.add_option("--format", out.format, "json | csv | text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--threads", threads, "worker threads (default: cores)");
  app.add_option("--seed", seed, "RNG seed for sampled sweeps");

  // ramanujan-moment
  auto* cmd_moment = app.add_subcommand("ramanujan-moment", "moment averages of Ramanujan sums");
  int mk = 2;
  std::uint64_t mq = 1024;
  std::int64_t mn = 1;
  cmd_moment->add_option("--k", mk, "moment exponent");
  cmd_moment->add_option("--q-max", mq, "largest dyadic block start");
  cmd_moment->add_option("--n-start", mn, "window start N");

  // lcm-sum
  auto* cmd_lcm = app.add_subcommand("lcm-sum", "reciprocal lcm tuple sums");
  int lk = 2;
  std::uint64_t lq = 1 << 12;
  cmd_lcm->add_option("--k", lk, "tuple length");
  cmd_lcm->add_option("--q-max", lq, "largest dyadic block start");

  // kloosterman-scan
  auto* cmd_kl = app.add_subcommand("kloosterman-scan", "restricted Kloosterman maxima over primes");
  std::uint64_t kq = 211;
  cmd_kl->add_option("--q-max", kq, "largest prime modulus");

  // gauss-scan
  auto* cmd_gauss = app.add_subcommand("gauss-scan", "normalized Gauss sum magnitude scan");
  std::uint64_t gq = 256;
  int gd = 5, gsamples = 1000;
  cmd_gauss->add_option("--q-max", gq, "largest modulus");
  cmd_gauss->add_option("--d-max", gd, "largest dimension");
  cmd_gauss->add_option("--samples", gsamples, "sampled frequency vectors per (q,d)");

  // farey-check
  auto* cmd_farey = app.add_subcommand("farey-check", "Farey inverse-range proposition sweep");
  std::uint64_t flam = 128;
  int ftaus = 1000;
  cmd_farey->add_option("--lambda-max", flam, "largest dissection level");
  cmd_farey->add_option("--random-taus", ftaus, "random circle points per level");

  // rd-table
  auto* cmd_rd = app.add_subcommand("rd-table", "sum-of-squares representation counts");
  int rdd = 5;
  std::int64_t rdn = 200;
  cmd_rd->add_option("--d", rdd, "dimension");
  cmd_rd->add_option("--n-max", rdn, "largest radius squared");

  // maxop-ratio
  auto* cmd_ratio = app.add_subcommand("maxop-ratio", "restricted norm ratio of the dyadic maximal average");
  int xd = 5;
  std::string xfam = "ball", xp = "1/2", xr = "1/2";
  std::int64_t xl = 4;
  cmd_ratio->add_option("--d", xd, "dimension");
  cmd_ratio->add_option("--family", xfam, "ball | box | sphere_shell | random_density");
  cmd_ratio->add_option("--lambda", xl, "dyadic scale");
  cmd_ratio->add_option("--inv-p", xp, "1/p as num/den");
  cmd_ratio->add_option("--inv-r", xr, "1/r as num/den");

  // maxop-scaling
  auto* cmd_scaling = app.add_subcommand("maxop-scaling", "scaling fit across dyadic levels");
  int sd = 5;
  std::string sfam = "ball", sp = "1/2", sr = "1/2";
  std::int64_t sl = 8;
  cmd_scaling->add_option("--d", sd, "dimension");
  cmd_scaling->add_option("--family", sfam, "test family");
  cmd_scaling->add_option("--lambda-max", sl, "largest dyadic scale");
  cmd_scaling->add_option("--inv-p", sp, "1/p as num/den");
  cmd_scaling->add_option("--inv-r", sr, "1/r as num/den");

  // symbol-compare
  auto* cmd_symbol = app.add_subcommand("symbol-compare", "exact vs main-term symbol residual sup");
  int yd = 3, yres = 16;
  std::int64_t yn = 25, ylam = 4;
  cmd_symbol->add_option("--d", yd, "dimension");
  cmd_symbol->add_option("--n", yn, "radius squared");
  cmd_symbol->add_option("--Lambda", ylam, "dyadic level");
  cmd_symbol->add_option("--resolution", yres, "grid points per axis");

  // kernel-check
  auto* cmd_kernel = app.add_subcommand("kernel-check", "direct vs spectral block kernel");
  int zd = 2, zN = 32, zspots = 4;
  std::int64_t zn = 25, zlam = 4;
  std::uint64_t zQ = 1;
  cmd_kernel->add_option("--d", zd, "dimension");
  cmd_kernel->add_option("--n", zn, "radius squared");
  cmd_kernel->add_option("--Lambda", zlam, "dyadic level");
  cmd_kernel->add_option("--Q", zQ, "dyadic block start");
  cmd_kernel->add_option("--N", zN, "grid points per axis");
  cmd_kernel->add_option("--spots", zspots, "comparison points");

  // regions-emit
  auto* cmd_regions = app.add_subcommand("regions-emit", "exponent region vertex tables");
  int rd2 = 6;
  std::string rwhich = "all";
  cmd_regions->add_option("--d", rd2, "dimension");
  cmd_regions->add_option("--region", rwhich, "region name or all");

  // sparse-verify
  auto* cmd_sparse = app.add_subcommand("sparse-verify", "stopping decomposition and domination check");
  int vd = 5, vpairs = 3, vpoints = 50;
  std::int64_t vbox = 32, vlam = 4096;
  std::string vp = "1/2", vr = "1/2";
  cmd_sparse->add_option("--d", vd, "dimension");
  cmd_sparse->add_option("--pairs", vpairs, "seeded (E1,E2) pairs");
  cmd_sparse->add_option("--points", vpoints, "points per set");
  cmd_sparse->add_option("--box", vbox, "sampling box side");
  cmd_sparse->add_option("--inv-p", vp, "1/p as num/den");
  cmd_sparse->add_option("--inv-r", vr, "1/r as num/den");
  cmd_sparse->add_option("--lambda-sq-max", vlam, "radius-squared truncation for the inner product");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // config errors are exit 2; --help stays 0
  }

  if (threads > 0) set_thread_count(threads);

  try {
    if (cmd_moment->parsed()) return run_ramanujan_moment(mk, mq, mn, out);
    if (cmd_lcm->parsed()) return run_lcm_sum(lk, lq, out);
    if (cmd_kl->parsed()) return run_kloosterman_scan(kq, out);
    if (cmd_gauss->parsed()) return run_gauss_scan(gq, gd, gsamples, seed, out);
    if (cmd_farey->parsed()) return run_farey_check(flam, ftaus, seed, out);
    if (cmd_rd->parsed()) return run_rd_table(rdd, rdn, out);
    if (cmd_ratio->parsed()) return run_maxop_ratio(xd, xfam, xl, xp, xr, seed, out);
    if (cmd_scaling->parsed()) return run_maxop_scaling(sd, sfam, sl, sp, sr, seed, out);
    if (cmd_symbol->parsed()) return run_symbol_compare(yd, yn, ylam, yres, out);
    if (cmd_kernel->parsed())
      return run_kernel_check(zd, zn, zlam, zQ, zN, zspots, seed, out);
    if (cmd_regions->parsed()) return run_regions_emit(rd2, rwhich, out);
    if (cmd_sparse->parsed())
      return run_sparse_verify(vd, vpairs, vpoints, vbox, vp, vr, vlam, seed, out);
  } catch (const BudgetExceededError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const GridTooLargeError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
