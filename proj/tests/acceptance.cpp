// Acceptance run: one PASS/FAIL line per criterion.  Optional arguments
// select criteria by number.  Exit status is 0 iff every selected
// criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hc/cli.hpp"
#include "hc/coupling.hpp"
#include "hc/diagnostics.hpp"
#include "hc/field.hpp"
#include "hc/harness.hpp"
#include "hc/parallel.hpp"
#include "hc/scaling.hpp"

using namespace hc;

namespace {

// Pinned tolerances.
constexpr double kRoundTripRel = 1e-9;
constexpr double kDecompositionRel = 1e-8;
constexpr double kCovarianceSe = 4.0;
constexpr double kScalingSe = 2.0;
constexpr double kExponentLo = 1.0;
constexpr double kExponentHi = 2.3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Conservation and additivity of the count hierarchy.
Outcome c1_conservation() {
  constexpr int kPairs = 1000;
  std::vector<std::int64_t> ns(kPairs);
  std::vector<std::uint64_t> seeds(kPairs);
  Rng rng = make_rng(20240101);
  // log-uniform n, so every depth 0..12 is equally represented
  std::uniform_real_distribution<double> log_n(0.0, std::log(4096.0));
  for (int p = 0; p < kPairs; ++p) {
    ns[p] = std::clamp<std::int64_t>(std::llround(std::exp(log_n(rng))), 1, 4096);
    seeds[p] = rng();
  }
  std::vector<std::string> failure(kPairs);
  std::vector<char> retained(kPairs, 0);
  parallel_for(kPairs, [&](std::size_t p) {
    const GridSpec spec = make_grid(ns[p]);
    const bool keep = spec.N <= kMaxRetainDepth;
    retained[p] = keep;
    Rng hr = make_rng(seeds[p]);
    GaussianHierarchy h = sample_hierarchy(spec, hr);
    const Chain<Count> horiz = run_c1(h, spec);
    const Chain<Count> vert = run_c2(h, spec);
    const CoupledRealization r = couple_hierarchy(spec, std::move(h), seeds[p], {.retain = keep});
    auto fail = [&](const std::string& what) {
      if (failure[p].empty()) failure[p] = "n=" + std::to_string(ns[p]) + ": " + what;
    };
    if (r.m_field.cast<std::int64_t>().sum() != ns[p]) fail("sum of m_field");
    if ((r.m_field < 0).any()) fail("negative cell");

    // margins: block sums of the field against the separately run chains
    Vec<std::int64_t> cols = r.m_field.cast<std::int64_t>().colwise().sum().transpose();
    Vec<std::int64_t> rows = r.m_field.cast<std::int64_t>().rowwise().sum();
    for (int lev = 0; lev <= spec.N; ++lev) {
      if ((cols != horiz[lev].cast<std::int64_t>()).any()) fail("column margin at level " + std::to_string(lev));
      if ((rows != vert[lev].cast<std::int64_t>()).any()) fail("row margin at level " + std::to_string(lev));
      if (lev < spec.N) {
        cols = cols.reshaped(2, cols.size() / 2).colwise().sum().transpose().eval();
        rows = rows.reshaped(2, rows.size() / 2).colwise().sum().transpose().eval();
      }
    }
    if (!keep) return;
    const CountHierarchy& u = *r.counts;
    for (int i = 0; i <= spec.N; ++i)
      for (int j = 0; j <= spec.N; ++j) {
        const Grid<Count>& lev = u.level(i, j);
        if (j < spec.N) {
          const Grid<Count>& up = u.level(i, j + 1);
          for (Eigen::Index l = 0; l < up.rows(); ++l)
            for (Eigen::Index k = 0; k < up.cols(); ++k)
              if (lev(l, 2 * k) + lev(l, 2 * k + 1) != up(l, k)) fail("horizontal additivity");
        }
        if (i < spec.N) {
          const Grid<Count>& up = u.level(i + 1, j);
          for (Eigen::Index l = 0; l < up.rows(); ++l)
            for (Eigen::Index k = 0; k < up.cols(); ++k)
              if (lev(2 * l, k) + lev(2 * l + 1, k) != up(l, k)) fail("vertical additivity");
        }
      }
  });
  int bad = 0, full = 0;
  std::string first;
  for (int p = 0; p < kPairs; ++p) {
    full += retained[p];
    if (!failure[p].empty()) {
      if (!bad) first = failure[p];
      ++bad;
    }
  }
  return {bad == 0, std::to_string(kPairs) + " pairs, " + std::to_string(full) +
                        " with the full hierarchy retained, failures=" + std::to_string(bad) +
                        (bad ? " (first: " + first + ")" : "")};
}

// V -> Z -> V round trip.
Outcome c2_round_trip() {
  double worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    const int depth = seed % 9;
    const GridSpec g = make_grid((std::int64_t{1} << depth) - (depth > 2 ? seed % 3 : 0));
    Rng rng = make_rng(derive_seed(77, static_cast<std::uint64_t>(seed)));
    const GaussianHierarchy h = sample_hierarchy(g, rng);
    const GaussianHierarchy back = derive_v(reconstruct_z_hierarchy(h, g), g);
    auto rel = [&](double x, double y) { worst = std::max(worst, std::fabs(x - y) / std::max(1.0, std::fabs(y))); };
    rel(back.root, h.root);
    for (int t = 0; t < g.N; ++t) {
      for (Eigen::Index k = 0; k < h.row_v[t].size(); ++k) rel(back.row_v[t](k), h.row_v[t](k));
      for (Eigen::Index k = 0; k < h.col_v[t].size(); ++k) rel(back.col_v[t](k), h.col_v[t](k));
      for (int s = 0; s < g.N; ++s)
        for (Eigen::Index l = 0; l < h.interior[t][s].rows(); ++l)
          for (Eigen::Index k = 0; k < h.interior[t][s].cols(); ++k) rel(back.interior[t][s](l, k), h.interior[t][s](l, k));
    }
  }
  return {worst <= kRoundTripRel, "100 seeds, N <= 8, worst relative error " + fmt("%.3g", worst)};
}

// The regime parameters where they exist, every A* = B* level pair, and
// one asymmetric configuration.
std::vector<ScaleParams> decomposition_configs(const GridSpec& spec) {
  std::vector<ScaleParams> out;
  if (spec.n >= 1024) out.push_back(make_scale_params(spec, 1.0, 1.0, 1.0, 10.0));
  for (int s = 0; s <= spec.N - 2; ++s)
    out.push_back(scale_params_from_levels(spec, spec.N, spec.N, s, s));
  out.push_back(scale_params_from_levels(spec, spec.N - 1, spec.N, spec.N - 4, spec.N - 3));
  return out;
}

// T(u, v) plus boundary terms reproduces the corner error.
Outcome c3_decomposition() {
  struct Job {
    std::int64_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::int64_t n : {64, 256, 1024})
    for (std::uint64_t s = 0; s < 20; ++s) jobs.push_back({n, derive_seed(303, s)});
  std::vector<double> worst(jobs.size(), 0.0);
  std::vector<std::int64_t> pairs(jobs.size(), 0);
  parallel_for(jobs.size(), [&](std::size_t q) {
    const GridSpec spec = make_grid(jobs[q].n);
    const CoupledRealization r = couple(spec, jobs[q].seed, {.retain = true});
    const ErrorSurface surf = error_surface(r);
    for (const ScaleParams& p : decomposition_configs(spec))
      for (std::int64_t u = 1; u <= (std::int64_t{1} << (p.A - p.Astar)); ++u)
        for (std::int64_t v = 1; v <= (std::int64_t{1} << (p.B - p.Bstar)); ++v) {
          const DecompositionReport d = decompose_error(r, p, u, v, surf);
          worst[q] = std::max(worst[q], std::fabs(d.residual) / (1.0 + std::fabs(d.direct_error)));
          ++pairs[q];
        }
  });
  const double w = *std::max_element(worst.begin(), worst.end());
  std::int64_t total = 0;
  for (std::int64_t c : pairs) total += c;
  return {w <= kDecompositionRel, std::to_string(total) + " (u,v) evaluations over n in {64,256,1024} x 20 seeds, "
                                      "worst |residual|/(1+|direct|) " + fmt("%.3g", w)};
}

std::string scan_detail(const ScanResult& r) {
  std::string s = "checked=" + std::to_string(r.checked) + " skipped=" + std::to_string(r.skipped) +
                  " violations=" + std::to_string(r.violation_count);
  if (!r.violations.empty()) s += " (first: " + r.violations.front().where + ")";
  return s;
}

Outcome c4_tusnady() {
  const ScanResult r = scan_tusnady(512);
  const ScanResult self = scan_tusnady(512, {.constant = 0.1});
  return {r.passed() && !self.passed(),
          scan_detail(r) + "; self-test violations=" + std::to_string(self.violation_count)};
}

Outcome c5_hypergeometric() {
  const ScanResult r = scan_hypergeometric_lemma(200);
  return {r.passed(), scan_detail(r) + " worst_gap=" + fmt("%.4g", r.metric_or("worst_gap", NAN))};
}

Outcome c6_bennett() {
  const ScanResult r = check_bennett(100);
  return {r.passed(), scan_detail(r)};
}

Outcome c7_bineg() {
  const ScanResult r = check_bineg_moments(12, 4);
  return {r.passed(), scan_detail(r)};
}

Outcome c8_dlp() {
  const ScanResult r = check_dlp_inequality({});
  return {r.passed(), "R=100000, 4x4 grid, " + scan_detail(r) + ", freq at (16,64)=" +
                          fmt("%.4g", r.metric_or("freq x=16 y=64", NAN))};
}

Outcome c9_multinomial() {
  std::string detail;
  bool ok = true;
  for (std::int64_t n : {255, 256}) {
    const ScanResult r = test_multinomial({.n = n, .reps = 200});
    ok = ok && r.passed();
    detail += "n=" + std::to_string(n) + " KS p=" + fmt("%.3g", r.metric_or("ks_pvalue", NAN)) + "; ";
  }
  return {ok, detail + "level 0.01, R=200"};
}

// Covariance of the bridge at corner pairs against (t^t')(s^s') - tt'ss'.
Outcome c10_bridge_covariance() {
  constexpr int kReps = 20000;
  const GridSpec g = make_grid(1024);
  const int finest = g.N - 3;  // corners in steps of 1/8
  struct Pair {
    int k1, l1, k2, l2;  // t = k/8, s = l/8
  };
  const std::vector<Pair> pairs{{2, 4, 4, 4}, {1, 1, 7, 7}, {4, 4, 4, 4}, {3, 5, 6, 2}, {8, 4, 4, 8}, {7, 1, 1, 7}};
  std::vector<std::vector<double>> prod(pairs.size(), std::vector<double>(kReps));
  parallel_for(kReps, [&](std::size_t r) {
    Rng rng = make_rng(derive_seed(1010, r));
    const Grid<double> b = bridge_at_corners(reconstruct_z(sample_hierarchy(g, rng, finest), g), g);
    for (std::size_t p = 0; p < pairs.size(); ++p)
      prod[p][r] = b(pairs[p].l1, pairs[p].k1) * b(pairs[p].l2, pairs[p].k2);
  });
  bool ok = true;
  double worst = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Pair& q = pairs[p];
    const double t1 = q.k1 / 8.0, s1 = q.l1 / 8.0, t2 = q.k2 / 8.0, s2 = q.l2 / 8.0;
    const double truth = static_cast<double>(g.n) * (std::min(t1, t2) * std::min(s1, s2) - t1 * t2 * s1 * s2);
    double mean = 0.0, sq = 0.0;
    for (double x : prod[p]) {
      mean += x;
      sq += x * x;
    }
    mean /= kReps;
    const double se = std::sqrt((sq / kReps - mean * mean) / kReps);
    const double z = std::fabs(mean - truth) / se;
    worst = std::max(worst, z);
    ok = ok && z <= kCovarianceSe;
  }
  return {ok, "R=20000, n=1024, 6 corner pairs, worst |z| " + fmt("%.2f", worst)};
}

Outcome c11_scaling() {
  const std::vector<ScalingRow> rows = run_scaling({});
  bool ok = true;
  std::string detail;
  for (std::size_t li = 0; li < rows.front().levels.size(); ++li) {
    const ScalingVerdict v = scaling_properties(rows, li, kScalingSe, kExponentLo, kExponentHi);
    ok = ok && v.holds();
    detail += "q" + fmt("%g", v.level) + ": p=" + fmt("%.3f", v.fit.p) + "+-" + fmt("%.3f", v.fit.p_se) +
              " nondecreasing=" + (v.nondecreasing ? "yes" : "no") + " ratio2_nonincreasing=" +
              (v.ratio2_nonincreasing ? "yes" : "no") + "; ";
  }
  for (const ScalingRow& r : rows) detail += "median(" + std::to_string(r.n) + ")=" + fmt("%.3f", r.quantiles[0].value) + " ";
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Runs a fixed command set and returns every non-manifest artifact.
std::string artifacts_with_threads(const char* threads, const std::filesystem::path& dir) {
  setenv("HC_THREADS", threads, 1);
  std::filesystem::remove_all(dir);
  const std::vector<std::vector<std::string>> cmds{
      {"couple", "--n", "1000", "--seed", "7", "--out", dir.string()},
      {"scan", "dlp", "--reps", "20000", "--seed", "4", "--out", dir.string()},
      {"scan", "maximal", "--reps", "1000", "--out", dir.string()},
      {"scan", "multinomial", "--n", "255", "--out", dir.string()},
      {"scan", "hypergeom", "--max", "120", "--out", dir.string()},
      {"scaling", "--n", "64", "256", "--reps", "40", "--out", dir.string()}};
  std::string all;
  for (const auto& c : cmds) {
    std::vector<std::string> args{"hcouple"};
    args.insert(args.end(), c.begin(), c.end());
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    all += std::to_string(run_cli(static_cast<int>(argv.size()), argv.data(), out, err)) + "\n" + out.str();
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().filename().string().rfind("manifest_", 0) != 0) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) all += f.filename().string() + "\n" + slurp(f);
  return all;
}

Outcome c12_determinism() {
  const auto base = std::filesystem::temp_directory_path() / "hc_acceptance_determinism";
  const char* saved = std::getenv("HC_THREADS");
  const std::string keep = saved ? saved : "";
  const std::string one = artifacts_with_threads("1", base / "t1");
  const std::string four = artifacts_with_threads("4", base / "t4");
  const std::string seven = artifacts_with_threads("7", base / "t7");
  if (saved)
    setenv("HC_THREADS", keep.c_str(), 1);
  else
    unsetenv("HC_THREADS");
  std::filesystem::remove_all(base);
  return {one == four && one == seven,
          "HC_THREADS in {1,4,7}: " + std::to_string(one.size()) + " bytes of output and artifacts compared"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact conservation and additivity", c1_conservation},
      {"Gaussian hierarchy round trip", c2_round_trip},
      {"decomposition identity", c3_decomposition},
      {"Tusnady-type bound scan", c4_tusnady},
      {"hypergeometric coupling scan", c5_hypergeometric},
      {"binomial tail (Bennett) bound", c6_bennett},
      {"even moment bound by enumeration", c7_bineg},
      {"martingale tail inequality, Monte Carlo", c8_dlp},
      {"multinomial law of the field", c9_multinomial},
      {"bridge covariance", c10_bridge_covariance},
      {"scaling of the sup error", c11_scaling},
      {"determinism across thread counts", c12_determinism}};
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[c].first << ": " << o.detail << " ("
              << fmt("%.1f", secs) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
