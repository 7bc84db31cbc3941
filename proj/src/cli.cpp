#include "hc/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <ostream>

#include "CLI11.hpp"
#include "hc/coupling.hpp"
#include "hc/diagnostics.hpp"
#include "hc/errors.hpp"
#include "hc/harness.hpp"
#include "hc/report.hpp"
#include "hc/scaling.hpp"

namespace hc {

namespace {

namespace fs = std::filesystem;

struct CoupleArgs {
  std::int64_t n = 0;
  std::uint64_t seed = 1;
  std::string out;
  bool dump = false;
  bool diagnostics = false;
  double a = 1.0;
  double b = 1.0;
  double x = 1.0;
  double c_tilde = 10.0;
  std::int64_t u = 1;
  std::int64_t v = 1;
  std::vector<int> levels;  // A, B, Astar, Bstar
};

struct ScanArgs {
  std::string name;
  std::optional<int> max;
  std::optional<std::int64_t> reps;
  std::uint64_t seed = 1;
  bool self_test = false;
  std::string out = "hc_results";
  std::int64_t n = 256;
  double a = 0.5;
  double b = 0.5;
  std::string family = "rademacher";
  int blocks = 4;
};

struct ScalingArgs {
  std::vector<std::int64_t> ns{256, 512, 1024, 2048, 4096};
  std::int64_t reps = 200;
  std::vector<double> quantiles{0.5, 0.9};
  std::uint64_t seed = 1;
  std::string out = "hc_results";
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

Json couple_config(const CoupleArgs& a) {
  Json c{{"n", a.n}, {"seed", a.seed}, {"dump", a.dump}, {"diagnostics", a.diagnostics}};
  if (a.diagnostics) {
    c["a"] = a.a;
    c["b"] = a.b;
    c["x"] = a.x;
    c["ctilde"] = a.c_tilde;
    c["u"] = a.u;
    c["v"] = a.v;
    if (!a.levels.empty()) c["levels"] = a.levels;
  }
  return c;
}

int cmd_couple(const CoupleArgs& a, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  const GridSpec spec = make_grid(a.n);
  if (a.dump && a.out.empty()) throw ConfigError("--dump needs --out");
  const CoupledRealization r = couple(spec, a.seed, {.retain = a.diagnostics});
  const ErrorSummary s = error_summary(r);
  const double side = static_cast<double>(spec.side());

  Json j;
  j["n"] = spec.n;
  j["N"] = spec.N;
  j["seed"] = a.seed;
  j["sup_abs"] = s.sup_abs;
  j["argmax"] = {{"l", s.arg_l}, {"k", s.arg_k}, {"t", s.arg_k / side}, {"s", s.arg_l / side}};
  j["config"] = couple_config(a);
  if (a.diagnostics) {
    const ScaleParams p = a.levels.empty() ? make_scale_params(spec, a.a, a.b, a.x, a.c_tilde)
                                           : scale_params_from_levels(spec, a.levels[0], a.levels[1], a.levels[2],
                                                                      a.levels[3]);
    const MartingaleIncrements inc = martingale_increments(r, p, a.u, a.v);
    j["diagnostics"] = {{"levels", {{"A", p.A}, {"B", p.B}, {"Astar", p.Astar}, {"Bstar", p.Bstar}}},
                        {"decomposition", to_json(decompose_error(r, p, a.u, a.v))},
                        {"theta", to_json(theta_events(r, p, a.u, a.v))},
                        {"variance", to_json(variance_bounds(inc, p))},
                        {"martingale", {{"sum_a", inc.sum_a}, {"sum_b", inc.sum_b}, {"sum_c", inc.sum_c}}}};
  }
  out << pretty(j);
  if (!a.out.empty()) {
    const fs::path dir = a.out;
    write_file(dir / "couple.json", pretty(j));
    if (a.dump) {
      fs::create_directories(dir);
      std::ofstream f(dir / "field.hcpl", std::ios::binary);
      write_dump(r, f);
    }
    Manifest m{"couple", a.seed, couple_config(a), clock.seconds()};
    write_file(dir / "manifest_couple.json", pretty(to_json(m)));
  }
  (void)err;
  return kExitOk;
}

ScanResult run_scan(const ScanArgs& a, Json& config) {
  config = {{"scanner", a.name}, {"self_test", a.self_test}, {"seed", a.seed}};
  if (a.name == "tusnady") {
    const int m = a.max.value_or(512);
    config["max"] = m;
    return scan_tusnady(m, {.constant = a.self_test ? 0.1 : 2.0});
  }
  if (a.name == "hypergeom") {
    const int m = a.max.value_or(200);
    config["max"] = m;
    HyperOptions o;
    if (a.self_test) o.beta = 0.01;
    return scan_hypergeometric_lemma(m, o);
  }
  if (a.name == "bennett") {
    const int m = a.max.value_or(100);
    config["max"] = m;
    BennettOptions o;
    if (a.self_test) o.exponent_scale = 4.0;
    return check_bennett(m, o);
  }
  if (a.name == "dlp") {
    DlpConfig c;
    c.seed = a.seed;
    c.reps = a.reps.value_or(100000);
    if (a.self_test) c.exponent_scale = 8.0;
    if (a.family == "predictable") {
      c.family = DlpFamily::predictable;
    } else if (a.family == "realized") {
      c.family = DlpFamily::realized_c;
      c.n = a.n;
      c.reps = a.reps.value_or(2000);
      c.c = 0.2;
      c.xs = {0.1, 0.2, 0.3, 0.4};
      c.ys = {0.005, 0.01, 0.02, 0.04};
      config["n"] = c.n;
    }
    config["family"] = a.family;
    config["reps"] = c.reps;
    config["xs"] = c.xs;
    config["ys"] = c.ys;
    config["c"] = c.c;
    const int t_max = a.max.value_or(12);
    config["bineg_max"] = t_max;
    ScanResult r = check_bineg_moments(t_max, 4, a.self_test ? 0.5 : 1.0);
    const ScanResult mc = check_dlp_inequality(c);
    r.merge(mc);
    r.metrics = mc.metrics;
    r.name = "dlp";
    r.domain = mc.domain + "; moment enumeration T <= " + std::to_string(t_max) + ", k <= 4";
    return r;
  }
  if (a.name == "maximal") {
    MaximalConfig c;
    c.n = a.n;
    c.a = a.a;
    c.b = a.b;
    c.seed = a.seed;
    c.reps = a.reps.value_or(10000);
    if (a.self_test) c.exponent_scale = 4.0;
    config["n"] = c.n;
    config["a"] = c.a;
    config["b"] = c.b;
    config["reps"] = c.reps;
    return check_maximal_inequalities(c);
  }
  MultinomialConfig c;
  c.n = a.n;
  c.seed = a.seed;
  c.reps = a.reps.value_or(200);
  c.blocks_per_side = a.blocks;
  if (a.self_test) c.expected_scale = 1.25;
  config["n"] = c.n;
  config["reps"] = c.reps;
  config["blocks"] = c.blocks_per_side;
  return test_multinomial(c);
}

int cmd_scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  Json config;
  const ScanResult r = run_scan(a, config);
  const fs::path dir = a.out;
  Json j = to_json(r);
  j["config"] = config;
  write_file(dir / ("scan_" + a.name + ".json"), pretty(j));
  Manifest m{"scan " + a.name, a.seed, config, clock.seconds()};
  m.extra["passed"] = r.passed();
  write_file(dir / ("manifest_scan_" + a.name + ".json"), pretty(to_json(m)));
  out << r.name << ": " << (r.passed() ? "PASS" : "FAIL") << " checked=" << r.checked << " skipped=" << r.skipped
      << " violations=" << r.violation_count << "\n";
  if (r.passed()) return kExitOk;
  std::ostringstream csv;
  write_violations_csv(r, csv);
  const fs::path path = dir / ("violations_" + a.name + ".csv");
  write_file(path, csv.str());
  err << "violations written to " << path.string() << "\n";
  return kExitViolations;
}

int cmd_scaling(const ScalingArgs& a, std::ostream& out, std::ostream& /*err*/) {
  Stopwatch clock;
  ScalingConfig cfg;
  cfg.ns = a.ns;
  cfg.reps = a.reps;
  cfg.levels = a.quantiles;
  cfg.seed = a.seed;
  const std::vector<ScalingRow> rows = run_scaling(cfg);
  Json config{{"n", a.ns}, {"reps", a.reps}, {"quantiles", a.quantiles}, {"seed", a.seed}};

  Json fits = Json::array(), verdicts = Json::array(), ratios = Json::array(), jrows = Json::array();
  for (const ScalingRow& r : rows) jrows.push_back(to_json(r));
  const std::size_t nlev = rows.front().levels.size();
  for (std::size_t li = 0; li < nlev; ++li) {
    fits.push_back(to_json(fit_exponent(rows, li)));
    verdicts.push_back(to_json(scaling_properties(rows, li)));
    Json series = Json::array();
    for (const RatioPoint& p : ratio_series(rows, li)) series.push_back(to_json(p));
    ratios.push_back({{"level", rows.front().levels[li]}, {"series", series}});
  }
  const fs::path dir = a.out;
  std::ostringstream csv;
  write_scaling_csv(rows, csv);
  write_file(dir / "scaling.csv", csv.str());
  write_file(dir / "scaling.json",
             pretty({{"config", config}, {"rows", jrows}, {"fits", fits}, {"ratios", ratios}, {"verdicts", verdicts}}));
  Manifest m{"scaling", a.seed, config, clock.seconds()};
  m.extra["fits"] = fits;
  write_file(dir / "manifest_scaling.json", pretty(to_json(m)));

  out << csv.str();
  for (const Json& f : fits) {
    out << "level " << f["level"].get<double>() << ": ";
    if (f["ok"].get<bool>())
      out << "p = " << f["p"].get<double>() << " (se " << f["p_se"].get<double>() << ")\n";
    else
      out << f["note"].get<std::string>() << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dyadic quantile coupling of the bivariate uniform empirical process and a Brownian bridge", "hcouple"};
  app.set_config("--config", "", "TOML config file; command-line flags override its values");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  CoupleArgs ca;
  CLI::App* couple_cmd = app.add_subcommand("couple", "Run one coupling and report the sup error");
  couple_cmd->add_option("--n", ca.n, "Number of points")->required()->check(CLI::PositiveNumber);
  couple_cmd->add_option("--seed", ca.seed, "Master seed")->capture_default_str();
  couple_cmd->add_option("--out", ca.out, "Output directory for JSON and dumps");
  couple_cmd->add_flag("--dump", ca.dump, "Write the binary field dump (needs --out)");
  couple_cmd->add_flag("--diagnostics", ca.diagnostics, "Retain hierarchies and report the decomposition");
  couple_cmd->add_option("--a", ca.a, "Rectangle width")->capture_default_str();
  couple_cmd->add_option("--b", ca.b, "Rectangle height")->capture_default_str();
  couple_cmd->add_option("--x", ca.x, "Deviation level x")->capture_default_str();
  couple_cmd->add_option("--ctilde", ca.c_tilde, "Constant C~1 (>= 10)")->capture_default_str();
  couple_cmd->add_option("--u", ca.u, "Horizontal corner index")->capture_default_str();
  couple_cmd->add_option("--v", ca.v, "Vertical corner index")->capture_default_str();
  couple_cmd->add_option("--levels", ca.levels, "Explicit A B Astar Bstar, bypassing the regime check")
      ->expected(4);

  ScanArgs sa;
  CLI::App* scan_cmd = app.add_subcommand("scan", "Run a lemma scanner or Monte Carlo verifier");
  scan_cmd->add_option("name", sa.name, "Scanner")
      ->required()
      ->check(CLI::IsMember({"tusnady", "hypergeom", "bennett", "dlp", "maximal", "multinomial"}));
  scan_cmd->add_option("--max", sa.max, "Scan range (parent count, S, k or T)");
  scan_cmd->add_option("--reps", sa.reps, "Monte Carlo replications")->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
  scan_cmd->add_option("--seed", sa.seed, "Master seed")->capture_default_str();
  scan_cmd->add_flag("--self-test", sa.self_test, "Tighten constants; the scan must then fail");
  scan_cmd->add_option("--out", sa.out, "Output directory")->capture_default_str();
  scan_cmd->add_option("--n", sa.n, "Points per sample (maximal, multinomial, realized dlp)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scan_cmd->add_option("--a", sa.a, "Rectangle width (maximal)")->capture_default_str();
  scan_cmd->add_option("--b", sa.b, "Rectangle height (maximal)")->capture_default_str();
  scan_cmd->add_option("--family", sa.family, "Martingale family (dlp)")
      ->check(CLI::IsMember({"rademacher", "predictable", "realized"}))
      ->capture_default_str();
  scan_cmd->add_option("--blocks", sa.blocks, "Aggregated blocks per side (multinomial)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ScalingArgs sc;
  CLI::App* scaling_cmd = app.add_subcommand("scaling", "Sup error quantiles across n and the exponent fit");
  scaling_cmd->add_option("--n", sc.ns, "List of n")->check(CLI::PositiveNumber)->capture_default_str();
  scaling_cmd->add_option("--reps", sc.reps, "Replications per n")->capture_default_str();
  scaling_cmd->add_option("--quantiles", sc.quantiles, "Quantile levels")->capture_default_str();
  scaling_cmd->add_option("--seed", sc.seed, "Master seed")->capture_default_str();
  scaling_cmd->add_option("--out", sc.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (couple_cmd->parsed()) return cmd_couple(ca, out, err);
    if (scan_cmd->parsed()) return cmd_scan(sa, out, err);
    return cmd_scaling(sc, out, err);
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const ConsistencyError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace hc
