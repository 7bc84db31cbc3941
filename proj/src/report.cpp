#include "hc/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

#ifndef HC_GIT_DESCRIBE
#define HC_GIT_DESCRIBE "unknown"
#endif

namespace hc {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_field(fields[i]);
  }
  out_ << "\r\n";
}

void write_violations_csv(const ScanResult& r, std::ostream& out) {
  CsvWriter w(out);
  w.row({"scan", "parameters", "lhs", "rhs"});
  for (const Violation& v : r.violations) w.row({r.name, v.where, format_double(v.lhs), format_double(v.rhs)});
}

void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out) {
  CsvWriter w(out);
  std::vector<std::string> header{"n", "N", "reps"};
  const std::vector<double> levels = rows.empty() ? std::vector<double>{} : rows.front().levels;
  for (double q : levels) {
    header.push_back("q" + format_double(q));
    header.push_back("q" + format_double(q) + "_se");
  }
  header.insert(header.end(), {"mean", "stderr"});
  w.row(header);
  for (const ScalingRow& r : rows) {
    std::vector<std::string> f{std::to_string(r.n), std::to_string(r.N), std::to_string(r.reps)};
    for (const QuantileEstimate& q : r.quantiles) {
      f.push_back(format_double(q.value));
      f.push_back(format_double(q.se));
    }
    f.push_back(format_double(r.mean));
    f.push_back(format_double(r.stderr_mean));
    w.row(f);
  }
}

Json to_json(const ScanResult& r) {
  Json j;
  j["name"] = r.name;
  j["domain"] = r.domain;
  j["passed"] = r.passed();
  j["checked"] = r.checked;
  j["skipped"] = r.skipped;
  j["violation_count"] = r.violation_count;
  Json metrics = Json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = number(v);
  j["metrics"] = metrics;
  Json vs = Json::array();
  for (const Violation& v : r.violations) vs.push_back({{"parameters", v.where}, {"lhs", number(v.lhs)}, {"rhs", number(v.rhs)}});
  j["violations"] = vs;
  return j;
}

Json to_json(const ScalingRow& r) {
  Json q = Json::array();
  for (std::size_t i = 0; i < r.levels.size(); ++i)
    q.push_back({{"level", r.levels[i]}, {"value", number(r.quantiles[i].value)}, {"se", number(r.quantiles[i].se)}});
  return {{"n", r.n}, {"N", r.N}, {"reps", r.reps}, {"quantiles", q}, {"mean", number(r.mean)},
          {"stderr", number(r.stderr_mean)}};
}

Json to_json(const ExponentFit& f) {
  Json j{{"level", f.level}, {"points", f.points}, {"ok", f.ok}};
  if (f.ok) {
    j["p"] = number(f.p);
    j["p_se"] = number(f.p_se);
    j["log_c"] = number(f.log_c);
  } else {
    j["note"] = f.note;
  }
  return j;
}

Json to_json(const RatioPoint& p) {
  return {{"n", p.n}, {"ratio_log2", number(p.ratio2)}, {"ratio_log2_se", number(p.ratio2_se)},
          {"ratio_log32", number(p.ratio32)}, {"ratio_log32_se", number(p.ratio32_se)}};
}

Json to_json(const ScalingVerdict& v) {
  return {{"level", v.level},
          {"nondecreasing", v.nondecreasing},
          {"exponent_in_range", v.exponent_in_range},
          {"ratio_log2_nonincreasing", v.ratio2_nonincreasing},
          {"holds", v.holds()},
          {"fit", to_json(v.fit)}};
}

Json to_json(const DecompositionReport& d) {
  return {{"u", d.u},
          {"v", d.v},
          {"T", number(d.T)},
          {"T1", number(d.T1)},
          {"T2", number(d.T2)},
          {"boundary_row", number(d.boundary_row)},
          {"boundary_col", number(d.boundary_col)},
          {"direct_error", number(d.direct_error)},
          {"residual", number(d.residual)}};
}

Json to_json(const ThetaReport& t) {
  return {{"theta0_holds", t.theta0_holds},
          {"theta1_holds", t.theta1_holds},
          {"worst_ratio_theta0", number(t.worst_ratio_theta0)},
          {"row_sums", t.row_sums},
          {"col_sums", t.col_sums},
          {"bound", number(t.bound)}};
}

Json to_json(const VarianceReport& v) {
  return {{"max_term", number(v.max_term)}, {"sum_terms", number(v.sum_terms)}, {"theta_a", v.theta_a},
          {"theta_b", v.theta_b},           {"rhs_a", number(v.rhs_a)},         {"rhs_b", number(v.rhs_b)},
          {"a_holds", v.a_holds},           {"b_holds", v.b_holds}};
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string git_describe() { return HC_GIT_DESCRIBE; }

Json to_json(const Manifest& m) {
  Json j;
  j["git_describe"] = git_describe();
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["config_hash"] = fnv1a_hex(m.config.dump());
  j["config"] = m.config;
  j["wall_seconds"] = m.wall_seconds;
  for (const auto& [k, v] : m.extra.items()) j[k] = v;
  return j;
}

}  // namespace hc
