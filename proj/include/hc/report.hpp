#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hc/diagnostics.hpp"
#include "hc/harness.hpp"
#include "hc/scaling.hpp"

namespace hc {

using Json = nlohmann::ordered_json;

/// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view s);
/// Shortest decimal that round-trips the double.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

void write_violations_csv(const ScanResult& r, std::ostream& out);
/// One row per n; quantile columns in increasing level order.
void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out);

Json to_json(const ScanResult& r);
Json to_json(const ScalingRow& r);
Json to_json(const ExponentFit& f);
Json to_json(const RatioPoint& p);
Json to_json(const ScalingVerdict& v);
Json to_json(const DecompositionReport& d);
Json to_json(const ThetaReport& t);
Json to_json(const VarianceReport& v);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
/// `git describe` of the source tree at configure time, or "unknown".
std::string git_describe();

struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  Json config;
  double wall_seconds = 0.0;
  Json extra = Json::object();
};
/// {git_describe, command, seed, config_hash, config, wall_seconds, ...extra}
Json to_json(const Manifest& m);

}  // namespace hc
