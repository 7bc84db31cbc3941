#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hc/diagnostics.hpp"
#include "hc/distq.hpp"
#include "hc/errors.hpp"
#include "hc/harness.hpp"
#include "hc/parallel.hpp"

namespace hc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string params(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ' ';
    os << k << '=' << v;
    first = false;
  }
  return os.str();
}

// xi-cell of table entry idx: (xi_at(idx - 1), xi_at(idx)].
std::pair<double, double> cell(const DiscreteTable& t, std::size_t idx) {
  const double lo = idx == 0 ? -kInf : xi_at(t.cdf[idx - 1], t.sf[idx - 1]);
  const double hi = idx + 1 == t.cdf.size() ? kInf : xi_at(t.cdf[idx], t.sf[idx]);
  return {lo, hi};
}

// Runs body(i, result) for i in [0, count) in parallel chunks and merges in
// index order, so the output does not depend on the worker count.
template <class F>
ScanResult chunked(std::size_t count, F&& body) {
  std::vector<ScanResult> parts(count);
  parallel_for(count, [&](std::size_t i) { body(i, parts[i]); });
  ScanResult out;
  for (const ScanResult& p : parts) out.merge(p);
  return out;
}

}  // namespace

void ScanResult::add_violation(std::string where, double lhs, double rhs) {
  ++violation_count;
  if (violations.size() < kMaxStoredViolations) violations.push_back({std::move(where), lhs, rhs});
}

double ScanResult::metric_or(const std::string& key, double fallback) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  return fallback;
}

void ScanResult::merge(const ScanResult& other) {
  checked += other.checked;
  skipped += other.skipped;
  violation_count += other.violation_count;
  for (const Violation& v : other.violations) {
    if (violations.size() >= kMaxStoredViolations) break;
    violations.push_back(v);
  }
  for (const auto& [k, v] : other.metrics) {
    auto it = std::find_if(metrics.begin(), metrics.end(), [&](const auto& e) { return e.first == k; });
    if (it == metrics.end())
      metrics.emplace_back(k, v);
    else
      it->second = std::max(it->second, v);
  }
}

double xi_at(double cdf, double sf) {
  if (cdf <= 0.0) return -kInf;
  if (sf <= 0.0) return kInf;
  return cdf <= 0.5 ? norm_quantile(cdf) : -norm_quantile(sf);
}

// Within a cell the count is fixed and the right side grows with |xi|, so
// the endpoint nearest 0 is the worst point of the cell.
ScanResult scan_tusnady(int m_max, const TusnadyOptions& opt) {
  if (m_max < 1) throw InvalidParameter("scan_tusnady: m_max must be >= 1");
  ScanResult out = chunked(static_cast<std::size_t>(m_max), [&](std::size_t idx, ScanResult& res) {
    const std::int64_t m = static_cast<std::int64_t>(idx) + 1;
    const DiscreteTable t = tabulate(BinomialHalf{m});
    const double sm = std::sqrt(static_cast<double>(m));
    for (std::size_t c = 0; c < t.cdf.size(); ++c) {
      const std::int64_t u = t.lo + static_cast<std::int64_t>(c);
      const auto [lo, hi] = cell(t, c);
      const double xi = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
      const double lhs = std::abs(static_cast<double>(2 * u - m));
      const double rhs = opt.constant * (1.0 + sm * xi / 2.0);
      ++res.checked;
      if (lhs > rhs) res.add_violation(params({{"m", double(m)}, {"u", double(u)}, {"xi", xi}}), lhs, rhs);
    }
  });
  out.name = "tusnady";
  out.domain = "Bin(m,1/2) quantile coupling, m in [1," + std::to_string(m_max) +
               "], all children u; |2u-m| <= " + std::to_string(opt.constant) + "(1+sqrt(m)|xi|/2)";
  return out;
}

// For fixed u the gap f(xi) = |d - s xi| - beta xi^2 is the max of two
// concave parabolas; each is maximized at its vertex clamped to the cell.
ScanResult scan_hypergeometric_lemma(int n_max, const HyperOptions& opt) {
  if (n_max < 4) throw InvalidParameter("scan_hypergeometric_lemma: n_max must be >= 4");
  ScanResult out = chunked(static_cast<std::size_t>(n_max), [&](std::size_t idx, ScanResult& res) {
    const Count s = static_cast<Count>(idx) + 1;
    double worst = -kInf;
    for (Count r1 = 0; r1 <= s; ++r1) {
      for (Count r2 = 0; r2 <= s; ++r2) {
        const double var = hyper_cond_var(s, r1, r2);
        const double dd = (2.0 * r1 - s) * (2.0 * r2 - s) / (double(s) * s);
        if (var < opt.min_var || std::abs(dd) > opt.max_delta_product) {
          ++res.skipped;
          continue;
        }
        const double mean = hyper_cond_mean(s, r1, r2);
        const double sd = std::sqrt(var);
        const DiscreteTable t = tabulate(Hypergeometric{s, r1, r2});
        for (std::size_t c = 0; c < t.cdf.size(); ++c) {
          const double u = static_cast<double>(t.lo + static_cast<std::int64_t>(c));
          const auto [lo, hi] = cell(t, c);
          const double d = u - mean;
          auto branch = [&](double sign) {
            const double xi = std::clamp(sign * sd / (2.0 * opt.beta), lo, hi);
            return sign * (sd * xi - d) - opt.beta * xi * xi;
          };
          const double f = std::max(branch(-1.0), branch(1.0));
          ++res.checked;
          worst = std::max(worst, f - opt.alpha);
          if (f > opt.alpha)
            res.add_violation(params({{"S", double(s)}, {"R1", double(r1)}, {"R2", double(r2)}, {"u", u}}),
                              f, opt.alpha);
        }
      }
    }
    if (res.checked > 0) res.metric("worst_gap", worst);
  });
  out.name = "hypergeom";
  std::ostringstream os;
  os << "S in [1," << n_max << "], all R1, R2 with cond_var >= " << opt.min_var << " and |delta delta~| <= "
     << opt.max_delta_product << "; |u - mean - sqrt(var) xi| <= " << opt.alpha << " + " << opt.beta << " xi^2";
  out.domain = os.str();
  return out;
}

namespace {

long double bennett_hl(long double t) { return (1.0L + t) * std::log1p(t) - t; }

}  // namespace

ScanResult check_bennett(int n_max, const BennettOptions& opt) {
  if (n_max < 1) throw InvalidParameter("check_bennett: n_max must be >= 1");
  ScanResult out = chunked(static_cast<std::size_t>(n_max), [&](std::size_t idx, ScanResult& res) {
    const int k = static_cast<int>(idx) + 1;
    for (const double pd : opt.probs) {
      const long double p = pd;
      const long double m = k * p;
      std::vector<long double> pmf(static_cast<std::size_t>(k) + 1);
      for (int z = 0; z <= k; ++z)
        pmf[static_cast<std::size_t>(z)] =
            std::exp(std::lgamma(k + 1.0L) - std::lgamma(z + 1.0L) - std::lgamma(k - z + 1.0L) +
                     z * std::log(p) + (k - z) * std::log1p(-p));
      for (const int sign : {1, -1}) {
        const long double span = sign > 0 ? k - m : m;
        for (int g = 1; g <= opt.y_points; ++g) {
          const long double y = span * g / opt.y_points;
          if (y <= 0.0L) continue;
          const long double tol = 1e-12L * (1.0L + k);
          long double tail = 0.0L;
          for (int z = 0; z <= k; ++z)
            if (sign * (z - m) >= y - tol) tail += pmf[static_cast<std::size_t>(z)];
          const long double bound = std::exp(-opt.exponent_scale * m * bennett_hl(y / m));
          ++res.checked;
          if (tail > bound * (1.0L + 1e-12L))
            res.add_violation(params({{"k", double(k)}, {"p", pd}, {"sign", double(sign)}, {"y", double(y)}}),
                              static_cast<double>(tail), static_cast<double>(bound));
        }
      }
    }
  });
  out.name = "bennett";
  out.domain = "Bin(k,p), k in [1," + std::to_string(n_max) + "], " + std::to_string(opt.probs.size()) +
               " probabilities, " + std::to_string(opt.y_points) + " y-points per sign";
  return out;
}

ScanResult check_bineg_moments(int t_max, int k_max, double factor) {
  if (t_max < 1 || t_max > 30 || k_max < 1) throw InvalidParameter("check_bineg_moments: need 1 <= T <= 30, k >= 1");
  ScanResult out;
  out.name = "bineg";
  out.domain = "fair sign sums, T in [1," + std::to_string(t_max) + "], k in [1," + std::to_string(k_max) + "]";
  for (int T = 1; T <= t_max; ++T) {
    const std::uint64_t outcomes = std::uint64_t{1} << T;
    for (int k = 1; k <= k_max; ++k) {
      long double total = 0.0L;
      for (std::uint64_t w = 0; w < outcomes; ++w) {
        const int s = 2 * __builtin_popcountll(w) - T;
        total += std::pow(static_cast<long double>(s), 2 * k);
      }
      const long double moment = total / static_cast<long double>(outcomes);
      long double dfact = 1.0L;  // (2k)! / (2^k k!) = (2k - 1)!!
      for (int q = 1; q < 2 * k; q += 2) dfact *= q;
      const long double bound = factor * dfact * std::pow(static_cast<long double>(T), k);
      ++out.checked;
      if (moment > bound * (1.0L + 1e-15L))
        out.add_violation(params({{"T", double(T)}, {"k", double(k)}}), static_cast<double>(moment),
                          static_cast<double>(bound));
    }
  }
  return out;
}

}  // namespace hc
