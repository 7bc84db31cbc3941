#include "hc/distq.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hc/errors.hpp"

namespace hc {

namespace {

// Weights relative to the mode below this are dropped; the matching
// probabilities are far below the smallest normal double.
constexpr double kCut = 1e-300;

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

struct BinomLaw {
  std::int64_t n;
  std::int64_t lo() const { return 0; }
  std::int64_t hi() const { return n; }
  std::int64_t mode() const { return n / 2; }
  // pmf(k - 1) / pmf(k)
  double down(std::int64_t k) const {
    return static_cast<double>(k) / static_cast<double>(n - k + 1);
  }
  double up(std::int64_t k) const {
    return static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  static constexpr bool symmetric = true;
};

struct HyperLaw {
  std::int64_t n, n1, n2;
  std::int64_t lo() const { return std::max<std::int64_t>(0, n1 + n2 - n); }
  std::int64_t hi() const { return std::min(n1, n2); }
  std::int64_t mode() const {
    const std::int64_t m = (n1 + 1) * (n2 + 1) / (n + 2);
    return std::clamp(m, lo(), hi());
  }
  double down(std::int64_t k) const {
    const double a = static_cast<double>(k) * static_cast<double>(n - n1 - n2 + k);
    const double b = static_cast<double>(n1 - k + 1) * static_cast<double>(n2 - k + 1);
    return a / b;
  }
  double up(std::int64_t k) const {
    const double a = static_cast<double>(n1 - k) * static_cast<double>(n2 - k);
    const double b = static_cast<double>(k + 1) * static_cast<double>(n - n1 - n2 + k + 1);
    return a / b;
  }
  static constexpr bool symmetric = false;
};

// left[t] = w(mode - t), right[t] = w(mode + 1 + t), w(mode) = 1.
struct Walk {
  std::int64_t mode = 0;
  std::vector<double> left;
  std::vector<double> right;
  double total = 0.0;

  std::int64_t lo_eff() const { return mode - static_cast<std::int64_t>(left.size()) + 1; }
  std::int64_t hi_eff() const { return mode + static_cast<std::int64_t>(right.size()); }

  // sum of w(j) for lo_eff <= j <= k, k <= mode, from the tail edge
  double left_sum(std::int64_t k) const {
    Kahan acc;
    const auto stop = static_cast<std::size_t>(mode - k);
    for (std::size_t t = left.size(); t-- > stop;) acc.add(left[t]);
    return acc.sum;
  }
  // sum of w(j) for j > k, k >= mode, from the tail edge
  double right_sum(std::int64_t k) const {
    Kahan acc;
    const auto stop = static_cast<std::size_t>(k - mode);
    for (std::size_t t = right.size(); t-- > stop;) acc.add(right[t]);
    return acc.sum;
  }
};

template <class Law>
void build(const Law& law, Walk& w) {
  w.mode = law.mode();
  w.left.clear();
  w.right.clear();
  double x = 1.0;
  w.left.push_back(x);
  for (std::int64_t k = w.mode; k > law.lo(); --k) {
    x *= law.down(k);
    if (x < kCut) break;
    w.left.push_back(x);
  }
  if constexpr (Law::symmetric) {
    const std::size_t shift = (law.n % 2 == 0) ? 1 : 0;
    for (std::size_t t = shift; t < w.left.size(); ++t) w.right.push_back(w.left[t]);
  } else {
    x = 1.0;
    for (std::int64_t k = w.mode; k < law.hi(); ++k) {
      x *= law.up(k);
      if (x < kCut) break;
      w.right.push_back(x);
    }
  }
  w.total = w.left_sum(w.mode) + w.right_sum(w.mode);
}

Walk& scratch() {
  thread_local Walk w;
  return w;
}

double floor_arg(double u) {
  if (std::isnan(u)) throw DomainError("cdf argument is NaN");
  return std::floor(u);
}

template <class Law>
double cdf_impl(const Law& law, double u) {
  const double fu = floor_arg(u);
  if (fu < static_cast<double>(law.lo())) return 0.0;
  if (fu >= static_cast<double>(law.hi())) return 1.0;
  const auto k = static_cast<std::int64_t>(fu);
  Walk& w = scratch();
  build(law, w);
  if (k <= w.mode) {
    if (k < w.lo_eff()) return 0.0;
    return w.left_sum(k) / w.total;
  }
  if (k >= w.hi_eff()) return 1.0;
  return 1.0 - w.right_sum(k) / w.total;
}

template <class Law>
double sf_impl(const Law& law, double u) {
  const double fu = floor_arg(u);
  if (fu < static_cast<double>(law.lo())) return 1.0;
  if (fu >= static_cast<double>(law.hi())) return 0.0;
  const auto k = static_cast<std::int64_t>(fu);
  Walk& w = scratch();
  build(law, w);
  if (k >= w.mode) {
    if (k >= w.hi_eff()) return 0.0;
    return w.right_sum(k) / w.total;
  }
  if (k < w.lo_eff()) return 1.0;
  return 1.0 - w.left_sum(k) / w.total;
}

template <class Law>
std::int64_t quantile_impl(const Law& law, double p) {
  if (!(p > 0.0) || p > 1.0) throw DomainError("quantile level must lie in (0, 1]");
  if (law.lo() == law.hi()) return law.lo();
  Walk& w = scratch();
  build(law, w);
  Kahan acc;
  for (std::int64_t k = w.lo_eff(); k <= w.mode; ++k) {
    acc.add(w.left[static_cast<std::size_t>(w.mode - k)]);
    if (acc.sum / w.total >= p) return k;
  }
  std::int64_t answer = w.hi_eff();
  Kahan tail;
  for (std::size_t t = w.right.size(); t-- > 1;) {
    tail.add(w.right[t]);
    if (1.0 - tail.sum / w.total >= p) {
      answer = w.mode + static_cast<std::int64_t>(t);
    } else {
      break;
    }
  }
  return answer;
}

// Smallest k with sf(k) <= q, with sf formed as in tabulate_impl.
template <class Law>
std::int64_t quantile_upper_impl(const Law& law, double q) {
  if (!(q >= 0.0) || !(q < 1.0)) throw DomainError("upper quantile level must lie in [0, 1)");
  if (law.lo() == law.hi()) return law.lo();
  Walk& w = scratch();
  build(law, w);
  Kahan tail;
  std::int64_t answer = w.hi_eff();
  for (std::int64_t k = w.hi_eff() - 1; k >= w.mode; --k) {
    tail.add(w.right[static_cast<std::size_t>(k - w.mode)]);
    if (tail.sum / w.total > q) return answer;
    answer = k;
  }
  Kahan acc;
  for (std::int64_t k = w.lo_eff(); k < w.mode; ++k) {
    acc.add(w.left[static_cast<std::size_t>(w.mode - k)]);
    if (1.0 - acc.sum / w.total <= q) return k;
  }
  return answer;
}

template <class Law>
DiscreteTable tabulate_impl(const Law& law) {
  DiscreteTable tab;
  tab.lo = law.lo();
  tab.hi = law.hi();
  const auto size = static_cast<std::size_t>(tab.hi - tab.lo + 1);
  tab.pmf.assign(size, 0.0);
  tab.cdf.assign(size, 0.0);
  tab.sf.assign(size, 0.0);
  Walk w;
  build(law, w);
  const std::int64_t lo_eff = w.lo_eff();
  const std::int64_t hi_eff = w.hi_eff();
  auto at = [&](std::int64_t k) { return static_cast<std::size_t>(k - tab.lo); };
  for (std::int64_t k = lo_eff; k <= w.mode; ++k)
    tab.pmf[at(k)] = w.left[static_cast<std::size_t>(w.mode - k)] / w.total;
  for (std::int64_t k = w.mode + 1; k <= hi_eff; ++k)
    tab.pmf[at(k)] = w.right[static_cast<std::size_t>(k - w.mode - 1)] / w.total;

  // lower part: cdf from the left edge, sf as its complement
  Kahan acc;
  for (std::int64_t k = tab.lo; k <= w.mode; ++k) {
    if (k >= lo_eff) acc.add(w.left[static_cast<std::size_t>(w.mode - k)]);
    tab.cdf[at(k)] = k < lo_eff ? 0.0 : acc.sum / w.total;
  }
  // upper part: sf from the right edge, cdf as its complement
  Kahan tail;
  for (std::int64_t k = tab.hi; k >= w.mode; --k) {
    if (k < hi_eff) tail.add(w.right[static_cast<std::size_t>(k - w.mode)]);
    tab.sf[at(k)] = k >= hi_eff ? 0.0 : tail.sum / w.total;
  }
  for (std::int64_t k = w.mode + 1; k <= tab.hi; ++k)
    tab.cdf[at(k)] = k >= hi_eff ? 1.0 : 1.0 - tab.sf[at(k)];
  for (std::int64_t k = tab.lo; k < w.mode; ++k)
    tab.sf[at(k)] = k < lo_eff ? 1.0 : 1.0 - tab.cdf[at(k)];
  tab.cdf[at(tab.hi)] = 1.0;
  tab.sf[at(tab.hi)] = 0.0;
  return tab;
}

BinomLaw law_of(const BinomialHalf& d) {
  if (d.n < 0) throw InvalidParameter("binomial trial count must be nonnegative");
  return BinomLaw{d.n};
}

HyperLaw law_of(const Hypergeometric& d) {
  if (d.n < 0 || d.n1 < 0 || d.n2 < 0)
    throw InvalidParameter("hypergeometric parameters must be nonnegative");
  if (d.n1 > d.n || d.n2 > d.n)
    throw InvalidParameter("hypergeometric draws and marked items cannot exceed population (n=" +
                           std::to_string(d.n) + ", n1=" + std::to_string(d.n1) +
                           ", n2=" + std::to_string(d.n2) + ")");
  return HyperLaw{d.n, d.n1, d.n2};
}

double lfact(std::int64_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

double sorted_sum(std::array<double, 4> terms) {
  std::sort(terms.begin(), terms.end());
  return ((terms[0] + terms[1]) + terms[2]) + terms[3];
}

}  // namespace

double norm_cdf(double x) {
  if (std::isnan(x)) throw DomainError("norm_cdf argument is NaN");
  const double v = 0.5 * std::erfc(-x * M_SQRT1_2);
  return std::clamp(v, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
}

// Wichura, AS241 (PPND16).
double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("norm_quantile level must lie in (0, 1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double bennett_h(double t) {
  if (!(t > -1.0)) throw DomainError("bennett_h requires t > -1");
  if (std::fabs(t) < 1e-3) {
    // sum_{k>=2} (-1)^k t^k / (k (k - 1))
    double term = t * t;
    double sum = 0.0;
    for (int k = 2; k <= 9; ++k) {
      sum += ((k % 2 == 0) ? 1.0 : -1.0) * term / (k * (k - 1.0));
      term *= t;
    }
    return sum;
  }
  return (1.0 + t) * std::log1p(t) - t;
}

std::int64_t support_min(const BinomialHalf& d) { return law_of(d).lo(); }
std::int64_t support_max(const BinomialHalf& d) { return law_of(d).hi(); }
std::int64_t support_min(const Hypergeometric& d) { return law_of(d).lo(); }
std::int64_t support_max(const Hypergeometric& d) { return law_of(d).hi(); }

double log_pmf(const BinomialHalf& d, std::int64_t k) {
  const BinomLaw law = law_of(d);
  if (k < law.lo() || k > law.hi()) return -std::numeric_limits<double>::infinity();
  return lfact(d.n) - lfact(k) - lfact(d.n - k) - static_cast<double>(d.n) * M_LN2;
}

double log_pmf(const Hypergeometric& d, std::int64_t k) {
  const HyperLaw law = law_of(d);
  if (k < law.lo() || k > law.hi()) return -std::numeric_limits<double>::infinity();
  // each group is invariant (as a multiset) under n1 <-> n2
  const double plus = sorted_sum({lfact(d.n1), lfact(d.n2), lfact(d.n - d.n1), lfact(d.n - d.n2)});
  const double minus = sorted_sum({lfact(k), lfact(d.n1 - k), lfact(d.n2 - k),
                                   lfact(d.n - d.n1 - d.n2 + k)});
  return (plus - minus) - lfact(d.n);
}

double binom_half_cdf(const BinomialHalf& d, double u) { return cdf_impl(law_of(d), u); }
double binom_half_sf(const BinomialHalf& d, double u) { return sf_impl(law_of(d), u); }
std::int64_t binom_half_quantile(const BinomialHalf& d, double p) {
  return quantile_impl(law_of(d), p);
}
std::int64_t binom_half_quantile_upper(const BinomialHalf& d, double q) {
  return quantile_upper_impl(law_of(d), q);
}

double hypergeom_cdf(const Hypergeometric& d, double u) { return cdf_impl(law_of(d), u); }
double hypergeom_sf(const Hypergeometric& d, double u) { return sf_impl(law_of(d), u); }
std::int64_t hypergeom_quantile(const Hypergeometric& d, double p) {
  return quantile_impl(law_of(d), p);
}
std::int64_t hypergeom_quantile_upper(const Hypergeometric& d, double q) {
  return quantile_upper_impl(law_of(d), q);
}

DiscreteTable tabulate(const BinomialHalf& d) { return tabulate_impl(law_of(d)); }
DiscreteTable tabulate(const Hypergeometric& d) { return tabulate_impl(law_of(d)); }

}  // namespace hc
