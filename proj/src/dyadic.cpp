#include "hc/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hc {

namespace {

constexpr double kC0 = 12.0;

double pow2(int e) { return std::ldexp(1.0, e); }

// Smallest A >= 0 with v <= 2^A.
int ceil_level(double v) {
  int A = 0;
  while (pow2(A) < v) ++A;
  return A;
}

void fill_maps(ScaleParams& p) {
  const int N = p.spec.N;
  p.m_of_i.assign(static_cast<std::size_t>(N), -1);
  p.mm_of_j.assign(static_cast<std::size_t>(N), -1);
  p.alpha.assign(static_cast<std::size_t>(N), 0.0);
  p.beta.assign(static_cast<std::size_t>(N), 0.0);
  for (int i = p.Bstar; i < N; ++i)
    p.m_of_i[static_cast<std::size_t>(i)] = i <= p.B - 1 ? p.Bstar + p.A - i - 2 : p.Astar - 1;
  for (int j = p.Astar; j < N; ++j)
    p.mm_of_j[static_cast<std::size_t>(j)] = j <= p.A - 1 ? p.Astar + p.B - j - 2 : p.Bstar - 1;
  for (int j = 0; j < N; ++j) {
    p.alpha[static_cast<std::size_t>(j)] = std::min(0.5, pow2(p.A - j - 1));
    p.beta[static_cast<std::size_t>(j)] = std::min(0.5, pow2(p.B - j - 1));
  }
}

void check_levels(const ScaleParams& p) {
  const int N = p.spec.N;
  if (p.A < 0 || p.A > N || p.B < 0 || p.B > N)
    throw InvalidParameter("levels A, B must lie in [0, N]");
  if (p.A + p.Bstar != p.Astar + p.B) throw InvalidParameter("levels must satisfy A + B* = A* + B");
  if (p.Astar < 0 || p.Astar > p.A - 2 || p.Bstar < 0 || p.Bstar > p.B - 2)
    throw RegimeError("levels need 0 <= A* <= A - 2 and 0 <= B* <= B - 2 (A=" + std::to_string(p.A) +
                      ", B=" + std::to_string(p.B) + ", A*=" + std::to_string(p.Astar) +
                      ", B*=" + std::to_string(p.Bstar) + ")");
}

}  // namespace

GridSpec make_grid(std::int64_t n, int max_depth) {
  if (n < 1) throw InvalidParameter("sample size must be positive");
  int N = 0;
  while ((std::int64_t{1} << N) < n) {
    ++N;
    if (N > max_depth)
      throw CapacityError("n=" + std::to_string(n) + " needs depth above the cap " + std::to_string(max_depth));
  }
  GridSpec g;
  g.n = n;
  g.N = N;
  g.gamma = static_cast<double>(n) / pow2(N);
  return g;
}

double log_floor_e(double v) { return std::log(std::max(v, std::exp(1.0))); }

ScaleParams make_scale_params(const GridSpec& spec, double a, double b, double x, double c_tilde) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) throw InvalidParameter("a and b must lie in [0, 1]");
  if (!(x > 0.0)) throw InvalidParameter("x must be positive");
  if (!(c_tilde >= 10.0)) throw InvalidParameter("c_tilde must be at least 10");
  const double n = static_cast<double>(spec.n);
  const double nab = n * a * b;
  const double thr = x / 2.0 + c_tilde * log_floor_e(nab);
  if (!(nab > 496.0)) throw RegimeError("regime needs nab > 496 (nab=" + std::to_string(nab) + ")");
  if (!(thr < spec.gamma * spec.gamma * nab / 8.0))
    throw RegimeError("regime needs x/2 + c_tilde log(nab) < gamma^2 nab / 8 (lhs=" + std::to_string(thr) +
                      ", rhs=" + std::to_string(spec.gamma * spec.gamma * nab / 8.0) + ")");

  ScaleParams p;
  p.spec = spec;
  p.a = a;
  p.b = b;
  p.x = x;
  p.c_tilde = c_tilde;
  p.threshold = thr;
  p.A = ceil_level(n * a);
  p.B = ceil_level(n * b);
  // e = A* + B - N with 2^e < 4 thr / gamma <= 2^(e+1)
  const double q = 4.0 * thr / spec.gamma;
  int e = ceil_level(q) - 1;
  p.Astar = e - p.B + spec.N;
  p.Bstar = e - p.A + spec.N;
  check_levels(p);
  const double c0_term = (a * b == 1.0) ? 2.0 * std::pow(3.0 * kC0 / 4.0, 2.0 / 3.0)
                                        : 2.0 * std::pow(3.0 * kC0, 2.0 / 3.0);
  p.c1 = 1.5 * c_tilde + c0_term;
  fill_maps(p);
  return p;
}

ScaleParams scale_params_from_levels(const GridSpec& spec, int A, int B, int Astar, int Bstar) {
  ScaleParams p;
  p.spec = spec;
  p.A = A;
  p.B = B;
  p.Astar = Astar;
  p.Bstar = Bstar;
  check_levels(p);
  const double n = static_cast<double>(spec.n);
  p.a = std::min(1.0, pow2(A) / n);
  p.b = std::min(1.0, pow2(B) / n);
  p.x = std::numeric_limits<double>::quiet_NaN();
  p.c_tilde = std::numeric_limits<double>::quiet_NaN();
  p.c1 = std::numeric_limits<double>::quiet_NaN();
  // the largest threshold compatible with these levels
  p.threshold = spec.gamma * pow2(Astar + B - spec.N + 1) / 4.0;
  fill_maps(p);
  return p;
}

std::int64_t k_anchor(int j, std::int64_t m) {
  if (m < 1 || j < 0) throw InvalidParameter("k_anchor needs m >= 1 and j >= 0");
  return 2 * ((m - 1) >> (j + 1));
}

std::int64_t centered_anchor(int i, std::int64_t m) {
  if (m < 1 || i < 0) throw InvalidParameter("centered_anchor needs m >= 1 and i >= 0");
  return 2 * ((m - 1 + (std::int64_t{1} << i)) >> (i + 1));
}

HaarExpansion haar_expand(std::int64_t m, int base_level, const GridSpec& spec) {
  const int N = spec.N;
  if (base_level < 0 || base_level > N) throw InvalidParameter("base level must lie in [0, N]");
  if (m < 1 || m > spec.side()) throw InvalidParameter("prefix length must lie in [1, 2^N]");
  if (m % (std::int64_t{1} << base_level) != 0)
    throw AlignmentError("prefix length " + std::to_string(m) + " is not a multiple of 2^" +
                         std::to_string(base_level));
  HaarExpansion h;
  h.m = m;
  h.base_level = base_level;
  h.depth = N;
  for (int j = base_level; j < N; ++j) {
    const std::int64_t k = k_anchor(j, m);
    const std::int64_t half = std::int64_t{1} << j;
    const std::int64_t r = m - k * half;
    // inner product of the prefix indicator with e_k - e_{k+1}
    const std::int64_t ip = r <= half ? r : 2 * half - r;
    h.coeffs.push_back({ip, j + 1});
    h.anchors.push_back(k);
    h.signs.push_back(ip >= 0 ? 1 : -1);
  }
  h.residual = {m, N};
  return h;
}

std::vector<std::int64_t> haar_reconstruct_scaled(const HaarExpansion& h) {
  const int N = h.depth;
  const std::int64_t side = std::int64_t{1} << N;
  std::vector<std::int64_t> out(static_cast<std::size_t>(side), 2 * h.residual.num);
  for (int j = h.base_level; j < N; ++j) {
    const DyadicRational c = h.coeff(j);
    if (c.num == 0) continue;
    // c 2^(N+1) = num 2^(N - j)
    const std::int64_t w = c.num << (N - j);
    const std::int64_t half = std::int64_t{1} << j;
    const std::int64_t start = h.anchor(j) * half;
    for (std::int64_t x = start; x < start + half; ++x) out[static_cast<std::size_t>(x)] += w;
    for (std::int64_t x = start + half; x < start + 2 * half; ++x) out[static_cast<std::size_t>(x)] -= w;
  }
  return out;
}

}  // namespace hc
