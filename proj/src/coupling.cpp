#include "hc/coupling.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <type_traits>

#include "hc/distq.hpp"

namespace hc {

namespace {

// Positive xi goes through the upper tail so that both tails keep full
// relative precision.
template <class Law>
Count split(const Law& law, double xi) {
  if (xi > 0.0) {
    if constexpr (std::is_same_v<Law, BinomialHalf>)
      return static_cast<Count>(binom_half_quantile_upper(law, norm_cdf(-xi)));
    else
      return static_cast<Count>(hypergeom_quantile_upper(law, norm_cdf(-xi)));
  }
  if constexpr (std::is_same_v<Law, BinomialHalf>)
    return static_cast<Count>(binom_half_quantile(law, norm_cdf(xi)));
  else
    return static_cast<Count>(hypergeom_quantile(law, norm_cdf(xi)));
}

}  // namespace

Count split_binomial(Count parent, double v, double variance) {
  if (parent == 0) return 0;
  return split(BinomialHalf{parent}, v / std::sqrt(variance));
}

Count split_hypergeometric(Count s, Count r1, Count r2, double v, double variance) {
  if (s == 0 || r1 == 0 || r2 == 0) return 0;
  return split(Hypergeometric{s, r1, r2}, v / std::sqrt(variance));
}

Chain<Count> run_c1(const GaussianHierarchy& h, const GridSpec& spec) {
  return refine_chain<Count>(spec.N, 0, static_cast<Count>(spec.n), [&](int j, Eigen::Index k, Count parent) {
    return split_binomial(parent, h.row_v[static_cast<std::size_t>(j)](k), chain_variance(spec, j));
  });
}

Chain<Count> run_c2(const GaussianHierarchy& h, const GridSpec& spec) {
  return refine_chain<Count>(spec.N, 0, static_cast<Count>(spec.n), [&](int i, Eigen::Index l, Count parent) {
    return split_binomial(parent, h.col_v[static_cast<std::size_t>(i)](l), chain_variance(spec, i));
  });
}

CountHierarchy run_c3(const GaussianHierarchy& h, const GridSpec& spec, const Chain<Count>& horizontal,
                      const Chain<Count>& vertical, bool retain) {
  return refine_interior<Count>(
      spec.N, 0, horizontal, vertical,
      [&](int i, int j, Eigen::Index l, Eigen::Index k, Count s, Count r1, Count r2) {
        const double v = h.interior[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](l, k);
        return split_hypergeometric(s, r1, r2, v, interior_variance(spec, i, j));
      },
      retain);
}

CoupledRealization couple_hierarchy(const GridSpec& spec, GaussianHierarchy h, std::uint64_t seed,
                                    const CoupleOptions& opt) {
  if (h.depth != spec.N || h.finest != 0) throw InvalidParameter("coupling needs a full-depth hierarchy");
  if (opt.retain && spec.N > kMaxRetainDepth)
    throw CapacityError("retained hierarchies are limited to N <= " + std::to_string(kMaxRetainDepth));
  CoupledRealization r;
  r.spec = spec;
  r.seed = seed;
  r.g_field = reconstruct_z(h, spec);
  const Chain<Count> horizontal = run_c1(h, spec);
  const Chain<Count> vertical = run_c2(h, spec);
  CountHierarchy u = run_c3(h, spec, horizontal, vertical, opt.retain);
  if (opt.retain) {
    r.m_field = u.level(0, 0);
    r.counts = std::move(u);
    r.gaussian = std::move(h);
  } else {
    r.m_field = std::move(u.level_mut(0, 0));
  }
  return r;
}

CoupledRealization couple(const GridSpec& spec, std::uint64_t seed, const CoupleOptions& opt) {
  Rng rng = make_rng(seed);
  return couple_hierarchy(spec, sample_hierarchy(spec, rng), seed, opt);
}

namespace {

constexpr std::array<char, 4> kMagic{'H', 'C', 'P', 'L'};
constexpr std::uint16_t kDumpVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>) {
    static_assert(sizeof(T) == 8);
    std::memcpy(&bits, &value, 8);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t b = 0; b < sizeof(T); ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw InvalidParameter("truncated dump");
  std::uint64_t bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  if constexpr (std::is_floating_point_v<T>) {
    T value;
    std::memcpy(&value, &bits, 8);
    return value;
  } else {
    return static_cast<T>(bits);
  }
}

}  // namespace

void write_dump(const CoupledRealization& r, std::ostream& out) {
  out.write(kMagic.data(), 4);
  put_le<std::uint16_t>(out, kDumpVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(r.spec.N));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(r.spec.n));
  put_le<std::uint64_t>(out, r.seed);
  for (Eigen::Index l = 0; l < r.m_field.rows(); ++l)
    for (Eigen::Index k = 0; k < r.m_field.cols(); ++k) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.m_field(l, k)));
  for (Eigen::Index l = 0; l < r.g_field.increments.rows(); ++l)
    for (Eigen::Index k = 0; k < r.g_field.increments.cols(); ++k) put_le<double>(out, r.g_field.increments(l, k));
}

CoupledRealization read_dump(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) throw InvalidParameter("not a coupling dump");
  if (get_le<std::uint16_t>(in) != kDumpVersion) throw InvalidParameter("unsupported dump version");
  const int N = get_le<std::uint16_t>(in);
  CoupledRealization r;
  r.spec = make_grid(static_cast<std::int64_t>(get_le<std::uint64_t>(in)));
  if (r.spec.N != N) throw InvalidParameter("dump header is inconsistent");
  r.seed = get_le<std::uint64_t>(in);
  const Eigen::Index side = r.spec.side();
  r.m_field.resize(side, side);
  for (Eigen::Index l = 0; l < side; ++l)
    for (Eigen::Index k = 0; k < side; ++k) r.m_field(l, k) = static_cast<Count>(get_le<std::uint32_t>(in));
  r.g_field.increments.resize(side, side);
  for (Eigen::Index l = 0; l < side; ++l)
    for (Eigen::Index k = 0; k < side; ++k) r.g_field.increments(l, k) = get_le<double>(in);
  r.g_field.root_total = r.g_field.increments.sum();
  return r;
}

}  // namespace hc
