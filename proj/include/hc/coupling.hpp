#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "hc/dyadic.hpp"
#include "hc/field.hpp"
#include "hc/hierarchy.hpp"

namespace hc {

using Count = std::int32_t;
using CountHierarchy = DyadicHierarchy<Count>;

/// Step C1: counts U^{N,0}_{j,k}, chain[j](k).
Chain<Count> run_c1(const GaussianHierarchy& h, const GridSpec& spec);
/// Step C2: counts U^{i,l}_{N,0}, chain[i](l).
Chain<Count> run_c2(const GaussianHierarchy& h, const GridSpec& spec);
/// Step C3 over all interior levels.  Without `retain` only the finest
/// level (the field M) is kept.
CountHierarchy run_c3(const GaussianHierarchy& h, const GridSpec& spec, const Chain<Count>& horizontal,
                      const Chain<Count>& vertical, bool retain);

/// Binomial quantile coupling of one split; exposed for sweeps.
Count split_binomial(Count parent, double v, double variance);
/// Hypergeometric quantile coupling of one (even, even) cell.
Count split_hypergeometric(Count s, Count r1, Count r2, double v, double variance);

/// Deepest grid for which the full V and U hierarchies may be retained.
inline constexpr int kMaxRetainDepth = 10;

struct CoupleOptions {
  bool retain = false;  // keep V and the full U hierarchy for diagnostics
};

struct CoupledRealization {
  GridSpec spec;
  std::uint64_t seed = 0;
  Grid<Count> m_field;  // (l, k): vertical cell l, horizontal cell k
  WienerField g_field;
  std::optional<GaussianHierarchy> gaussian;
  std::optional<CountHierarchy> counts;

  bool retained() const { return gaussian.has_value() && counts.has_value(); }
};

/// Couples an already sampled hierarchy.
CoupledRealization couple_hierarchy(const GridSpec& spec, GaussianHierarchy h, std::uint64_t seed,
                                    const CoupleOptions& opt = {});
CoupledRealization couple(const GridSpec& spec, std::uint64_t seed, const CoupleOptions& opt = {});

/// Little-endian dump: "HCPL", u16 version, u16 N, u64 n, u64 seed, then
/// m_field as u32 and g_field increments as f64, both row-major.
void write_dump(const CoupledRealization& r, std::ostream& out);
CoupledRealization read_dump(std::istream& in);

}  // namespace hc
