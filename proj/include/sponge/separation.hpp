#pragma once

#include <sponge/system.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sponge {

struct SeparationReport {
  bool sppc = true;
  bool very_strong = true;
  /// Minimum gap over non-overlapping projected first-level boxes, measured
  /// as the largest per-coordinate interval gap (a lower bound on the
  /// Euclidean distance). Set only when very_strong holds.
  std::optional<Rational> delta0;
  /// First offending (sigma, n, i, j) for diagnostics, 1-based text.
  std::string first_violation;
};

/// Separation-of-principal-projections check over the given orderings.
/// Open-box disjointness decides the plain condition, closed boxes the
/// very strong one. Exact rational interval arithmetic throughout.
inline SeparationReport check_separation(const SpongeSystem& s, const std::vector<Ordering>& orderings) {
  SeparationReport rep;
  const int d = s.dimension();
  const int N = s.size();
  std::optional<Rational> min_gap;
  for (const auto& sigma : orderings)
    for (int n = 1; n <= d; ++n)
      for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
          if (exact_overlap(s, i, j, sigma, n)) continue;
          // Largest per-coordinate gap between the projected boxes; a
          // positive gap separates closed boxes, a zero gap separates only
          // the open ones.
          std::optional<Rational> best;
          for (int m = 0; m < n; ++m) {
            int c = sigma[m];
            Rational lo_i = s.translation(i, c), hi_i = lo_i + s.ratio(i, c);
            Rational lo_j = s.translation(j, c), hi_j = lo_j + s.ratio(j, c);
            Rational gap = lo_j >= hi_i ? Rational(lo_j - hi_i)
                                        : (lo_i >= hi_j ? Rational(lo_i - hi_j) : Rational(-1));
            if (gap >= 0 && (!best || gap > *best)) best = gap;
          }
          std::string where = "ordering " + sigma.str() + " level " + std::to_string(n) + " maps " +
                              std::to_string(i + 1) + "," + std::to_string(j + 1);
          if (!best) {
            if (rep.first_violation.empty()) rep.first_violation = where + " (open boxes intersect)";
            rep.sppc = false;
            rep.very_strong = false;
          } else if (*best == 0) {
            if (rep.first_violation.empty()) rep.first_violation = where + " (closed boxes touch)";
            rep.very_strong = false;
          } else if (!min_gap || *best < *min_gap) {
            min_gap = *best;
          }
        }
  if (rep.very_strong) rep.delta0 = min_gap.value_or(Rational(1));
  return rep;
}

}  // namespace sponge
