#pragma once

#include <sponge/error.hpp>
#include <sponge/orderings.hpp>
#include <sponge/projection.hpp>
#include <sponge/roots.hpp>
#include <sponge/separation.hpp>
#include <sponge/weights.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace sponge {

/// Root of Σ_{j ∈ I_{n+1}^{σ,i}} (λ_j^{(σ_{n+1})})^s = 1, for 0 <= n < d.
/// Use i = ProjectionStructure::kRoot at level 0.
inline double fibre_similarity_dimension(const SpongeSystem& s, const ProjectionStructure& ps, int n, int i) {
  auto fibre = ps.fibre(n, i);
  if (fibre.empty()) throw PreconditionViolated("empty fibre");
  if (fibre.size() == 1) return 0.0;
  const int coord = ps.sigma()[n];
  std::vector<double> logs;
  for (int j : fibre) logs.push_back(s.log_ratio(j, coord));
  auto f = [&](double x) {
    double sum = 0;
    for (double l : logs) sum += std::exp(x * l);
    return sum - 1.0;
  };
  Rational total = 0;
  for (int j : fibre) total += s.ratio(j, coord);
  if (total == 1) return 1.0;
  if (total > 1) throw RootOutOfUnitInterval("fibre similarity dimension exceeds 1 at ordering " +
                                              ps.sigma().str() + " level " + std::to_string(n));
  return bisect_decreasing(f, 0.0, 1.0);
}

/// s_n^σ(i) for 0 <= n < d and i ∈ I_n^σ.
struct FibreDimensions {
  Ordering sigma;
  std::vector<std::vector<double>> values;

  double at(int n, int i) const {
    return values[static_cast<std::size_t>(n)][n == 0 ? 0 : static_cast<std::size_t>(i)];
  }
};

inline FibreDimensions fibre_dimensions(const SpongeSystem& s, const ProjectionStructure& ps) {
  const int d = s.dimension();
  FibreDimensions out{ps.sigma(), std::vector<std::vector<double>>(static_cast<std::size_t>(d))};
  out.values[0] = {fibre_similarity_dimension(s, ps, 0, ProjectionStructure::kRoot)};
  for (int n = 1; n < d; ++n) {
    out.values[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(s.size()), 0.0);
    for (int i : ps.level(n)) out.values[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] =
        fibre_similarity_dimension(s, ps, n, i);
  }
  return out;
}

/// q^σ(i) = ∏_n (λ_{Π_n i}^{(σ_n)})^{s_{n-1}(Π_{n-1} i)}.
inline std::vector<double> natural_measure(const SpongeSystem& s, const ProjectionStructure& ps,
                                           const FibreDimensions& fd) {
  std::vector<double> q(static_cast<std::size_t>(s.size()), 0.0);
  for (int i = 0; i < s.size(); ++i) {
    double logq = 0;
    for (int n = 1; n <= s.dimension(); ++n)
      logq += fd.at(n - 1, ps.project(n - 1, i)) * s.log_ratio(ps.project(n, i), ps.sigma()[n - 1]);
    q[static_cast<std::size_t>(i)] = std::exp(logq);
  }
  return q;
}

inline std::vector<double> natural_measure(const SpongeSystem& s, const ProjectionStructure& ps) {
  return natural_measure(s, ps, fibre_dimensions(s, ps));
}

/// Per-level extremisers k_n and terms s_n of log P_{n-1}(i) / log λ_i^{(σ_n)}
/// over i ∈ I_n^σ, plus their sum. Ties go to the smallest index.
struct LevelExtrema {
  std::vector<int> arg;
  std::vector<double> term;
  double total = 0;
};

template <class Scalar>
double level_term(const SpongeSystem& s, const WeightSystem<Scalar>& w, int n, int i) {
  return scalar_log(w.conditional(n, i)) / s.log_ratio(i, w.sigma()[n - 1]);
}

namespace detail {
template <class Scalar>
LevelExtrema level_extrema(const SpongeSystem& s, const WeightSystem<Scalar>& w, bool upper) {
  constexpr double tie = 1e-12;
  LevelExtrema out;
  for (int n = 1; n <= s.dimension(); ++n) {
    int best_i = -1;
    double best = 0;
    for (int i : w.structure().level(n)) {
      double v = level_term(s, w, n, i);
      if (best_i < 0 || (upper ? v > best + tie : v < best - tie)) {
        best = v;
        best_i = i;
      }
    }
    out.arg.push_back(best_i);
    out.term.push_back(best);
    out.total += best;
  }
  return out;
}
}  // namespace detail

template <class Scalar>
LevelExtrema S_upper(const SpongeSystem& s, const WeightSystem<Scalar>& w) {
  return detail::level_extrema(s, w, true);
}

template <class Scalar>
LevelExtrema S_lower(const SpongeSystem& s, const WeightSystem<Scalar>& w) {
  return detail::level_extrema(s, w, false);
}

struct OrderingDimensions {
  Ordering sigma;
  bool in_B = false;
  bool in_A_lower = false;
  LevelExtrema upper;
  LevelExtrema lower;
};

struct DimensionBounds {
  double assouad_lo = 0;
  double assouad_hi = 0;
  double lower_lo = 0;
  double lower_hi = 0;
  /// Both bracket pairs close within 1e-9.
  bool exact = false;
  /// A_lower and A_upper coincide.
  bool orderings_exact = false;
  /// Very strong separation held; otherwise the values are formula values only.
  bool hypothesis_met = false;
  std::vector<OrderingDimensions> per_ordering;
};

inline constexpr double kDimensionTie = 1e-9;

template <class Scalar>
DimensionBounds dimension_bounds(const SpongeSystem& s, const OrderingSets& sets, const SeparationReport& sep,
                                 const std::vector<Scalar>& p, bool formula_only = false) {
  if (!sep.very_strong && !formula_only)
    throw SeparationNotVerified("very strong separation fails" +
                                (sep.first_violation.empty() ? std::string() : ": " + sep.first_violation));
  if (sets.B.empty()) throw PreconditionViolated("no ordering is certified in B");
  DimensionBounds out;
  out.hypothesis_met = sep.very_strong;
  out.orderings_exact = sets.exact;
  out.assouad_lo = out.assouad_hi = -std::numeric_limits<double>::infinity();
  out.lower_lo = out.lower_hi = std::numeric_limits<double>::infinity();
  for (const auto& sigma : sets.A_upper) {
    auto ps = build_projection_structure(s, sigma);
    auto w = project_weights(s, ps, p);
    OrderingDimensions od{sigma, sets.in_B(sigma), sets.in_A_lower(sigma), S_upper(s, w), S_lower(s, w)};
    out.assouad_hi = std::max(out.assouad_hi, od.upper.total);
    out.lower_lo = std::min(out.lower_lo, od.lower.total);
    if (od.in_B) {
      out.assouad_lo = std::max(out.assouad_lo, od.upper.total);
      out.lower_hi = std::min(out.lower_hi, od.lower.total);
    }
    out.per_ordering.push_back(std::move(od));
  }
  out.exact = std::abs(out.assouad_hi - out.assouad_lo) <= kDimensionTie &&
              std::abs(out.lower_hi - out.lower_lo) <= kDimensionTie;
  return out;
}

template <class Scalar>
DimensionBounds dimension_bounds(const SpongeSystem& s, const std::vector<Scalar>& p, bool formula_only = false,
                                 const WitnessSearchConfig& cfg = {}) {
  auto sets = compute_ordering_sets(s, cfg);
  auto sep = check_separation(s, sets.A_upper);
  return dimension_bounds(s, sets, sep, p, formula_only);
}

/// For q = q^σ: log Q_{n-1}(i) / log λ_i^{(σ_n)} = s_{n-1}(Π_{n-1} i) for all
/// n and i ∈ I_n^σ, each to 1e-12, and Σ q = 1 to 1e-12.
inline bool natural_measure_identity_check(const SpongeSystem& s, const ProjectionStructure& ps,
                                           double tol = 1e-12) {
  auto fd = fibre_dimensions(s, ps);
  auto q = natural_measure(s, ps, fd);
  double total = 0;
  for (double x : q) total += x;
  if (std::abs(total - 1.0) > tol) return false;
  // Renormalise away the last-bit rounding before projecting.
  for (double& x : q) x /= total;
  auto w = project_weights(s, ps, q);
  for (int n = 1; n <= s.dimension(); ++n)
    for (int i : ps.level(n)) {
      double lhs = level_term(s, w, n, i);
      double rhs = fd.at(n - 1, ps.project(n - 1, i));
      if (std::abs(lhs - rhs) > tol) return false;
    }
  return true;
}

/// s_0(∅) + Σ_{n<d} max_i s_n(i) (or min), the closed form of S̄ / S̲ at q^σ.
inline double natural_closed_form(const FibreDimensions& fd, const ProjectionStructure& ps, bool upper) {
  double total = fd.at(0, ProjectionStructure::kRoot);
  for (int n = 1; n < ps.dimension(); ++n) {
    double best = upper ? -1.0 : 2.0;
    for (int i : ps.level(n)) best = upper ? std::max(best, fd.at(n, i)) : std::min(best, fd.at(n, i));
    total += best;
  }
  return total;
}

}  // namespace sponge
