#pragma once

#include <sponge/dimension.hpp>
#include <sponge/error.hpp>
#include <sponge/orderings.hpp>
#include <sponge/roots.hpp>
#include <sponge/separation.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace sponge {

struct MinimizerConfig {
  /// Grid resolution for N <= 3.
  int grid_denominator = 200;
  /// Dirichlet samples for N >= 4.
  int samples = 20000;
  /// Objective evaluations allowed in the refinement pass.
  int refine_budget = 200000;
  std::uint64_t seed = 1;
};

struct MinimizerResult {
  std::vector<double> p_star;
  double value = 0;
};

/// p ↦ max_{σ} S̄(p,σ) with the projection structures built once.
class AssouadObjective {
 public:
  AssouadObjective(const SpongeSystem& s, const std::vector<Ordering>& orderings) : s_(&s) {
    for (const auto& sigma : orderings) structures_.push_back(build_projection_structure(s, sigma));
  }

  double operator()(const std::vector<double>& p) const {
    const int d = s_->dimension();
    const int N = s_->size();
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> proj(static_cast<std::size_t>(d + 1), std::vector<double>(static_cast<std::size_t>(N)));
    for (const auto& ps : structures_) {
      for (int n = 1; n <= d; ++n) {
        auto& row = proj[static_cast<std::size_t>(n)];
        std::fill(row.begin(), row.end(), 0.0);
        for (int j = 0; j < N; ++j) row[static_cast<std::size_t>(ps.project(n, j))] += p[static_cast<std::size_t>(j)];
      }
      double total = 0;
      for (int n = 1; n <= d; ++n) {
        double level = -std::numeric_limits<double>::infinity();
        for (int i : ps.level(n)) {
          double parent = n == 1 ? 1.0 : proj[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(ps.project(n - 1, i))];
          double cond = proj[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] / parent;
          level = std::max(level, std::log(cond) / s_->log_ratio(i, ps.sigma()[n - 1]));
        }
        total += level;
      }
      best = std::max(best, total);
    }
    return best;
  }

 private:
  const SpongeSystem* s_;
  std::vector<ProjectionStructure> structures_;
};

/// Minimises max_{σ ∈ orderings} S̄(p,σ) over the open simplex: a grid (or
/// seeded Dirichlet sample for larger N) then pairwise mass transfers with
/// a halving step.
inline MinimizerResult minimize_assouad_over_p(const SpongeSystem& s, const std::vector<Ordering>& orderings,
                                               const MinimizerConfig& cfg = {}) {
  const int N = s.size();
  AssouadObjective f(s, orderings);
  MinimizerResult best;
  if (N == 1) {
    best.p_star = {1.0};
    best.value = f(best.p_star);
    return best;
  }
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<double>& p) {
    double v = f(p);
    if (v < best.value) {
      best.value = v;
      best.p_star = p;
    }
  };
  const int D = cfg.grid_denominator;
  if (N == 2) {
    for (int k = 1; k < D; ++k) consider({static_cast<double>(k) / D, static_cast<double>(D - k) / D});
  } else if (N == 3) {
    for (int a = 1; a < D; ++a)
      for (int b = 1; a + b < D; ++b)
        consider({static_cast<double>(a) / D, static_cast<double>(b) / D, static_cast<double>(D - a - b) / D});
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> p(static_cast<std::size_t>(N));
    consider(std::vector<double>(static_cast<std::size_t>(N), 1.0 / N));
    for (int k = 0; k < cfg.samples; ++k) {
      double total = 0;
      for (auto& x : p) total += (x = expo(rng));
      for (auto& x : p) x /= total;
      consider(p);
    }
  }

  int evals = 0;
  for (double h = 1.0 / (2.0 * D); h > 1e-12 && evals < cfg.refine_budget;) {
    bool improved = false;
    for (int a = 0; a < N && evals < cfg.refine_budget; ++a)
      for (int b = 0; b < N && evals < cfg.refine_budget; ++b) {
        if (a == b || best.p_star[static_cast<std::size_t>(a)] <= h) continue;
        auto p = best.p_star;
        p[static_cast<std::size_t>(a)] -= h;
        p[static_cast<std::size_t>(b)] += h;
        double v = f(p);
        ++evals;
        if (v < best.value - 1e-15) {
          best.value = v;
          best.p_star = std::move(p);
          improved = true;
        }
      }
    if (!improved) h /= 2;
  }
  return best;
}

struct GapCertificate {
  double s = 0;
  double t = 0;
  /// Axes were exchanged so that t <= s.
  bool swapped = false;
  int ell = 0;
  double epsilon = 0;
  double first_term = 0;
  /// Second term per k; +inf where 1 - ε a_k^{-s}/(N-1) <= 0.
  std::vector<double> second_terms;
  double delta_F = 0;
  std::vector<double> p_star;
  double inf_estimate = 0;
  /// inf_estimate >= s + delta_F up to 1e-9.
  bool bound_holds = false;
};

/// Uniform-over-k gap bound for a two-axis non-overlapping planar system
/// that is not in the Lalley–Gatzouras class.
inline GapCertificate gap_certificate(const SpongeSystem& sys, const MinimizerConfig& cfg = {}) {
  if (sys.dimension() != 2) throw NotApplicable("gap certificate needs a planar system");
  const int N = sys.size();
  const Ordering xy({0, 1}), yx({1, 0});
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (exact_overlap(sys, i, j, xy, 1) || exact_overlap(sys, i, j, yx, 1))
        throw NotApplicable("maps " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                            " overlap exactly on a coordinate axis");
  if (dominates(sys, 0, 1) || dominates(sys, 1, 0))
    throw NotApplicable("one coordinate dominates the other (Lalley-Gatzouras class)");
  auto sep = check_separation(sys, {xy, yx});
  if (!sep.very_strong) throw NotApplicable("very strong separation fails");

  std::vector<double> la(static_cast<std::size_t>(N)), lb(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    la[static_cast<std::size_t>(i)] = sys.log_ratio(i, 0);
    lb[static_cast<std::size_t>(i)] = sys.log_ratio(i, 1);
  }
  auto simdim = [](const std::vector<double>& logs) {
    auto f = [&](double x) {
      double sum = 0;
      for (double l : logs) sum += std::exp(x * l);
      return sum - 1.0;
    };
    if (f(1.0) > 0) throw NotApplicable("axis similarity dimension exceeds 1");
    return bisect_decreasing(f, 0.0, 1.0);
  };
  GapCertificate g;
  g.s = simdim(la);
  g.t = simdim(lb);
  if (g.t > g.s) {
    std::swap(la, lb);
    std::swap(g.s, g.t);
    g.swapped = true;
  }
  const double s = g.s;
  double best_slack = 0;
  g.ell = -1;
  for (int i = 0; i < N; ++i) {
    double slack = std::exp(s * lb[static_cast<std::size_t>(i)]) - std::exp(s * la[static_cast<std::size_t>(i)]);
    if (slack > best_slack) {
      best_slack = slack;
      g.ell = i;
    }
  }
  if (g.ell < 0) throw NotApplicable("no map with b^s > a^s");
  g.epsilon = best_slack / 2;
  const auto l = static_cast<std::size_t>(g.ell);
  g.first_term = std::log(std::exp(s * la[l]) + g.epsilon) / lb[l] - s;
  g.delta_F = g.first_term;
  for (int k = 0; k < N; ++k) {
    double arg = 1.0 - g.epsilon * std::exp(-s * la[static_cast<std::size_t>(k)]) / (N - 1);
    double term = arg > 0 ? std::log(arg) / la[static_cast<std::size_t>(k)] : std::numeric_limits<double>::infinity();
    g.second_terms.push_back(term);
    g.delta_F = std::min(g.delta_F, term);
  }
  auto sets = compute_ordering_sets(sys);
  auto mr = minimize_assouad_over_p(sys, sets.B_orderings(), cfg);
  g.p_star = mr.p_star;
  g.inf_estimate = mr.value;
  g.bound_holds = g.inf_estimate >= s + g.delta_F - 1e-9;
  return g;
}

}  // namespace sponge
