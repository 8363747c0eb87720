#pragma once

#include <sponge/error.hpp>
#include <sponge/orderings.hpp>
#include <sponge/projection.hpp>
#include <sponge/stopping.hpp>
#include <sponge/weights.hpp>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

namespace sponge {

/// Symbolic r-approximate cube around an eventually periodic word.
struct ApproximateCube {
  WordSpec base;
  Rational r;
  Ordering sigma;
  ProjectionStructure structure;
  /// L[n-1] = L(r, σ_n), nonincreasing in n.
  std::vector<std::size_t> L;
  /// blocks[n-1] = (Π_n i_ℓ) for L(r,σ_{n+1}) < ℓ <= L(r,σ_n).
  std::vector<std::vector<int>> blocks;

  /// L(r, σ_{n+1}) with the convention L(r, σ_{d+1}) = 0.
  std::size_t block_start(int n) const { return n >= sigma.size() ? 0 : L[static_cast<std::size_t>(n)]; }
  std::size_t length() const { return L.front(); }
};

inline ApproximateCube approximate_cube(const SpongeSystem& s, WordProducts& wp, const Rational& r, double log_r) {
  const int d = s.dimension();
  ApproximateCube c;
  c.base = wp.word();
  c.r = r;
  c.sigma = cube_ordering(wp, r, log_r);
  c.structure = build_projection_structure(s, c.sigma);
  for (int n = 0; n < d; ++n) c.L.push_back(wp.stopping_time(c.sigma[n], r, log_r));
  for (int n = 1; n <= d; ++n) {
    std::vector<int> block;
    for (std::size_t l = c.block_start(n) + 1; l <= c.L[static_cast<std::size_t>(n - 1)]; ++l)
      block.push_back(c.structure.project(n, c.base.at(l - 1)));
    c.blocks.push_back(std::move(block));
  }
  return c;
}

inline ApproximateCube approximate_cube(const SpongeSystem& s, const WordSpec& w, const Rational& r) {
  if (r <= 0 || r >= 1) throw PreconditionViolated("scale must lie in (0,1)");
  WordProducts wp(s, w);
  return approximate_cube(s, wp, r, log_of(r));
}

/// The two product forms of the cube measure: over blocks with projected
/// weights, and over full prefixes with conditional weights.
template <class Scalar>
struct CubeMeasureForms {
  Scalar projected;
  Scalar conditional;
};

template <class Scalar>
CubeMeasureForms<Scalar> cube_measure_forms(const WeightSystem<Scalar>& w, const ApproximateCube& c) {
  if (!(w.sigma() == c.sigma)) throw PreconditionViolated("weights built for " + w.sigma().str() +
                                                          ", cube is " + c.sigma.str());
  const int d = c.sigma.size();
  CubeMeasureForms<Scalar> out{Scalar(1), Scalar(1)};
  for (int n = 1; n <= d; ++n)
    for (int sym : c.blocks[static_cast<std::size_t>(n - 1)]) out.projected *= w.projected(n, sym);
  for (int n = 1; n <= d; ++n)
    for (std::size_t l = 1; l <= c.L[static_cast<std::size_t>(n - 1)]; ++l)
      out.conditional *= w.conditional(n, c.structure.project(n, c.base.at(l - 1)));
  return out;
}

/// μ_p of the cube; both product forms are evaluated and must agree.
template <class Scalar>
Scalar cube_measure(const WeightSystem<Scalar>& w, const ApproximateCube& c) {
  auto f = cube_measure_forms(w, c);
  if (!scalar_close(f.projected, f.conditional))
    throw Error("cube measure forms disagree at " + c.sigma.str());
  return f.projected;
}

template <class Scalar>
Scalar cube_measure(const SpongeSystem& s, const std::vector<Scalar>& p, const WordSpec& word, const Rational& r) {
  auto c = approximate_cube(s, word, r);
  return cube_measure(project_weights(s, c.structure, p), c);
}

/// Weight systems per ordering, built on first use.
template <class Scalar>
class MeasureContext {
 public:
  MeasureContext(const SpongeSystem& s, std::vector<Scalar> p) : s_(&s), p_(std::move(p)) {
    check_probability_vector(p_, s.size());
  }

  const SpongeSystem& system() const noexcept { return *s_; }
  const std::vector<Scalar>& p() const noexcept { return p_; }

  const WeightSystem<Scalar>& weights(const Ordering& sigma) {
    auto it = cache_.find(sigma);
    if (it == cache_.end())
      it = cache_.emplace(sigma, project_weights(*s_, build_projection_structure(*s_, sigma), p_)).first;
    return it->second;
  }

  /// log μ_p(B_i(r)) via the projected-weights form.
  double log_measure(const ApproximateCube& c) {
    const auto& w = weights(c.sigma);
    double total = 0;
    for (int n = 1; n <= c.sigma.size(); ++n)
      for (int sym : c.blocks[static_cast<std::size_t>(n - 1)]) total += scalar_log(w.projected(n, sym));
    return total;
  }

 private:
  const SpongeSystem* s_;
  std::vector<Scalar> p_;
  std::map<Ordering, WeightSystem<Scalar>> cache_;
};

/// The block-product form evaluated with ordering omega instead of the
/// cube's own ordering. Valid for omega that only permutes coordinates
/// whose stopping times tie.
template <class Scalar>
Scalar cube_measure_with_ordering(const SpongeSystem& s, const std::vector<Scalar>& p, const ApproximateCube& c,
                                  const Ordering& omega) {
  const int d = s.dimension();
  std::vector<std::size_t> by_coord(static_cast<std::size_t>(d));
  for (int n = 0; n < d; ++n) by_coord[static_cast<std::size_t>(c.sigma[n])] = c.L[static_cast<std::size_t>(n)];
  for (int n = 0; n < d; ++n)
    if (by_coord[static_cast<std::size_t>(omega[n])] != c.L[static_cast<std::size_t>(n)])
      throw PreconditionViolated(omega.str() + " does not only permute tied stopping times");
  auto ps = build_projection_structure(s, omega);
  auto w = project_weights(s, ps, p);
  Scalar total(1);
  for (int n = 1; n <= d; ++n) {
    std::size_t start = n == d ? 0 : c.L[static_cast<std::size_t>(n)];
    for (std::size_t l = start + 1; l <= c.L[static_cast<std::size_t>(n - 1)]; ++l)
      total *= w.projected(n, ps.project(n, c.base.at(l - 1)));
  }
  return total;
}

/// Every ordering obtained from the cube's ordering by permuting within
/// runs of equal stopping times (the cube's own ordering included).
inline std::vector<Ordering> tied_block_permutations(const ApproximateCube& c) {
  const int d = c.sigma.size();
  std::vector<std::vector<int>> runs;
  for (int n = 0; n < d; ++n) {
    if (n == 0 || c.L[static_cast<std::size_t>(n)] != c.L[static_cast<std::size_t>(n - 1)]) runs.emplace_back();
    runs.back().push_back(c.sigma[n]);
  }
  std::vector<std::vector<int>> acc{{}};
  for (auto run : runs) {
    std::sort(run.begin(), run.end());
    std::vector<std::vector<int>> next;
    do {
      for (const auto& prefix : acc) {
        auto v = prefix;
        v.insert(v.end(), run.begin(), run.end());
        next.push_back(std::move(v));
      }
    } while (std::next_permutation(run.begin(), run.end()));
    acc = std::move(next);
  }
  std::vector<Ordering> out;
  for (auto& v : acc) out.emplace_back(std::move(v));
  return out;
}

struct BruteForceLimits {
  std::size_t max_length = 14;
  std::size_t max_leaves = 5000000;
};

/// Sums ∏ p(j_ℓ) over every length-L(r,σ_1) word j whose projections agree
/// with the base word up to each coordinate's stopping time. Agreement is
/// tested with exact_overlap directly, independent of the projection maps.
template <class Scalar>
Scalar brute_force_cube_measure(const SpongeSystem& s, const std::vector<Scalar>& p, const WordSpec& word,
                                const Rational& r, const BruteForceLimits& lim = {}) {
  if (r <= 0 || r >= 1) throw PreconditionViolated("scale must lie in (0,1)");
  check_probability_vector(p, s.size());
  const int d = s.dimension();
  const int N = s.size();
  WordProducts wp(s, word);
  double log_r = log_of(r);
  Ordering sigma = cube_ordering(wp, r, log_r);
  std::vector<std::size_t> L;
  for (int n = 0; n < d; ++n) L.push_back(wp.stopping_time(sigma[n], r, log_r));
  const std::size_t K = L.front();
  if (K > lim.max_length)
    throw CapExceeded("cube length " + std::to_string(K) + " exceeds " + std::to_string(lim.max_length));

  // Allowed letters per position.
  std::vector<std::vector<int>> allowed(K);
  for (std::size_t l = 1; l <= K; ++l) {
    int base = word.at(l - 1);
    for (int j = 0; j < N; ++j) {
      bool ok = true;
      for (int n = 1; n <= d && ok; ++n)
        if (l <= L[static_cast<std::size_t>(n - 1)]) ok = exact_overlap(s, base, j, sigma, n);
      if (ok) allowed[l - 1].push_back(j);
    }
  }
  std::size_t leaves = 0;
  Scalar total(0);
  std::function<void(std::size_t, const Scalar&)> dfs = [&](std::size_t pos, const Scalar& weight) {
    if (pos == K) {
      if (++leaves > lim.max_leaves) throw CapExceeded("cube has more than " + std::to_string(lim.max_leaves) + " cylinders");
      total += weight;
      return;
    }
    for (int j : allowed[pos]) dfs(pos + 1, Scalar(weight * p[static_cast<std::size_t>(j)]));
  };
  dfs(0, Scalar(1));
  return total;
}

}  // namespace sponge
