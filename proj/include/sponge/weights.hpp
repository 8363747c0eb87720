#pragma once

#include <sponge/error.hpp>
#include <sponge/projection.hpp>
#include <sponge/rational.hpp>
#include <sponge/system.hpp>

#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

namespace sponge {

inline double scalar_log(const Rational& q) { return log_of(q); }
inline double scalar_log(double x) { return std::log(x); }
inline double scalar_to_double(const Rational& q) { return q.get_d(); }
inline double scalar_to_double(double x) { return x; }

template <class Scalar>
inline bool scalar_close(const Scalar& a, const Scalar& b) {
  if constexpr (std::is_same_v<Scalar, Rational>)
    return a == b;
  else
    return std::abs(a - b) <= 1e-12;
}

/// Projected weights p_n^σ and conditional weights P_{n-1}^σ for one
/// ordering. Scalar is Rational for exact input weights and double for
/// weights built from logarithms (natural measures).
template <class Scalar>
class WeightSystem {
 public:
  const ProjectionStructure& structure() const noexcept { return ps_; }
  const Ordering& sigma() const noexcept { return ps_.sigma(); }
  const std::vector<Scalar>& p() const noexcept { return p_; }

  /// p_n^σ(i) for i ∈ I_n^σ; level 0 is the root with weight one.
  Scalar projected(int n, int i) const {
    if (n == 0) return Scalar(1);
    return proj_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
  }

  /// P_{n-1}^σ(i) = p_n(i) / p_{n-1}(Π_{n-1} i) for i ∈ I_n^σ, 1 <= n <= d.
  Scalar conditional(int n, int i) const {
    Scalar parent = projected(n - 1, ps_.project(n - 1, i));
    return Scalar(projected(n, i) / parent);
  }

  template <class S>
  friend WeightSystem<S> project_weights(const SpongeSystem&, const ProjectionStructure&, const std::vector<S>&);

 private:
  ProjectionStructure ps_;
  std::vector<Scalar> p_;
  std::vector<std::vector<Scalar>> proj_;
};

template <class Scalar>
inline void check_probability_vector(const std::vector<Scalar>& p, int n_maps) {
  if (static_cast<int>(p.size()) != n_maps)
    throw PreconditionViolated("weight vector has " + std::to_string(p.size()) + " entries, expected " +
                               std::to_string(n_maps));
  Scalar total(0);
  for (const auto& x : p) {
    if (!(x > 0)) throw PreconditionViolated("weights must be positive");
    total += x;
  }
  if (!scalar_close(total, Scalar(1))) throw PreconditionViolated("weights must sum to one");
}

/// Direct sums over Π_n^σ-preimages, cross-checked against the fibre
/// recursion p_n(i) = Σ_{j ∈ I_{n+1}^{σ,i}} p_{n+1}(j).
template <class Scalar>
WeightSystem<Scalar> project_weights(const SpongeSystem& s, const ProjectionStructure& ps,
                                     const std::vector<Scalar>& p) {
  check_probability_vector(p, s.size());
  const int d = s.dimension();
  const int N = s.size();
  WeightSystem<Scalar> w;
  w.ps_ = ps;
  w.p_ = p;
  w.proj_.assign(static_cast<std::size_t>(d + 1), std::vector<Scalar>(static_cast<std::size_t>(N), Scalar(0)));
  for (int n = 1; n <= d; ++n)
    for (int j = 0; j < N; ++j)
      w.proj_[static_cast<std::size_t>(n)][static_cast<std::size_t>(ps.project(n, j))] += p[static_cast<std::size_t>(j)];

  for (int n = d - 1; n >= 1; --n)
    for (int i : ps.level(n)) {
      Scalar sum(0);
      for (int j : ps.fibre(n, i)) sum += w.proj_[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(j)];
      if (!scalar_close(sum, w.proj_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)]))
        throw PreconditionViolated("projected weights disagree with the fibre recursion at ordering " +
                                   ps.sigma().str() + " level " + std::to_string(n));
    }
  return w;
}

}  // namespace sponge
