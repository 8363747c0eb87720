#pragma once

#include <sponge/system.hpp>

#include <cstddef>
#include <vector>

namespace sponge {

/// The index chain I_d ⊇ ... ⊇ I_1 for one ordering together with the
/// symbol projections Π_n: I -> I_n. Level 0 is the single root symbol
/// kRoot, so Π_0 maps everything there.
class ProjectionStructure {
 public:
  static constexpr int kRoot = -1;

  const Ordering& sigma() const noexcept { return sigma_; }
  int dimension() const noexcept { return sigma_.size(); }
  int alphabet_size() const noexcept { return n_maps_; }

  /// I_n for 1 <= n <= d, ascending.
  const std::vector<int>& level(int n) const { return levels_[static_cast<std::size_t>(n)]; }

  bool contains(int n, int i) const {
    if (n == 0) return i == kRoot;
    return member_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
  }

  /// Π_n j for 0 <= n <= d.
  int project(int n, int j) const {
    if (n == 0) return kRoot;
    return project_[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)];
  }

  /// I_{n+1}^{i}: symbols of level n+1 lying above i in I_n (0 <= n < d).
  std::vector<int> fibre(int n, int i) const {
    std::vector<int> out;
    for (int j : level(n + 1))
      if (project(n, j) == i) out.push_back(j);
    return out;
  }

  friend ProjectionStructure build_projection_structure(const SpongeSystem&, const Ordering&);

 private:
  Ordering sigma_;
  int n_maps_ = 0;
  std::vector<std::vector<int>> levels_;
  std::vector<std::vector<bool>> member_;
  std::vector<std::vector<int>> project_;
};

/// Pair scan: for i < j in lexicographic order find the largest n' < d with
/// exact overlap on E_{n'} and drop j from I_{n'}, ..., I_1. The surviving
/// representative of an overlap class on E_n is its smallest index.
inline ProjectionStructure build_projection_structure(const SpongeSystem& s, const Ordering& sigma) {
  const int d = s.dimension();
  const int N = s.size();
  ProjectionStructure ps;
  ps.sigma_ = sigma;
  ps.n_maps_ = N;
  ps.member_.assign(static_cast<std::size_t>(d + 1), std::vector<bool>(static_cast<std::size_t>(N), true));
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      for (int n = d - 1; n >= 1; --n)
        if (exact_overlap(s, i, j, sigma, n)) {
          for (int m = n; m >= 1; --m)
            ps.member_[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)] = false;
          break;
        }

  ps.levels_.assign(static_cast<std::size_t>(d + 1), {});
  ps.project_.assign(static_cast<std::size_t>(d + 1), std::vector<int>(static_cast<std::size_t>(N), 0));
  for (int n = 1; n <= d; ++n) {
    auto& lvl = ps.levels_[static_cast<std::size_t>(n)];
    for (int i = 0; i < N; ++i)
      if (ps.member_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)]) lvl.push_back(i);
    for (int j = 0; j < N; ++j) {
      int rep = j;
      for (int i : lvl)
        if (exact_overlap(s, i, j, sigma, n)) {
          rep = i;
          break;
        }
      ps.project_[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] = rep;
    }
  }
  return ps;
}

}  // namespace sponge
