#pragma once

#include <sponge/system.hpp>

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace sponge {

/// Prefix contraction products ∏_{l<=L} λ_{w_l}^{(n)} of one word, extended
/// lazily. Comparisons go through cumulative logs and fall back to exact
/// rationals whenever the logs cannot separate the two sides.
class WordProducts {
 public:
  WordProducts(const SpongeSystem& s, WordSpec w)
      : s_(&s), word_(std::move(w)),
        logs_(static_cast<std::size_t>(s.dimension()), std::vector<double>{0.0}),
        exact_(static_cast<std::size_t>(s.dimension()), std::vector<Rational>{Rational(1)}) {}

  const WordSpec& word() const noexcept { return word_; }
  const SpongeSystem& system() const noexcept { return *s_; }

  double log_product(int n, std::size_t len) {
    extend_logs(len);
    return logs_[static_cast<std::size_t>(n)][len];
  }

  const Rational& product(int n, std::size_t len) {
    auto& ex = exact_[static_cast<std::size_t>(n)];
    while (ex.size() <= len) {
      Rational next = ex.back() * s_->ratio(word_.at(ex.size() - 1), n);
      ex.push_back(std::move(next));
    }
    return ex[len];
  }

  /// Sign of P_a(len_a) - P_b(len_b).
  int compare(int coord_a, std::size_t len_a, int coord_b, std::size_t len_b) {
    double diff = log_product(coord_a, len_a) - log_product(coord_b, len_b);
    if (diff < -kLogTol) return -1;
    if (diff > kLogTol) return 1;
    return cmp(product(coord_a, len_a), product(coord_b, len_b));
  }

  /// P_n(len) <= r.
  bool at_or_below(int n, std::size_t len, const Rational& r, double log_r) {
    double diff = log_product(n, len) - log_r;
    if (diff < -kLogTol) return true;
    if (diff > kLogTol) return false;
    return product(n, len) <= r;
  }

  /// The r-stopping L: P_n(L) <= r < P_n(L-1). Requires 0 < r < 1.
  std::size_t stopping_time(int n, const Rational& r) { return stopping_time(n, r, log_of(r)); }

  std::size_t stopping_time(int n, const Rational& r, double log_r) {
    auto& lg = logs_[static_cast<std::size_t>(n)];
    std::size_t hi = 1;
    while (true) {
      extend_logs(hi);
      if (lg[hi] < log_r - kLogTol) break;
      if (at_or_below(n, hi, r, log_r)) break;
      hi *= 2;
    }
    std::size_t lo = hi / 2 + 1;
    if (hi == 1) return 1;
    // smallest L in [lo, hi] with P(L) <= r; P(lo - 1) > r holds already.
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (at_or_below(n, mid, r, log_r))
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

 private:
  static constexpr double kLogTol = 1e-8;

  void extend_logs(std::size_t len) {
    const int d = s_->dimension();
    auto& first = logs_.front();
    while (first.size() <= len) {
      std::size_t pos = first.size() - 1;
      int letter = word_.at(pos);
      for (int n = 0; n < d; ++n) {
        auto& lg = logs_[static_cast<std::size_t>(n)];
        lg.push_back(lg.back() + s_->log_ratio(letter, n));
      }
    }
  }

  const SpongeSystem* s_;
  WordSpec word_;
  std::vector<std::vector<double>> logs_;
  std::vector<std::vector<Rational>> exact_;
};

/// r-stopping of w in coordinate n (0-based), exact.
inline std::size_t stopping_time(const SpongeSystem& s, const WordSpec& w, const Rational& r, int n) {
  if (r <= 0 || r >= 1) throw PreconditionViolated("scale must lie in (0,1)");
  WordProducts wp(s, w);
  return wp.stopping_time(n, r);
}

struct ProjectedPoint {
  std::vector<Rational> point;
  /// Per-coordinate bound on |point - π(w)|.
  std::vector<Rational> error;
};

/// f_{w_1...w_depth}(0) and the side lengths of the depth-level cylinder.
inline ProjectedPoint evaluate_projection_point(const SpongeSystem& s, const WordSpec& w, std::size_t depth) {
  const int d = s.dimension();
  ProjectedPoint out{std::vector<Rational>(static_cast<std::size_t>(d), Rational(0)),
                     std::vector<Rational>(static_cast<std::size_t>(d), Rational(1))};
  for (std::size_t k = depth; k-- > 0;) {
    int letter = w.at(k);
    for (int n = 0; n < d; ++n) {
      auto idx = static_cast<std::size_t>(n);
      out.point[idx] = s.ratio(letter, n) * out.point[idx] + s.translation(letter, n);
      out.error[idx] *= s.ratio(letter, n);
    }
  }
  return out;
}

}  // namespace sponge
