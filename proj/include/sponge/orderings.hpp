#pragma once

#include <sponge/error.hpp>
#include <sponge/lp.hpp>
#include <sponge/stopping.hpp>
#include <sponge/system.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sponge {

using HighReal = boost::multiprecision::cpp_bin_float_50;

inline HighReal to_high(const Rational& q) {
  return HighReal(q.get_num().get_str()) / HighReal(q.get_den().get_str());
}

inline HighReal high_log(const Rational& q) { return boost::multiprecision::log(to_high(q)); }

/// χ_x(p) = -Σ_i p(i) log λ_i^{(x)} for every coordinate x.
struct LyapunovProfile {
  std::vector<double> p;
  std::vector<double> chi;
};

inline LyapunovProfile lyapunov_profile(const SpongeSystem& s, std::vector<double> p) {
  LyapunovProfile out{std::move(p), std::vector<double>(static_cast<std::size_t>(s.dimension()), 0.0)};
  for (int x = 0; x < s.dimension(); ++x)
    for (int i = 0; i < s.size(); ++i)
      out.chi[static_cast<std::size_t>(x)] -= out.p[static_cast<std::size_t>(i)] * s.log_ratio(i, x);
  return out;
}

/// Cube ordering at scale r: coordinates sorted by stopping time, latest
/// first. Equal stopping times are ordered by the length-L products,
/// larger first, and then by coordinate index.
inline Ordering cube_ordering(WordProducts& wp, const Rational& r, double log_r) {
  const int d = wp.system().dimension();
  std::vector<std::size_t> L(static_cast<std::size_t>(d));
  for (int n = 0; n < d; ++n) L[static_cast<std::size_t>(n)] = wp.stopping_time(n, r, log_r);
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    auto La = L[static_cast<std::size_t>(a)], Lb = L[static_cast<std::size_t>(b)];
    if (La != Lb) return La > Lb;
    int c = wp.compare(a, La, b, La);
    if (c != 0) return c > 0;
    return a < b;
  });
  return Ordering(std::move(perm));
}

inline Ordering cube_ordering(const SpongeSystem& s, const WordSpec& w, const Rational& r) {
  if (r <= 0 || r >= 1) throw PreconditionViolated("scale must lie in (0,1)");
  WordProducts wp(s, w);
  return cube_ordering(wp, r, log_of(r));
}

/// The ordering σ for which w determines a strictly σ-ordered cylinder at
/// scale r, evaluated at length L(r, σ_d); nullopt when products tie.
inline std::optional<Ordering> strict_cylinder_ordering(const SpongeSystem& s, const WordSpec& w,
                                                        const Rational& r) {
  if (r <= 0 || r >= 1) throw PreconditionViolated("scale must lie in (0,1)");
  const int d = s.dimension();
  WordProducts wp(s, w);
  double log_r = log_of(r);
  for (int last = 0; last < d; ++last) {
    std::size_t K = wp.stopping_time(last, r, log_r);
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b) { return wp.compare(a, K, b, K) > 0; });
    bool strict = true;
    for (int k = 0; k + 1 < d && strict; ++k)
      strict = wp.compare(perm[static_cast<std::size_t>(k)], K, perm[static_cast<std::size_t>(k + 1)], K) > 0;
    if (strict && perm.back() == last) return Ordering(std::move(perm));
  }
  return std::nullopt;
}

enum class CertificateKind { CylinderStrict, Cube };

/// Membership evidence. Cylinder-strict certificates carry a rational
/// probability vector with a strict Lyapunov chain; cube certificates carry
/// a word and an exact scale.
struct OrderingCertificate {
  Ordering sigma;
  CertificateKind kind = CertificateKind::CylinderStrict;
  std::vector<Rational> p;
  WordSpec word;
  Rational scale;
  double slack = 0;
};

/// Maximum over the probability simplex of the smallest consecutive gap
/// χ_{σ_{k+1}} - χ_{σ_k}, with an optimal p.
struct SlackResult {
  double slack = 0;
  std::vector<double> p;
};

inline SlackResult max_slack(const SpongeSystem& s, const Ordering& sigma) {
  const int d = s.dimension();
  const int N = s.size();
  // g[k][i]: contribution of map i to the k-th gap.
  std::vector<std::vector<double>> g(static_cast<std::size_t>(std::max(d - 1, 0)),
                                     std::vector<double>(static_cast<std::size_t>(N)));
  double M = 1.0;
  for (int k = 0; k + 1 < d; ++k)
    for (int i = 0; i < N; ++i) {
      double v = s.log_ratio(i, sigma[k]) - s.log_ratio(i, sigma[k + 1]);
      g[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = v;
      M = std::max(M, std::abs(v) + 1.0);
    }
  SlackResult out;
  if (d == 1) {
    out.slack = std::numeric_limits<double>::infinity();
    out.p.assign(static_cast<std::size_t>(N), 1.0 / N);
    return out;
  }
  if (N == 1) {
    out.slack = std::numeric_limits<double>::infinity();
    for (const auto& row : g) out.slack = std::min(out.slack, row[0]);
    out.p = {1.0};
    return out;
  }
  // Variables p_1..p_{N-1} and t' = t + M >= 0; p_N = 1 - Σ p_i.
  const std::size_t nv = static_cast<std::size_t>(N);
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (int k = 0; k + 1 < d; ++k) {
    const auto& row = g[static_cast<std::size_t>(k)];
    std::vector<double> a(nv, 0.0);
    for (int i = 0; i + 1 < N; ++i) a[static_cast<std::size_t>(i)] = -(row[static_cast<std::size_t>(i)] - row[nv - 1]);
    a[nv - 1] = 1.0;
    A.push_back(std::move(a));
    b.push_back(row[nv - 1] + M);
  }
  std::vector<double> simplex_row(nv, 1.0);
  simplex_row[nv - 1] = 0.0;
  A.push_back(std::move(simplex_row));
  b.push_back(1.0);
  std::vector<double> c(nv, 0.0);
  c[nv - 1] = 1.0;
  auto sol = lp::maximize(A, b, c);
  out.slack = sol.value - M;
  out.p.assign(nv, 0.0);
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < nv; ++i) {
    out.p[i] = std::max(0.0, sol.x[i]);
    rest -= out.p[i];
  }
  out.p[nv - 1] = std::max(0.0, rest);
  return out;
}

/// True iff the rational p has positive entries summing to one and a strict
/// chain χ_{σ_1} < ... < χ_{σ_d} in 50-digit arithmetic.
inline bool verify_lyapunov_chain(const SpongeSystem& s, const Ordering& sigma, const std::vector<Rational>& p) {
  if (static_cast<int>(p.size()) != s.size()) return false;
  Rational total = 0;
  for (const auto& q : p) {
    if (q <= 0) return false;
    total += q;
  }
  if (total != 1) return false;
  std::vector<HighReal> chi(static_cast<std::size_t>(s.dimension()), HighReal(0));
  for (int x = 0; x < s.dimension(); ++x)
    for (int i = 0; i < s.size(); ++i)
      chi[static_cast<std::size_t>(x)] -= to_high(p[static_cast<std::size_t>(i)]) * high_log(s.ratio(i, x));
  for (int k = 0; k + 1 < s.dimension(); ++k)
    if (!(chi[static_cast<std::size_t>(sigma[k])] < chi[static_cast<std::size_t>(sigma[k + 1])])) return false;
  return true;
}

inline constexpr double kBorderlineBand = 1e-9;

/// Decides σ ∈ ℬ through the strict Lyapunov-chain characterisation.
/// Returns a re-verified rational witness, nullopt when infeasible, and
/// throws BorderlineOrdering when the optimal slack is within the band.
inline std::optional<OrderingCertificate> b_membership(const SpongeSystem& s, const Ordering& sigma,
                                                       double band = kBorderlineBand) {
  auto res = max_slack(s, sigma);
  if (res.slack < -band) return std::nullopt;
  if (res.slack <= band) throw BorderlineOrdering(sigma.str(), res.slack);

  const int N = s.size();
  double slack = std::isinf(res.slack) ? 1.0 : res.slack;
  double G = 0;
  for (int k = 0; k + 1 < s.dimension(); ++k)
    for (int i = 0; i < N; ++i)
      G = std::max(G, std::abs(s.log_ratio(i, sigma[k]) - s.log_ratio(i, sigma[k + 1])));
  // Pull the optimum into the open simplex while keeping half the slack.
  double eta = slack / (2.0 * (slack + G) + 1e-300);
  eta = std::clamp(eta, 1e-12, 0.5);
  std::vector<double> interior(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    interior[static_cast<std::size_t>(i)] = (1.0 - eta) * res.p[static_cast<std::size_t>(i)] + eta / N;

  OrderingCertificate cert;
  cert.sigma = sigma;
  cert.kind = CertificateKind::CylinderStrict;
  cert.slack = res.slack;
  std::vector<Rational> uniform(static_cast<std::size_t>(N), Rational(1, N));
  for (auto& q : uniform) q.canonicalize();
  if (verify_lyapunov_chain(s, sigma, uniform)) {
    cert.p = std::move(uniform);
    return cert;
  }
  for (unsigned long den = 10; den <= 1000000000000UL; den *= 10) {
    std::vector<Rational> q(static_cast<std::size_t>(N));
    Rational used = 0;
    bool positive = true;
    for (int i = 0; i + 1 < N; ++i) {
      auto k = static_cast<long>(std::llround(interior[static_cast<std::size_t>(i)] * static_cast<double>(den)));
      if (k <= 0) positive = false;
      q[static_cast<std::size_t>(i)] = Rational(k, static_cast<long>(den));
      q[static_cast<std::size_t>(i)].canonicalize();
      used += q[static_cast<std::size_t>(i)];
    }
    q.back() = 1 - used;
    if (!positive || q.back() <= 0) continue;
    if (verify_lyapunov_chain(s, sigma, q)) {
      cert.p = std::move(q);
      return cert;
    }
  }
  throw BorderlineOrdering(sigma.str(), res.slack);
}

/// Re-checks a certificate against its defining inequalities.
inline bool verify_certificate(const SpongeSystem& s, const OrderingCertificate& cert) {
  if (cert.kind == CertificateKind::CylinderStrict) return verify_lyapunov_chain(s, cert.sigma, cert.p);
  if (cert.scale <= 0 || cert.scale >= 1) return false;
  return cube_ordering(s, cert.word, cert.scale) == cert.sigma;
}

struct WitnessSearchConfig {
  int max_prefix_len = 12;
  /// Deepest stopping index whose product is tried as a scale; 0 picks
  /// max_prefix_len + 12.
  int scale_depth = 0;
  /// Cap on enumerated words; the prefix length shrinks to fit.
  std::size_t max_words = 400000;
};

/// Searches eventually periodic words for cube witnesses of the requested
/// orderings. Cube orderings are constant between consecutive prefix
/// products of the word, so trying every product as a scale covers each
/// stopping interval exactly once.
inline std::map<Ordering, OrderingCertificate> cube_witness_search(const SpongeSystem& s,
                                                                   const std::vector<Ordering>& wanted,
                                                                   const WitnessSearchConfig& cfg = {}) {
  std::map<Ordering, OrderingCertificate> found;
  std::set<Ordering> open(wanted.begin(), wanted.end());
  if (open.empty()) return found;
  const int N = s.size();
  const int d = s.dimension();

  int max_len = cfg.max_prefix_len;
  auto count_words = [&](int len) {
    std::size_t total = 0, layer = 1;
    for (int k = 0; k <= len; ++k) {
      total += layer * static_cast<std::size_t>(N + 1);
      layer *= static_cast<std::size_t>(N);
    }
    return total;
  };
  while (max_len > 1 && count_words(max_len) > cfg.max_words) --max_len;
  const int depth = cfg.scale_depth > 0 ? cfg.scale_depth : max_len + 12;

  auto try_word = [&](const WordSpec& w) {
    WordProducts wp(s, w);
    for (int n = 0; n < d && !open.empty(); ++n)
      for (int L = 1; L <= depth && !open.empty(); ++L) {
        const Rational& r = wp.product(n, static_cast<std::size_t>(L));
        Ordering sigma = cube_ordering(wp, r, wp.log_product(n, static_cast<std::size_t>(L)));
        if (open.erase(sigma)) {
          OrderingCertificate cert;
          cert.sigma = sigma;
          cert.kind = CertificateKind::Cube;
          cert.word = w;
          cert.scale = r;
          found.emplace(sigma, std::move(cert));
        }
      }
  };

  std::vector<int> prefix;
  for (int len = 0; len <= max_len && !open.empty(); ++len) {
    prefix.assign(static_cast<std::size_t>(len), 0);
    while (true) {
      for (int c = 0; c < N && !open.empty(); ++c) try_word(WordSpec{prefix, {c}});
      if (len > 0 && !open.empty()) try_word(WordSpec{{}, prefix});
      if (open.empty()) break;
      int pos = len - 1;
      while (pos >= 0 && prefix[static_cast<std::size_t>(pos)] == N - 1) prefix[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
      ++prefix[static_cast<std::size_t>(pos)];
    }
  }
  return found;
}

/// 𝒜 and ℬ as certified sets. A_upper is the domination-pruned candidate
/// set; for d <= 3 all three coincide.
struct OrderingSets {
  std::vector<OrderingCertificate> B;
  std::vector<OrderingCertificate> A_lower;
  std::vector<Ordering> A_upper;
  bool exact = false;

  static bool has(const std::vector<OrderingCertificate>& v, const Ordering& s) {
    return std::any_of(v.begin(), v.end(), [&](const auto& c) { return c.sigma == s; });
  }
  bool in_B(const Ordering& s) const { return has(B, s); }
  bool in_A_lower(const Ordering& s) const { return has(A_lower, s); }
  bool in_A_upper(const Ordering& s) const {
    return std::find(A_upper.begin(), A_upper.end(), s) != A_upper.end();
  }
  std::vector<Ordering> B_orderings() const {
    std::vector<Ordering> out;
    for (const auto& c : B) out.push_back(c.sigma);
    return out;
  }
};

inline OrderingSets compute_ordering_sets(const SpongeSystem& s, const WitnessSearchConfig& cfg = {}) {
  OrderingSets out;
  const auto candidates = domination_consistent_orderings(s);
  for (const auto& sigma : candidates)
    if (auto cert = b_membership(s, sigma)) out.B.push_back(std::move(*cert));
  out.A_lower = out.B;
  if (s.dimension() <= 3) {
    out.A_upper = out.B_orderings();
    out.exact = true;
    return out;
  }
  out.A_upper = candidates;
  std::vector<Ordering> missing;
  for (const auto& sigma : candidates)
    if (!out.in_B(sigma)) missing.push_back(sigma);
  for (auto& [sigma, cert] : cube_witness_search(s, missing, cfg)) out.A_lower.push_back(cert);
  std::sort(out.A_lower.begin(), out.A_lower.end(),
            [](const auto& a, const auto& b) { return a.sigma < b.sigma; });
  out.exact = out.A_lower.size() == out.A_upper.size();
  return out;
}

/// Two-map four-dimensional criterion: with f_1 strictly (2,1,3,4)-ordered
/// and f_2 strictly (1,2,4,3)-ordered, (1,2,3,4) ∈ ℬ iff lhs < rhs, and
/// (2,1,4,3) ∈ ℬ iff not.
struct TwoMapCriterion {
  double lhs = 0;
  double rhs = 0;
  bool in_B_1234 = false;
  bool in_B_2143 = false;
};

inline TwoMapCriterion lemma33_condition(const SpongeSystem& s) {
  if (s.dimension() != 4 || s.size() != 2)
    throw PreconditionViolated("criterion needs exactly two maps in dimension four");
  auto strictly = [&](int i, std::initializer_list<int> order) {
    std::vector<int> o(order);
    for (std::size_t k = 0; k + 1 < o.size(); ++k)
      if (!(s.ratio(i, o[k] - 1) > s.ratio(i, o[k + 1] - 1))) return false;
    return true;
  };
  if (!strictly(0, {2, 1, 3, 4}) || !strictly(1, {1, 2, 4, 3}))
    throw PreconditionViolated("maps are not ordered (2,1,3,4) and (1,2,4,3)");
  auto lam = [&](int i, int n) { return s.ratio(i, n - 1); };
  HighReal lhs = high_log(Rational(lam(0, 2) / lam(0, 1))) / high_log(Rational(lam(0, 3) / lam(0, 4)));
  HighReal rhs = high_log(Rational(lam(1, 1) / lam(1, 2))) / high_log(Rational(lam(1, 4) / lam(1, 3)));
  HighReal diff = lhs - rhs;
  if (boost::multiprecision::abs(diff) < HighReal("1e-30"))
    throw BorderlineOrdering("(1,2,3,4)/(2,1,4,3)", 0.0);
  TwoMapCriterion out;
  out.lhs = static_cast<double>(lhs);
  out.rhs = static_cast<double>(rhs);
  out.in_B_1234 = lhs < rhs;
  out.in_B_2143 = !out.in_B_1234;
  return out;
}

/// Three-dimensional closure: if y is dominated by x and both (x,y,z) and
/// (z,x,y) are in 𝒜 then (x,z,y) must be too. Returns false on a violation.
inline bool prop43_closure_check(const SpongeSystem& s, const OrderingSets& sets) {
  if (s.dimension() != 3) throw PreconditionViolated("closure check is three-dimensional");
  auto inA = [&](int a, int b, int c) { return sets.in_A_upper(Ordering({a, b, c})); };
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      if (x == y || !dominates(s, x, y)) continue;
      int z = 3 - x - y;
      if (inA(x, y, z) && inA(z, x, y) && !inA(x, z, y)) return false;
    }
  return true;
}

}  // namespace sponge
