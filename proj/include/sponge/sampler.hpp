#pragma once

#include <sponge/cube.hpp>
#include <sponge/dimension.hpp>
#include <sponge/error.hpp>
#include <sponge/orderings.hpp>
#include <sponge/separation.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace sponge {

/// Exact rational close to exp(x), valid far below the double range.
inline Rational rational_from_log(double x) {
  long shift = static_cast<long>(std::floor(x / std::log(2.0)));
  Rational q = from_double(std::exp(x - static_cast<double>(shift) * std::log(2.0)));
  if (shift < 0) {
    mpz_class den = 1;
    den <<= static_cast<unsigned long>(-shift);
    q /= Rational(den);
  } else {
    mpz_class num = 1;
    num <<= static_cast<unsigned long>(shift);
    q *= Rational(num);
  }
  q.canonicalize();
  return q;
}

struct RatioSample {
  WordSpec word;
  Rational R;
  Rational r;
  Ordering sigma_R;
  Ordering sigma_r;
  double logratio = 0;
  double logscale = 0;
  double exponent = 0;
};

template <class Scalar>
RatioSample ratio_sample(MeasureContext<Scalar>& ctx, WordProducts& wp, const Rational& R, const Rational& r) {
  if (!(r > 0 && r < R && R < 1)) throw PreconditionViolated("scales must satisfy 0 < r < R < 1");
  const auto& s = ctx.system();
  double logR = log_of(R), logr = log_of(r);
  auto big = approximate_cube(s, wp, R, logR);
  auto small = approximate_cube(s, wp, r, logr);
  RatioSample out;
  out.word = wp.word();
  out.R = R;
  out.r = r;
  out.sigma_R = big.sigma;
  out.sigma_r = small.sigma;
  out.logratio = ctx.log_measure(big) - ctx.log_measure(small);
  out.logscale = logR - logr;
  out.exponent = out.logratio / out.logscale;
  return out;
}

/// Least-squares slope of logratio against logscale.
inline double fit_slope(const std::vector<RatioSample>& samples) {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (samples.size() == 1) return samples.front().exponent;
  double mx = 0, my = 0;
  for (const auto& x : samples) {
    mx += x.logscale;
    my += x.logratio;
  }
  mx /= static_cast<double>(samples.size());
  my /= static_cast<double>(samples.size());
  double sxx = 0, sxy = 0;
  for (const auto& x : samples) {
    sxx += (x.logscale - mx) * (x.logscale - mx);
    sxy += (x.logscale - mx) * (x.logratio - my);
  }
  if (sxx <= 0) return my / mx;
  return sxy / sxx;
}

enum class Extremum { Max, Min };

struct WitnessPlan {
  double target_ratio = 1e40;
  /// Smallest R/r kept in the emitted family.
  double min_ratio = 10;
  int max_points = 400;
  /// Number of exponents m tried for R = 2^{-m}, counted from the first
  /// m where the r-range can be nonempty.
  int max_R_exponent = 32000;
  int max_iterate = 12;
  /// Iterates whose alphabet exceeds this many letters are not built.
  std::size_t max_iterate_letters = 4096;
};

/// Lower-bound witness family: for each R the word uses the extremal symbol
/// k_n on (L(R,σ_n), L(r,σ_n)] and a strictly σ-ordered letter j elsewhere.
struct ExtremalWitness {
  Ordering sigma;
  Extremum kind = Extremum::Max;
  /// Iterate of the system the construction runs on (1 = original).
  int iterate = 1;
  /// Strict letter of the working system and its expansion.
  int j = 0;
  std::vector<int> j_letters;
  /// Extremal symbol per level, working alphabet.
  std::vector<int> k;
  /// S̄(p,σ) or S̲(p,σ).
  double target = 0;
  /// theta[a][b][v] = log λ_v^{(a)} / log λ_v^{(b)} on the working system.
  std::vector<std::vector<std::vector<double>>> theta;
  std::vector<RatioSample> samples;
  double fitted_exponent = 0;
};

namespace detail {

inline std::vector<int> strict_letters(const SpongeSystem& s, const Ordering& sigma) {
  std::vector<int> out;
  for (int i = 0; i < s.size(); ++i) {
    bool ok = true;
    for (int n = 0; n + 1 < s.dimension() && ok; ++n) ok = s.ratio(i, sigma[n]) > s.ratio(i, sigma[n + 1]);
    if (ok) out.push_back(i);
  }
  return out;
}

inline std::optional<int> strict_letter(const SpongeSystem& s, const Ordering& sigma) {
  auto all = strict_letters(s, sigma);
  if (all.empty()) return std::nullopt;
  return all.front();
}

struct WorkingSystem {
  SpongeSystem system;
  int iterate = 1;
  std::vector<int> js;
};

/// Smallest iterate with a strictly σ-ordered letter.
inline WorkingSystem strict_working_system(const SpongeSystem& base, const Ordering& sigma, int max_iterate,
                                           std::size_t max_letters) {
  std::size_t letters = 1;
  for (int it = 1; it <= max_iterate; ++it) {
    letters *= static_cast<std::size_t>(base.size());
    if (it > 1 && letters > max_letters) break;
    auto ws = it == 1 ? base : iterate_system(base, it);
    auto js = strict_letters(ws, sigma);
    if (!js.empty()) return {std::move(ws), it, std::move(js)};
  }
  throw NoStrictLetter("no strictly " + sigma.str() + "-ordered letter up to iterate " + std::to_string(max_iterate) +
                       " within " + std::to_string(max_letters) + " letters");
}

template <class Scalar>
std::vector<Scalar> iterate_weights(const std::vector<Scalar>& p, int k) {
  const int N = static_cast<int>(p.size());
  int total = 1;
  for (int e = 0; e < k; ++e) total *= N;
  std::vector<Scalar> out;
  for (int u = 0; u < total; ++u) {
    Scalar w(1);
    for (int letter : expand_iterate_letter(u, N, k)) w *= p[static_cast<std::size_t>(letter)];
    out.push_back(w);
  }
  return out;
}

/// log of the admissible r-range (lower, upper) for a given log R.
struct WitnessGeometry {
  const SpongeSystem* s;
  Ordering sigma;
  int j;
  std::vector<int> k;
  double log_lmin;

  double theta(int a, int b, int v) const { return s->log_ratio(v, a) / s->log_ratio(v, b); }

  std::pair<double, double> range(double logR) const {
    const int d = s->dimension();
    double upper = log_lmin + logR;
    if (d == 1) return {upper + logR, upper};
    double lower = -std::numeric_limits<double>::infinity();
    auto bound = [&](double tj, double sum) {
      return (1.0 + (1.0 - tj) / sum) * logR - (1.0 + tj / sum) * log_lmin;
    };
    for (int n = 2; n <= d; ++n) {
      int a = sigma[n - 2];
      double tj = theta(a, sigma[n - 1], j);
      for (int v = 0; v < s->size(); ++v) {
        double sum = 0;
        for (int l = n; l <= d; ++l) sum += theta(a, sigma[l - 1], v);
        lower = std::max(lower, bound(tj, sum));
      }
      double actual = 0;
      for (int l = n; l <= d; ++l) actual += theta(a, sigma[l - 1], k[static_cast<std::size_t>(l - 1)]);
      lower = std::max(lower, bound(tj, actual));
    }
    return {lower, upper};
  }

  /// log R below which range() is nonempty.
  double opening_log_R() const {
    const int d = s->dimension();
    if (d == 1) return 0.0;
    double x = 0.0;
    auto cut = [&](double tj, double sum) {
      double a = 1.0 + (1.0 - tj) / sum;
      double b = -(1.0 + tj / sum) * log_lmin;
      if (!(a > 1.0)) return -std::numeric_limits<double>::infinity();
      return (log_lmin - b) / (a - 1.0);
    };
    for (int n = 2; n <= d; ++n) {
      int a = sigma[n - 2];
      double tj = theta(a, sigma[n - 1], j);
      for (int v = 0; v < s->size(); ++v) {
        double sum = 0;
        for (int l = n; l <= d; ++l) sum += theta(a, sigma[l - 1], v);
        x = std::min(x, cut(tj, sum));
      }
      double actual = 0;
      for (int l = n; l <= d; ++l) actual += theta(a, sigma[l - 1], k[static_cast<std::size_t>(l - 1)]);
      x = std::min(x, cut(tj, actual));
    }
    return x;
  }

  /// The witness word for scales R > r, built position by position.
  WordSpec word(const Rational& R, const Rational& r) const {
    const int d = s->dimension();
    std::vector<Rational> prod(static_cast<std::size_t>(d), Rational(1));
    std::vector<int> prefix;
    auto push = [&](int letter) {
      prefix.push_back(letter);
      for (int c = 0; c < d; ++c) prod[static_cast<std::size_t>(c)] *= s->ratio(letter, c);
    };
    for (int n = d; n >= 1; --n) {
      int c = sigma[n - 1];
      if (prod[static_cast<std::size_t>(c)] <= R)
        throw Error("witness interleaving violated at level " + std::to_string(n) + " of " + sigma.str());
      while (prod[static_cast<std::size_t>(c)] > R) push(j);
      while (prod[static_cast<std::size_t>(c)] > r) push(k[static_cast<std::size_t>(n - 1)]);
    }
    return WordSpec{prefix, {j}};
  }
};

}  // namespace detail

/// Checks L(R,σ_n) < L(r,σ_n) and L(r,σ_n) < L(R,σ_{n-1}) on the word.
inline bool witness_interleaving_holds(const SpongeSystem& s, const Ordering& sigma, const WordSpec& w,
                                       const Rational& R, const Rational& r) {
  WordProducts wp(s, w);
  const int d = s.dimension();
  for (int n = 1; n <= d; ++n) {
    auto LR = wp.stopping_time(sigma[n - 1], R), Lr = wp.stopping_time(sigma[n - 1], r);
    if (!(LR < Lr)) return false;
    if (n >= 2 && !(Lr < wp.stopping_time(sigma[n - 2], R))) return false;
  }
  return true;
}

/// Builds the witness family for explicit R values on the working system
/// given by iterate. Throws RangeEmpty on the first R whose r-range is empty.
template <class Scalar>
ExtremalWitness extremal_witness_for(const SpongeSystem& base, const std::vector<Scalar>& p, const Ordering& sigma,
                                     Extremum kind, const std::vector<Rational>& Rs, const WitnessPlan& plan = {}) {
  check_probability_vector(p, base.size());
  ExtremalWitness out;
  out.sigma = sigma;
  out.kind = kind;
  auto working = detail::strict_working_system(base, sigma, plan.max_iterate, plan.max_iterate_letters);
  out.iterate = working.iterate;
  const SpongeSystem& ws = working.system;
  const double log_lmin = log_of(ws.lambda_min());
  MeasureContext<Scalar> ctx(ws, out.iterate == 1 ? p : detail::iterate_weights(p, out.iterate));
  const auto& w = ctx.weights(sigma);
  auto ext = kind == Extremum::Max ? S_upper(ws, w) : S_lower(ws, w);
  out.k = ext.arg;
  out.target = ext.total;
  // The strict letter whose r-range opens at the largest R.
  double best = -std::numeric_limits<double>::infinity();
  out.j = working.js.front();
  for (int j : working.js) {
    double x = detail::WitnessGeometry{&ws, sigma, j, out.k, log_lmin}.opening_log_R();
    if (x > best) best = x, out.j = j;
  }
  out.j_letters = expand_iterate_letter(out.j, base.size(), out.iterate);
  const int d = ws.dimension();
  out.theta.assign(static_cast<std::size_t>(d), std::vector<std::vector<double>>(static_cast<std::size_t>(d)));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int v = 0; v < ws.size(); ++v)
        out.theta[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].push_back(ws.log_ratio(v, a) / ws.log_ratio(v, b));

  detail::WitnessGeometry geo{&ws, sigma, out.j, out.k, log_lmin};
  for (const auto& R : Rs) {
    auto [lo, hi] = geo.range(log_of(R));
    if (!(lo < hi)) throw RangeEmpty("empty r-range at R = " + to_string(R));
    Rational r = rational_from_log(0.5 * (lo + hi));
    auto word = geo.word(R, r);
    if (!witness_interleaving_holds(ws, sigma, word, R, r))
      throw Error("witness interleaving violated for " + sigma.str() + " at R = " + to_string(R));
    WordProducts wp(ws, word);
    out.samples.push_back(ratio_sample(ctx, wp, R, r));
  }
  out.fitted_exponent = fit_slope(out.samples);
  return out;
}

/// Witness family with R = 2^{-m}: starts at the first m with a nonempty
/// range and runs until R/r reaches the target, thinned to max_points.
template <class Scalar>
ExtremalWitness extremal_witness(const SpongeSystem& base, const std::vector<Scalar>& p, const Ordering& sigma,
                                 Extremum kind, const WitnessPlan& plan = {}) {
  auto working = detail::strict_working_system(base, sigma, plan.max_iterate, plan.max_iterate_letters);
  // The r-range only depends on the extremal symbols through theta, so
  // a throwaway family with no scales gives k.
  auto probe = extremal_witness_for(base, p, sigma, kind, {}, plan);
  detail::WitnessGeometry geo{&working.system, sigma, probe.j, probe.k, log_of(working.system.lambda_min())};
  std::vector<int> ms;
  const double log2 = std::log(2.0);
  // Scan max_R_exponent steps past the point where the range opens.
  const int m0 = std::max(1, static_cast<int>(std::floor(-geo.opening_log_R() / log2)));
  for (int m = m0; m < m0 + plan.max_R_exponent; ++m) {
    double logR = -m * log2;
    auto [lo, hi] = geo.range(logR);
    if (!(lo < hi)) continue;
    double ratio_log = logR - 0.5 * (lo + hi);
    if (ratio_log < std::log(plan.min_ratio)) continue;
    ms.push_back(m);
    if (ratio_log >= std::log(plan.target_ratio)) break;
  }
  if (ms.empty()) throw RangeEmpty("no admissible R in 2^-" + std::to_string(m0) + " .. 2^-" +
                                    std::to_string(m0 + plan.max_R_exponent - 1));
  std::vector<Rational> Rs;
  const std::size_t count = std::min<std::size_t>(ms.size(), static_cast<std::size_t>(std::max(plan.max_points, 2)));
  std::vector<int> chosen;
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t idx = count == 1 ? 0 : t * (ms.size() - 1) / (count - 1);
    if (chosen.empty() || chosen.back() != ms[idx]) chosen.push_back(ms[idx]);
  }
  for (int m : chosen) {
    mpz_class den = 1;
    den <<= static_cast<unsigned long>(m);
    Rs.emplace_back(mpz_class(1), den);
  }
  return extremal_witness_for(base, p, sigma, kind, Rs, plan);
}

struct SamplerConfig {
  int random_words = 40;
  double max_ratio = 1e6;
  /// Ladder points below this R/r are kept as raw samples but not fitted.
  double min_fit_ratio = 1e2;
  int ladder_points = 30;
  bool extremal = true;
  WitnessPlan plan;
  std::size_t max_samples_kept = 10000;
};

struct ExponentFamily {
  std::string label;
  double slope = 0;
  std::size_t points = 0;
  double max_logscale = 0;
};

struct SamplerResult {
  double sup_estimate = 0;
  double inf_estimate = 0;
  /// Extremes of raw exponents among samples with R/r >= 1e4.
  double raw_max = 0;
  double raw_min = 0;
  std::vector<ExponentFamily> families;
  std::vector<RatioSample> samples;
  std::vector<std::string> notes;
};

namespace detail {

/// Distinct prefix products of the word, descending, down to floor.
inline std::vector<Rational> breakpoints(WordProducts& wp, double log_floor, std::size_t max_len = 4000) {
  const int d = wp.system().dimension();
  std::vector<std::pair<double, Rational>> pts;
  for (int c = 0; c < d; ++c)
    for (std::size_t L = 1; L <= max_len; ++L) {
      double lg = wp.log_product(c, L);
      if (lg < log_floor) break;
      pts.emplace_back(lg, wp.product(c, L));
    }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<Rational> out;
  for (auto& [lg, q] : pts)
    if (out.empty() || out.back() != q) out.push_back(q);
  return out;
}

inline WordSpec random_word(const SpongeSystem& s, std::mt19937_64& rng, int max_prefix = 6, int max_cycle = 4) {
  std::uniform_int_distribution<int> letter(0, s.size() - 1);
  std::uniform_int_distribution<int> plen(0, max_prefix), clen(1, max_cycle);
  WordSpec w;
  for (int k = plen(rng); k > 0; --k) w.prefix.push_back(letter(rng));
  for (int k = clen(rng); k > 0; --k) w.cycle.push_back(letter(rng));
  return w;
}

}  // namespace detail

/// Ratio exponents over fixed-word ladders and extremal witness families.
/// Each family's exponent is the regression slope of log ratio on log(R/r),
/// which removes the bounded additive constant.
template <class Scalar>
SamplerResult sample_ratio_exponents(const SpongeSystem& s, const std::vector<Scalar>& p, const SamplerConfig& cfg,
                                     std::uint64_t seed, const std::vector<Ordering>& B = {}) {
  SamplerResult out;
  MeasureContext<Scalar> ctx(s, p);
  std::mt19937_64 rng(seed);
  const double log_lmin = log_of(s.lambda_min());
  const double log_max = std::log(cfg.max_ratio);
  double first = std::numeric_limits<double>::infinity(), last = -first;
  auto add_family = [&](const std::string& label, const std::vector<RatioSample>& fam, double min_ratio) {
    std::vector<RatioSample> fit;
    for (const auto& x : fam)
      if (x.logscale >= std::log(min_ratio)) fit.push_back(x);
    if (fit.size() < 2) return;
    ExponentFamily ef{label, fit_slope(fit), fit.size(), 0};
    for (const auto& x : fit) ef.max_logscale = std::max(ef.max_logscale, x.logscale);
    first = std::min(first, ef.slope);
    last = std::max(last, ef.slope);
    out.families.push_back(ef);
    for (const auto& x : fam)
      if (out.samples.size() < cfg.max_samples_kept) out.samples.push_back(x);
  };

  std::vector<WordSpec> words;
  for (int i = 0; i < s.size(); ++i) words.push_back(WordSpec::constant(i));
  for (int k = 0; k < cfg.random_words; ++k) words.push_back(detail::random_word(s, rng));
  for (const auto& w : words) {
    WordProducts wp(s, w);
    auto bps = detail::breakpoints(wp, log_lmin * 8 - log_max - 1.0);
    for (std::size_t ri : {std::size_t{0}, std::min<std::size_t>(bps.size() - 1, 2 * static_cast<std::size_t>(s.dimension()))}) {
      if (bps.empty()) break;
      const Rational& R = bps[ri];
      double logR = log_of(R);
      std::vector<Rational> rs;
      for (std::size_t t = ri + 1; t < bps.size(); ++t) {
        double ls = logR - log_of(bps[t]);
        if (ls > log_max + 1e-12) break;
        if (ls > -log_lmin) rs.push_back(bps[t]);
      }
      std::vector<RatioSample> fam;
      const std::size_t count = std::min<std::size_t>(rs.size(), static_cast<std::size_t>(cfg.ladder_points));
      for (std::size_t t = 0; t < count; ++t) {
        std::size_t idx = count == 1 ? 0 : t * (rs.size() - 1) / (count - 1);
        fam.push_back(ratio_sample(ctx, wp, R, rs[idx]));
      }
      add_family("ladder " + w.str() + " R=" + to_string(R), fam, cfg.min_fit_ratio);
    }
  }
  if (cfg.extremal)
    for (const auto& sigma : B)
      for (Extremum kind : {Extremum::Max, Extremum::Min}) {
        try {
          auto wit = extremal_witness(s, p, sigma, kind, cfg.plan);
          add_family(std::string(kind == Extremum::Max ? "witness max " : "witness min ") + sigma.str(), wit.samples,
                     cfg.plan.min_ratio);
        } catch (const Error& e) {
          out.notes.push_back(sigma.str() + ": " + e.what());
        }
      }
  out.sup_estimate = last;
  out.inf_estimate = first;
  out.raw_max = -std::numeric_limits<double>::infinity();
  out.raw_min = std::numeric_limits<double>::infinity();
  for (const auto& x : out.samples)
    if (x.logscale >= std::log(1e4)) {
      out.raw_max = std::max(out.raw_max, x.exponent);
      out.raw_min = std::min(out.raw_min, x.exponent);
    }
  return out;
}

struct SameOrderingReport {
  std::size_t samples = 0;
  /// Smallest C making both inequalities hold on the sample.
  double C_observed = 1;
  /// λ_min^{-S̄}, the constant the block-product estimate yields.
  double C_bound = 1;
  bool bounded = true;
  /// C needed on the lower and upper halves of the sampled log(R/r) range.
  double C_low_half = 1;
  double C_high_half = 1;
};

/// Samples word and scale pairs with both cubes σ-ordered and r < λ_min R.
/// Words are iid from the certificate weights (cylinder certificates) or the
/// certificate word plus random words (cube certificates).
template <class Scalar>
SameOrderingReport verify_same_ordering_bounds(const SpongeSystem& s, const std::vector<Scalar>& p,
                                               const OrderingCertificate& cert, int trials, std::uint64_t seed) {
  SameOrderingReport rep;
  MeasureContext<Scalar> ctx(s, p);
  const Ordering& sigma = cert.sigma;
  const auto& w = ctx.weights(sigma);
  const double Sup = S_upper(s, w).total, Slo = S_lower(s, w).total;
  const double log_lmin = log_of(s.lambda_min());
  rep.C_bound = std::exp(-log_lmin * std::max(Sup, Slo));
  std::mt19937_64 rng(seed);
  std::vector<double> cdf;
  if (cert.kind == CertificateKind::CylinderStrict) {
    double acc = 0;
    for (const auto& q : cert.p) cdf.push_back(acc += q.get_d());
  }
  auto draw_word = [&]() {
    if (!cdf.empty()) {
      std::uniform_real_distribution<double> u(0.0, cdf.back());
      auto letter = [&]() { return static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u(rng)) - cdf.begin()); };
      WordSpec wd;
      for (int k = 0; k < 160; ++k) wd.prefix.push_back(letter());
      for (int k = 0; k < 40; ++k) wd.cycle.push_back(letter());
      return wd;
    }
    std::bernoulli_distribution coin(0.5);
    return coin(rng) ? cert.word : detail::random_word(s, rng, 8, 4);
  };
  struct Point {
    double logscale;
    double C;
  };
  std::vector<Point> pts;
  const double log_floor = log_lmin * 4 - std::log(1e6);
  for (int attempt = 0; attempt < trials * 20 && static_cast<int>(pts.size()) < trials; ++attempt) {
    WordProducts wp(s, draw_word());
    auto bps = detail::breakpoints(wp, log_floor);
    std::vector<std::pair<Rational, ApproximateCube>> ordered;
    for (const auto& q : bps) {
      auto c = approximate_cube(s, wp, q, log_of(q));
      if (c.sigma == sigma) ordered.emplace_back(q, std::move(c));
    }
    if (ordered.size() < 2) continue;
    std::uniform_int_distribution<std::size_t> pick(0, ordered.size() - 1);
    for (int k = 0; k < 4 && static_cast<int>(pts.size()) < trials; ++k) {
      const auto& [R, cR] = ordered[pick(rng)];
      std::optional<Rational> r;
      if (k == 0) {
        r = s.lambda_min() * R / 2;
      } else {
        const auto& cand = ordered[pick(rng)].first;
        if (cand < s.lambda_min() * R) r = cand;
      }
      if (!r) continue;
      auto cr = approximate_cube(s, wp, *r, log_of(*r));
      if (!(cr.sigma == sigma)) continue;
      double lr = ctx.log_measure(cR) - ctx.log_measure(cr);
      double ls = log_of(R) - log_of(*r);
      double C = std::max(std::exp(lr - Sup * ls), std::exp(Slo * ls - lr));
      pts.push_back({ls, C});
    }
  }
  rep.samples = pts.size();
  if (pts.empty()) return rep;
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.logscale < b.logscale; });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rep.C_observed = std::max(rep.C_observed, pts[i].C);
    auto& half = i < pts.size() / 2 ? rep.C_low_half : rep.C_high_half;
    half = std::max(half, pts[i].C);
  }
  rep.bounded = rep.C_observed <= rep.C_bound * (1 + 1e-9);
  return rep;
}

struct SubdivisionReport {
  std::size_t samples = 0;
  double max_ratio = 1;
  /// Largest p_n(Π_n i) / p_m(Π_m i) over orderings, n < m and i.
  double C_max = 1;
  /// C_max^{d^2}.
  double bound = 1;
  bool bounded = true;
  /// Max ratio over the larger-R and smaller-R halves of the sample.
  double max_large_R = 1;
  double max_small_R = 1;
};

/// μ(B(R)) / μ(B((1-ε)R)) over random words and scales.
template <class Scalar>
SubdivisionReport verify_subdivision_bound(const SpongeSystem& s, const std::vector<Scalar>& p, const Rational& eps,
                                           int trials, std::uint64_t seed, const std::vector<Ordering>& orderings = {}) {
  if (!(eps > 0 && eps < 1) || !(1 - eps > s.lambda_max()))
    throw InvalidEpsilon("need 0 < eps and 1 - eps > max ratio, got eps = " + to_string(eps));
  SubdivisionReport rep;
  MeasureContext<Scalar> ctx(s, p);
  const int d = s.dimension();
  auto sigmas = orderings.empty() ? all_orderings(d) : orderings;
  for (const auto& sigma : sigmas) {
    const auto& w = ctx.weights(sigma);
    for (int i = 0; i < s.size(); ++i)
      for (int n = 0; n <= d; ++n)
        for (int m = n + 1; m <= d; ++m) {
          double num = scalar_to_double(w.projected(n, w.structure().project(n, i)));
          double den = scalar_to_double(w.projected(m, w.structure().project(m, i)));
          rep.C_max = std::max(rep.C_max, num / den);
        }
  }
  rep.bound = std::pow(rep.C_max, d * d);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> depth(0.05, 14.0);
  struct Point {
    double logR;
    double ratio;
  };
  std::vector<Point> pts;
  for (int t = 0; t < trials; ++t) {
    WordProducts wp(s, detail::random_word(s, rng, 8, 4));
    Rational R = rational_from_log(-depth(rng));
    Rational r = (1 - eps) * R;
    auto cR = approximate_cube(s, wp, R, log_of(R));
    auto cr = approximate_cube(s, wp, r, log_of(r));
    double ratio = std::exp(ctx.log_measure(cR) - ctx.log_measure(cr));
    pts.push_back({log_of(R), ratio});
  }
  rep.samples = pts.size();
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.logR > b.logR; });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rep.max_ratio = std::max(rep.max_ratio, pts[i].ratio);
    auto& half = i < pts.size() / 2 ? rep.max_large_R : rep.max_small_R;
    half = std::max(half, pts[i].ratio);
  }
  rep.bounded = rep.max_ratio <= rep.bound * (1 + 1e-9);
  return rep;
}

struct SandwichReport {
  std::size_t members_checked = 0;
  std::size_t outsiders_checked = 0;
  bool inner_ok = true;
  bool outer_ok = true;
};

namespace detail {

/// Closed interval of f_{u_1..u_len}([0,1]^d) in coordinate c.
inline std::pair<Rational, Rational> cylinder_interval(const SpongeSystem& s, const std::vector<int>& u,
                                                       std::size_t len, int c) {
  Rational lo = 0, width = 1;
  for (std::size_t l = len; l-- > 0;) {
    lo = s.ratio(u[l], c) * lo + s.translation(u[l], c);
    width *= s.ratio(u[l], c);
  }
  return {lo, lo + width};
}

}  // namespace detail

/// Symbolic-to-geometric sandwich at desk scale. Members of B_i(r) project
/// into a box with sides at most r around the base cylinder, and words
/// leaving the cube at position l' sit at distance >= δ₀ r in some
/// coordinate (measured between the level-l' cylinders).
inline SandwichReport check_sandwich(const SpongeSystem& s, const Rational& delta0, const WordSpec& word,
                                     const Rational& r, int trials, std::uint64_t seed) {
  SandwichReport rep;
  const int d = s.dimension();
  const int N = s.size();
  auto c = approximate_cube(s, word, r);
  const std::size_t K = c.length();
  std::vector<int> base;
  for (std::size_t l = 0; l < K; ++l) base.push_back(word.at(l));
  // Cube box: coordinate σ_n is fixed by the first L(r,σ_n) symbols.
  std::vector<std::pair<Rational, Rational>> box(static_cast<std::size_t>(d));
  for (int n = 1; n <= d; ++n) {
    int coord = c.sigma[n - 1];
    box[static_cast<std::size_t>(coord)] = detail::cylinder_interval(s, base, c.L[static_cast<std::size_t>(n - 1)], coord);
    const auto& [lo, hi] = box[static_cast<std::size_t>(coord)];
    if (hi - lo > r) rep.inner_ok = false;
  }
  auto agrees = [&](int a, int b, std::size_t pos) {
    for (int n = 1; n <= d; ++n)
      if (pos <= c.L[static_cast<std::size_t>(n - 1)] && !exact_overlap(s, a, b, c.sigma, n)) return false;
    return true;
  };
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter(0, N - 1);
  for (int t = 0; t < trials; ++t) {
    std::vector<int> u(K);
    for (std::size_t l = 0; l < K; ++l) {
      std::vector<int> ok;
      for (int j = 0; j < N; ++j)
        if (agrees(base[l], j, l + 1)) ok.push_back(j);
      u[l] = ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)];
    }
    for (int coord = 0; coord < d; ++coord) {
      auto [lo, hi] = detail::cylinder_interval(s, u, K, coord);
      const auto& [blo, bhi] = box[static_cast<std::size_t>(coord)];
      if (lo < blo || hi > bhi) rep.inner_ok = false;
    }
    ++rep.members_checked;

    // Leave the cube at a random position.
    std::size_t pos = std::uniform_int_distribution<std::size_t>(1, K)(rng);
    std::vector<int> bad;
    for (int j = 0; j < N; ++j)
      if (!agrees(base[pos - 1], j, pos)) bad.push_back(j);
    if (bad.empty()) continue;
    auto v = u;
    v[pos - 1] = bad[std::uniform_int_distribution<std::size_t>(0, bad.size() - 1)(rng)];
    Rational best = -1;
    for (int coord = 0; coord < d; ++coord) {
      auto [alo, ahi] = detail::cylinder_interval(s, u, pos, coord);
      auto [blo, bhi] = detail::cylinder_interval(s, v, pos, coord);
      Rational gap = blo >= ahi ? Rational(blo - ahi) : (alo >= bhi ? Rational(alo - bhi) : Rational(-1));
      best = std::max(best, gap);
    }
    if (best < delta0 * r) rep.outer_ok = false;
    ++rep.outsiders_checked;
  }
  return rep;
}

}  // namespace sponge
