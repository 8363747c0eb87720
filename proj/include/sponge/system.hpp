#pragma once

#include <sponge/error.hpp>
#include <sponge/rational.hpp>

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace sponge {

/// Diagonal affine map x -> diag(ratios) x + translation on [0,1]^d.
struct AffineMap {
  std::vector<Rational> ratios;
  std::vector<Rational> translation;

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Unvalidated input, straight from a spec file or a generator.
struct RawSponge {
  int dimension = 0;
  std::vector<AffineMap> maps;

  bool operator==(const RawSponge&) const = default;
};

/// Permutation (sigma_1, ..., sigma_d) of the coordinates, stored 0-based.
/// Position 0 is the coordinate with the largest side / latest stopping.
class Ordering {
 public:
  Ordering() = default;
  explicit Ordering(std::vector<int> perm) : perm_(std::move(perm)) {
    std::vector<int> check = perm_;
    std::sort(check.begin(), check.end());
    for (std::size_t k = 0; k < check.size(); ++k)
      if (check[k] != static_cast<int>(k)) throw PreconditionViolated("not a permutation");
  }

  static Ordering identity(int d) {
    std::vector<int> p(static_cast<std::size_t>(d));
    std::iota(p.begin(), p.end(), 0);
    return Ordering(std::move(p));
  }

  /// Builds from 1-based coordinates, e.g. {1,2,4,3}.
  static Ordering one_based(std::initializer_list<int> coords) {
    std::vector<int> p;
    for (int c : coords) p.push_back(c - 1);
    return Ordering(std::move(p));
  }

  /// Parses "1,2,3", "(1,2,3)" or "123" (single-digit coordinates).
  static std::optional<Ordering> parse(std::string_view text, int d) {
    std::vector<int> p;
    bool has_sep = text.find(',') != std::string_view::npos;
    std::string cur;
    auto flush = [&]() -> bool {
      if (cur.empty()) return true;
      int v = std::stoi(cur);
      cur.clear();
      p.push_back(v - 1);
      return true;
    };
    for (char c : text) {
      if (c >= '0' && c <= '9') {
        cur.push_back(c);
        if (!has_sep) flush();
      } else if (c == ',' || c == ' ') {
        flush();
      } else if (c != '(' && c != ')') {
        return std::nullopt;
      }
    }
    flush();
    if (static_cast<int>(p.size()) != d) return std::nullopt;
    try {
      return Ordering(std::move(p));
    } catch (const PreconditionViolated&) {
      return std::nullopt;
    }
  }

  int size() const noexcept { return static_cast<int>(perm_.size()); }
  int operator[](int n) const { return perm_[static_cast<std::size_t>(n)]; }
  const std::vector<int>& perm() const noexcept { return perm_; }

  /// "(1,2,3)" in 1-based coordinates.
  std::string str() const {
    std::string s = "(";
    for (std::size_t k = 0; k < perm_.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(perm_[k] + 1);
    }
    return s + ")";
  }

  friend auto operator<=>(const Ordering&, const Ordering&) = default;

 private:
  std::vector<int> perm_;
};

/// All d! orderings in lexicographic order.
inline std::vector<Ordering> all_orderings(int d) {
  std::vector<int> p(static_cast<std::size_t>(d));
  std::iota(p.begin(), p.end(), 0);
  std::vector<Ordering> out;
  do {
    out.emplace_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Eventually periodic infinite word prefix . cycle^infinity over 0-based
/// map indices.
struct WordSpec {
  std::vector<int> prefix;
  std::vector<int> cycle;

  int at(std::size_t pos) const {
    if (pos < prefix.size()) return prefix[pos];
    return cycle[(pos - prefix.size()) % cycle.size()];
  }

  static WordSpec constant(int letter) { return WordSpec{{}, {letter}}; }

  std::string str() const {
    std::string s;
    for (int i : prefix) s += std::to_string(i + 1) + " ";
    s += "(";
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      if (k) s += " ";
      s += std::to_string(cycle[k] + 1);
    }
    return s + ")^inf";
  }

  friend bool operator==(const WordSpec&, const WordSpec&) = default;
};

enum class ValidationErrorKind {
  EmptySystem,
  DimensionMismatch,
  RatioOutOfRange,
  EscapesUnitCube,
  DuplicateMap,
  IndistinguishableCoordinates,
};

inline const char* name(ValidationErrorKind k) {
  switch (k) {
    case ValidationErrorKind::EmptySystem: return "EmptySystem";
    case ValidationErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ValidationErrorKind::RatioOutOfRange: return "RatioOutOfRange";
    case ValidationErrorKind::EscapesUnitCube: return "EscapesUnitCube";
    case ValidationErrorKind::DuplicateMap: return "DuplicateMap";
    case ValidationErrorKind::IndistinguishableCoordinates: return "IndistinguishableCoordinates";
  }
  return "Unknown";
}

/// One violated invariant. `first`/`second` are 0-based map or coordinate
/// indices depending on the kind (-1 when unused).
struct ValidationError {
  ValidationErrorKind kind;
  int first = -1;
  int second = -1;
  std::string message;
};

struct Validation;

/// A validated diagonal self-affine IFS on [0,1]^d. Immutable.
class SpongeSystem {
 public:
  int dimension() const noexcept { return d_; }
  int size() const noexcept { return static_cast<int>(maps_.size()); }
  const std::vector<AffineMap>& maps() const noexcept { return maps_; }
  const AffineMap& map(int i) const { return maps_[static_cast<std::size_t>(i)]; }

  const Rational& ratio(int i, int n) const {
    return maps_[static_cast<std::size_t>(i)].ratios[static_cast<std::size_t>(n)];
  }
  const Rational& translation(int i, int n) const {
    return maps_[static_cast<std::size_t>(i)].translation[static_cast<std::size_t>(n)];
  }
  /// log of ratio(i, n), cached.
  double log_ratio(int i, int n) const {
    return log_ratios_[static_cast<std::size_t>(i * d_ + n)];
  }

  const Rational& lambda_min() const noexcept { return lambda_min_; }
  const Rational& lambda_max() const noexcept { return lambda_max_; }

  RawSponge raw() const { return RawSponge{d_, maps_}; }

  friend Validation validate_sponge(const RawSponge& raw);

 private:
  SpongeSystem(int d, std::vector<AffineMap> maps) : d_(d), maps_(std::move(maps)) {
    log_ratios_.reserve(maps_.size() * static_cast<std::size_t>(d_));
    lambda_min_ = maps_.front().ratios.front();
    lambda_max_ = lambda_min_;
    for (const auto& m : maps_)
      for (const auto& r : m.ratios) {
        log_ratios_.push_back(log_of(r));
        if (r < lambda_min_) lambda_min_ = r;
        if (r > lambda_max_) lambda_max_ = r;
      }
  }

  int d_;
  std::vector<AffineMap> maps_;
  std::vector<double> log_ratios_;
  Rational lambda_min_;
  Rational lambda_max_;
};

struct Validation {
  std::optional<SpongeSystem> system;
  std::vector<ValidationError> errors;
  bool ok() const noexcept { return errors.empty(); }
};

/// Checks every model invariant and collects all violations.
inline Validation validate_sponge(const RawSponge& raw) {
  Validation out;
  auto fail = [&](ValidationErrorKind k, int a, int b, std::string msg) {
    out.errors.push_back({k, a, b, std::move(msg)});
  };
  const int d = raw.dimension;
  if (raw.maps.empty() || d <= 0) {
    fail(ValidationErrorKind::EmptySystem, -1, -1,
         d <= 0 ? "dimension must be positive" : "no maps given");
    return out;
  }
  bool shapes_ok = true;
  for (std::size_t i = 0; i < raw.maps.size(); ++i) {
    const auto& m = raw.maps[i];
    if (static_cast<int>(m.ratios.size()) != d || static_cast<int>(m.translation.size()) != d) {
      fail(ValidationErrorKind::DimensionMismatch, static_cast<int>(i), -1,
           "map " + std::to_string(i + 1) + " does not have " + std::to_string(d) + " components");
      shapes_ok = false;
    }
  }
  if (!shapes_ok) return out;

  for (std::size_t i = 0; i < raw.maps.size(); ++i) {
    const auto& m = raw.maps[i];
    for (int n = 0; n < d; ++n) {
      const auto& lam = m.ratios[static_cast<std::size_t>(n)];
      const auto& t = m.translation[static_cast<std::size_t>(n)];
      if (lam <= 0 || lam >= 1)
        fail(ValidationErrorKind::RatioOutOfRange, static_cast<int>(i), n,
             "map " + std::to_string(i + 1) + " coordinate " + std::to_string(n + 1) +
                 ": ratio " + to_string(lam) + " not in (0,1)");
      if (t < 0 || t + lam > 1)
        fail(ValidationErrorKind::EscapesUnitCube, static_cast<int>(i), n,
             "map " + std::to_string(i + 1) + " coordinate " + std::to_string(n + 1) +
                 ": [" + to_string(t) + ", " + to_string(t + lam) + "] leaves [0,1]");
    }
  }
  for (std::size_t i = 0; i < raw.maps.size(); ++i)
    for (std::size_t j = i + 1; j < raw.maps.size(); ++j)
      if (raw.maps[i] == raw.maps[j])
        fail(ValidationErrorKind::DuplicateMap, static_cast<int>(i), static_cast<int>(j),
             "maps " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " are identical");
  for (int m = 0; m < d; ++m)
    for (int n = m + 1; n < d; ++n) {
      bool distinguished = std::any_of(raw.maps.begin(), raw.maps.end(), [&](const AffineMap& f) {
        return f.ratios[static_cast<std::size_t>(m)] != f.ratios[static_cast<std::size_t>(n)];
      });
      if (!distinguished)
        fail(ValidationErrorKind::IndistinguishableCoordinates, m, n,
             "coordinates " + std::to_string(m + 1) + " and " + std::to_string(n + 1) +
                 " have equal ratios in every map");
    }
  if (out.errors.empty()) out.system = SpongeSystem(d, raw.maps);
  return out;
}

/// validate_sponge for callers that treat invalid input as a bug.
inline SpongeSystem make_sponge(const RawSponge& raw) {
  auto v = validate_sponge(raw);
  if (!v.ok()) throw PreconditionViolated("invalid sponge: " + v.errors.front().message);
  return *v.system;
}

/// True iff f_i and f_j agree on coordinates sigma_1..sigma_n (n is 1-based
/// level, 0 means the trivial projection).
inline bool exact_overlap(const SpongeSystem& s, int i, int j, const Ordering& sigma, int n) {
  for (int m = 0; m < n; ++m) {
    int c = sigma[m];
    if (s.ratio(i, c) != s.ratio(j, c) || s.translation(i, c) != s.translation(j, c)) return false;
  }
  return true;
}

/// Coordinate x dominates y: every map contracts y at least as strongly.
inline bool dominates(const SpongeSystem& s, int x, int y) {
  for (int i = 0; i < s.size(); ++i)
    if (s.ratio(i, y) > s.ratio(i, x)) return false;
  return true;
}

/// Every ordering that puts x before y whenever x dominates y.
inline std::vector<Ordering> domination_consistent_orderings(const SpongeSystem& s) {
  const int d = s.dimension();
  std::vector<std::vector<bool>> dom(static_cast<std::size_t>(d), std::vector<bool>(static_cast<std::size_t>(d)));
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y)
      dom[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = x != y && dominates(s, x, y);
  std::vector<Ordering> out;
  for (auto& sigma : all_orderings(d)) {
    bool ok = true;
    for (int a = 0; a < d && ok; ++a)
      for (int b = a + 1; b < d && ok; ++b)
        if (dom[static_cast<std::size_t>(sigma[b])][static_cast<std::size_t>(sigma[a])]) ok = false;
    if (ok) out.push_back(sigma);
  }
  return out;
}

/// The k-th iterate: maps f_{i_1} o ... o f_{i_k} indexed lexicographically,
/// so letter u of the iterate expands to the base-N digits of u.
inline SpongeSystem iterate_system(const SpongeSystem& s, int k) {
  RawSponge raw{s.dimension(), {}};
  const int N = s.size();
  int total = 1;
  for (int e = 0; e < k; ++e) total *= N;
  for (int u = 0; u < total; ++u) {
    std::vector<int> letters(static_cast<std::size_t>(k));
    int rest = u;
    for (int e = k - 1; e >= 0; --e) {
      letters[static_cast<std::size_t>(e)] = rest % N;
      rest /= N;
    }
    AffineMap m{std::vector<Rational>(static_cast<std::size_t>(s.dimension()), Rational(1)),
                std::vector<Rational>(static_cast<std::size_t>(s.dimension()), Rational(0))};
    // f_{i_1..i_k}(x) = A_{i_1}(...) + t_{i_1}; compose from the innermost map.
    for (int e = k - 1; e >= 0; --e) {
      const auto& f = s.map(letters[static_cast<std::size_t>(e)]);
      for (int n = 0; n < s.dimension(); ++n) {
        auto idx = static_cast<std::size_t>(n);
        m.translation[idx] = f.ratios[idx] * m.translation[idx] + f.translation[idx];
        m.ratios[idx] = f.ratios[idx] * m.ratios[idx];
      }
    }
    raw.maps.push_back(std::move(m));
  }
  return make_sponge(raw);
}

/// Expands a letter of the k-th iterate into base letters.
inline std::vector<int> expand_iterate_letter(int letter, int base_size, int k) {
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int e = k - 1; e >= 0; --e) {
    out[static_cast<std::size_t>(e)] = letter % base_size;
    letter /= base_size;
  }
  return out;
}

}  // namespace sponge
