#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace sponge {

/// Arbitrary-precision rational. Every ratio, translation, product and
/// scale in the model is held exactly in this type.
using Rational = mpq_class;

/// Parses "p/q", an integer, or a decimal with optional exponent
/// ("0.45", "-1.5e-3") into an exact rational. Returns nullopt on
/// malformed input or a zero denominator.
inline std::optional<Rational> parse_rational(std::string_view text) {
  auto is_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  auto parse_int = [&](std::string_view s) -> std::optional<mpz_class> {
    std::string_view body = s;
    bool negative = false;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    if (!is_digits(body)) return std::nullopt;
    mpz_class v(std::string(body), 10);
    return negative ? mpz_class(-v) : v;
  };

  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_int(text.substr(0, slash));
    auto den = parse_int(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    Rational q(*num, *den);
    q.canonicalize();
    return q;
  }

  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    auto exp = parse_int(text.substr(e + 1));
    if (!exp || !exp->fits_slong_p()) return std::nullopt;
    exponent = exp->get_si();
    mantissa = text.substr(0, e);
  }

  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '+' || mantissa.front() == '-')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string_view whole = mantissa, frac;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    whole = mantissa.substr(0, dot);
    frac = mantissa.substr(dot + 1);
    if (frac.find('.') != std::string_view::npos) return std::nullopt;
  }
  if (whole.empty() && frac.empty()) return std::nullopt;
  if (!whole.empty() && !is_digits(whole)) return std::nullopt;
  if (!frac.empty() && !is_digits(frac)) return std::nullopt;

  std::string digits = std::string(whole) + std::string(frac);
  mpz_class num(digits, 10);
  long scale = static_cast<long>(frac.size()) - exponent;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational q = scale >= 0 ? Rational(num, pow10) : Rational(num * pow10);
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

/// Canonical "p/q" (or "p" for integers) form.
inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Natural logarithm of a positive rational. Stable for numerators and
/// denominators far outside the double range.
inline double log_of(const mpz_class& z) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

inline double log_of(const Rational& q) {
  return log_of(mpz_class(q.get_num())) - log_of(mpz_class(q.get_den()));
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact rational value of a finite double.
inline Rational from_double(double x) {
  Rational q(x);
  q.canonicalize();
  return q;
}

/// Closest fraction with denominator at most max_den (continued fractions).
inline Rational approximate(double x, unsigned long max_den) {
  Rational exact = from_double(x);
  mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  Rational rem = exact;
  for (int iter = 0; iter < 128; ++iter) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), rem.get_num_mpz_t(), rem.get_den_mpz_t());
    mpz_class h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    Rational frac = rem - Rational(a);
    if (frac == 0) break;
    rem = 1 / frac;
  }
  Rational q(h1, k1);
  q.canonicalize();
  return q;
}

}  // namespace sponge
