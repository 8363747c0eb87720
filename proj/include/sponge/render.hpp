#pragma once

#include <sponge/error.hpp>
#include <sponge/system.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace sponge {

struct Cylinder {
  std::vector<Rational> lo;
  std::vector<Rational> side;
};

/// f_w([0,1]^d) for every word w of the given length, lexicographic.
inline std::vector<Cylinder> cylinders(const SpongeSystem& s, int depth, std::size_t cap = 200000) {
  const int d = s.dimension();
  std::vector<Cylinder> level{{std::vector<Rational>(static_cast<std::size_t>(d), Rational(0)),
                               std::vector<Rational>(static_cast<std::size_t>(d), Rational(1))}};
  for (int k = 0; k < depth; ++k) {
    if (level.size() * static_cast<std::size_t>(s.size()) > cap)
      throw CapExceeded("more than " + std::to_string(cap) + " cylinders at depth " + std::to_string(depth));
    std::vector<Cylinder> next;
    for (const auto& c : level)
      for (int i = 0; i < s.size(); ++i) {
        Cylinder child = c;
        for (int n = 0; n < d; ++n) {
          auto idx = static_cast<std::size_t>(n);
          child.lo[idx] = c.lo[idx] + c.side[idx] * s.translation(i, n);
          child.side[idx] = c.side[idx] * s.ratio(i, n);
        }
        next.push_back(std::move(child));
      }
    level = std::move(next);
  }
  return level;
}

namespace detail {

inline std::string svg_num(const Rational& q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", q.get_d());
  return buf;
}

/// One panel: unit square at (x0, y0) with the given size, showing the
/// projection of every cylinder onto coordinates (a, b). b points up.
inline void svg_panel(std::string& out, const std::vector<Cylinder>& cyl, int a, int b, const Rational& x0,
                      const Rational& y0, const Rational& size, const std::string& label) {
  out += "<rect x=\"" + svg_num(x0) + "\" y=\"" + svg_num(y0) + "\" width=\"" + svg_num(size) + "\" height=\"" +
         svg_num(size) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (const auto& c : cyl) {
    auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
    Rational x = x0 + size * c.lo[ua];
    Rational y = y0 + size * (1 - c.lo[ub] - c.side[ub]);
    out += "<rect x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" width=\"" + svg_num(size * c.side[ua]) +
           "\" height=\"" + svg_num(size * c.side[ub]) + "\" fill=\"#4a6fa5\" fill-opacity=\"0.6\" stroke=\"#1f3b63\" stroke-width=\"0.5\"/>\n";
  }
  out += "<text x=\"" + svg_num(x0) + "\" y=\"" + svg_num(y0 + size + 20) + "\" font-size=\"16\">" + label + "</text>\n";
}

}  // namespace detail

/// Depth-k cylinders on a fixed 1000x1000 viewport. Planar systems get one
/// panel; three-dimensional ones get the xy, xz and yz projections side by side.
inline std::string render_svg(const SpongeSystem& s, int depth) {
  const int d = s.dimension();
  if (d != 2 && d != 3) throw UnsupportedDimension("rendering supports dimensions 2 and 3, got " + std::to_string(d));
  if (depth < 1) throw PreconditionViolated("depth must be at least 1");
  auto cyl = cylinders(s, depth);
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n"
      "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
  if (d == 2) {
    detail::svg_panel(out, cyl, 0, 1, Rational(50), Rational(50), Rational(900), "x-y");
  } else {
    const Rational size(300), top(350);
    detail::svg_panel(out, cyl, 0, 1, Rational(25), top, size, "x-y");
    detail::svg_panel(out, cyl, 0, 2, Rational(350), top, size, "x-z");
    detail::svg_panel(out, cyl, 1, 2, Rational(675), top, size, "y-z");
  }
  out += "</svg>\n";
  return out;
}

}  // namespace sponge
