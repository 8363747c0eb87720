#pragma once

#include <sponge/sponge.hpp>

#include <random>
#include <string>
#include <vector>

namespace sponge::testing {

inline Rational q(const std::string& text) { return *parse_rational(text); }

inline AffineMap map_of(std::vector<std::string> ratios, std::vector<std::string> translation) {
  AffineMap m;
  for (auto& r : ratios) m.ratios.push_back(q(r));
  for (auto& t : translation) m.translation.push_back(q(t));
  return m;
}

/// Columns x ∈ {0, 1/2}, rows y ∈ {0, 1/2, 3/4}: the 2x4 carpet with maps
/// at (0,0), (0,1/2), (1/2,0).
inline SpongeSystem bedford_mcmullen() {
  return make_sponge({2,
                      {map_of({"1/2", "1/4"}, {"0", "0"}), map_of({"1/2", "1/4"}, {"0", "1/2"}),
                       map_of({"1/2", "1/4"}, {"1/2", "0"})}});
}

inline SpongeSystem shrunken_bm() {
  return make_sponge({2,
                      {map_of({"9/20", "1/5"}, {"0", "0"}), map_of({"9/20", "1/5"}, {"0", "1/2"}),
                       map_of({"9/20", "1/5"}, {"11/20", "0"})}});
}

inline SpongeSystem four_dim_two_map() {
  return make_sponge({4,
                      {map_of({"1/5", "2/5", "2/25", "1/50"}, {"0", "0", "0", "0"}),
                       map_of({"3/5", "3/10", "1/10", "1/5"}, {"2/5", "7/10", "9/10", "4/5"})}});
}

inline SpongeSystem gap_carpet() {
  return make_sponge({2, {map_of({"1/2", "1/5"}, {"0", "0"}), map_of({"1/5", "1/2"}, {"4/5", "1/2"})}});
}

/// Three-map carpet with a shared column; eps = 0 is the touching limit.
inline SpongeSystem attained_carpet(const Rational& a1, const Rational& eps) {
  Rational quarter(1, 4), half(1, 2);
  AffineMap m1{{a1 - eps, quarter - eps}, {1 - a1 + eps, 0}};
  AffineMap m2{{1 - a1, half}, {0, quarter}};
  AffineMap m3{{a1 - eps, quarter - eps}, {1 - a1 + eps, 1 - quarter + eps}};
  return make_sponge({2, {m1, m2, m3}});
}

inline SpongeSystem single_map(int d) {
  AffineMap m;
  for (int n = 0; n < d; ++n) {
    m.ratios.push_back(Rational(1, n + 2));
    m.translation.push_back(Rational(0));
  }
  return make_sponge({d, {m}});
}

inline std::vector<Rational> uniform(int N) {
  std::vector<Rational> p(static_cast<std::size_t>(N), Rational(1, N));
  for (auto& x : p) x.canonicalize();
  return p;
}

struct ColumnOptions {
  int min_dim = 2;
  int max_dim = 3;
  int min_maps = 1;
  int max_maps = 4;
  int max_columns = 3;
  /// Force some coordinate to dominate another.
  bool dominated_pair = false;
};

/// Random sponge on disjoint closed columns: each coordinate gets one to
/// max_columns separated intervals and every map picks one per coordinate.
/// Maps sharing a column overlap exactly there, and any two differing
/// columns are at positive distance, so very strong separation always holds.
inline SpongeSystem random_column_sponge(std::mt19937_64& rng, const ColumnOptions& opt = {}) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (;;) {
    const int d = pick(opt.min_dim, opt.max_dim);
    const int N = pick(opt.min_maps, opt.max_maps);
    int dom_x = -1, dom_y = -1;
    if (opt.dominated_pair && d >= 2) {
      dom_x = pick(0, d - 1);
      do dom_y = pick(0, d - 1);
      while (dom_y == dom_x);
    }
    struct Column {
      Rational start, length;
    };
    std::vector<std::vector<Column>> cols(static_cast<std::size_t>(d));
    auto layout = [&](int c, int K, const Rational& cap) {
      for (;;) {
        const int D = pick(8, 30) * (cap < 1 ? 4 : 1);
        std::vector<int> len(static_cast<std::size_t>(K));
        int used = K - 1;
        for (auto& a : len) used += (a = pick(1, D / K));
        if (used >= D) continue;
        bool ok = true;
        for (int a : len) ok = ok && Rational(a, D) < cap;
        if (!ok) continue;
        int offset = pick(0, D - used);
        int pos = offset;
        cols[static_cast<std::size_t>(c)].clear();
        for (int k = 0; k < K; ++k) {
          Rational st(pos, D), ln(len[static_cast<std::size_t>(k)], D);
          st.canonicalize();
          ln.canonicalize();
          cols[static_cast<std::size_t>(c)].push_back({st, ln});
          pos += len[static_cast<std::size_t>(k)] + 1;
        }
        return;
      }
    };
    for (int c = 0; c < d; ++c)
      if (c != dom_y) layout(c, pick(1, opt.max_columns), Rational(1));
    if (dom_y >= 0) {
      Rational cap = 1;
      for (const auto& col : cols[static_cast<std::size_t>(dom_x)]) cap = std::min(cap, col.length);
      layout(dom_y, pick(1, opt.max_columns), cap);
    }
    RawSponge raw{d, {}};
    std::vector<std::vector<int>> used;
    for (int i = 0; i < N; ++i) {
      std::vector<int> choice;
      for (int c = 0; c < d; ++c) choice.push_back(pick(0, static_cast<int>(cols[static_cast<std::size_t>(c)].size()) - 1));
      AffineMap m;
      for (int c = 0; c < d; ++c) {
        const auto& col = cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(choice[static_cast<std::size_t>(c)])];
        m.ratios.push_back(col.length);
        m.translation.push_back(col.start);
      }
      raw.maps.push_back(std::move(m));
    }
    auto v = validate_sponge(raw);
    if (v.ok()) return *v.system;
  }
}

/// Unconstrained random rational system: maps may overlap arbitrarily.
inline SpongeSystem random_free_sponge(std::mt19937_64& rng, int d, int N) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (;;) {
    RawSponge raw{d, {}};
    for (int i = 0; i < N; ++i) {
      AffineMap m;
      for (int c = 0; c < d; ++c) {
        int D = pick(2, 12);
        int a = pick(1, D - 1);
        int t = pick(0, D - a);
        m.ratios.emplace_back(a, D);
        m.translation.emplace_back(t, D);
        m.ratios.back().canonicalize();
        m.translation.back().canonicalize();
      }
      raw.maps.push_back(std::move(m));
    }
    auto v = validate_sponge(raw);
    if (v.ok()) return *v.system;
  }
}

inline std::vector<Rational> random_weights(std::mt19937_64& rng, int N) {
  std::vector<int> a(static_cast<std::size_t>(N));
  int total = 0;
  for (auto& x : a) total += (x = std::uniform_int_distribution<int>(1, 9)(rng));
  std::vector<Rational> p;
  for (int x : a) {
    p.emplace_back(x, total);
    p.back().canonicalize();
  }
  return p;
}

inline WordSpec random_word(std::mt19937_64& rng, int N, int max_prefix = 5, int max_cycle = 3) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  WordSpec w;
  for (int k = pick(0, max_prefix); k > 0; --k) w.prefix.push_back(pick(0, N - 1));
  for (int k = pick(1, max_cycle); k > 0; --k) w.cycle.push_back(pick(0, N - 1));
  return w;
}

}  // namespace sponge::testing
