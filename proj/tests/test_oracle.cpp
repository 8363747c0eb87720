#include "support/systems.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sponge;
using namespace sponge::testing;

TEST(ApproximateCube, BedfordMcMullenFixedPoint) {
  auto c = approximate_cube(bedford_mcmullen(), WordSpec::constant(0), Rational(1, 4));
  EXPECT_EQ(c.sigma, Ordering::one_based({1, 2}));
  EXPECT_EQ(c.L, (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(c.blocks[0], (std::vector<int>{0}));
  EXPECT_EQ(c.blocks[1], (std::vector<int>{0}));
}

TEST(ApproximateCube, FourDimensionalStoppingTimes) {
  auto c = approximate_cube(four_dim_two_map(), WordSpec{{0, 0, 0, 0}, {1}}, Rational(1, 20000));
  EXPECT_EQ(c.sigma, Ordering::one_based({1, 2, 3, 4}));
  EXPECT_EQ(c.L, (std::vector<std::size_t>{11, 10, 4, 3}));
  EXPECT_EQ(c.blocks[0].size(), 1u);
  EXPECT_EQ(c.blocks[1].size(), 6u);
  EXPECT_EQ(c.blocks[2].size(), 1u);
  EXPECT_EQ(c.blocks[3].size(), 3u);
}

TEST(ApproximateCube, AllOnes) {
  auto s = bedford_mcmullen();
  auto c = approximate_cube(s, WordSpec::constant(2), Rational(3, 4));
  EXPECT_EQ(c.L, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(c.sigma, Ordering::one_based({1, 2}));
  EXPECT_TRUE(c.blocks[0].empty());
  EXPECT_EQ(c.blocks[1], (std::vector<int>{2}));
  EXPECT_EQ(cube_measure(s, uniform(3), WordSpec::constant(2), Rational(3, 4)), Rational(1, 3));
}

TEST(ApproximateCube, RejectsBadScale) {
  EXPECT_THROW(approximate_cube(bedford_mcmullen(), WordSpec::constant(0), Rational(1)), PreconditionViolated);
  EXPECT_THROW(approximate_cube(bedford_mcmullen(), WordSpec::constant(0), Rational(0)), PreconditionViolated);
}

TEST(CubeMeasure, BedfordMcMullen) {
  auto s = bedford_mcmullen();
  EXPECT_EQ(cube_measure(s, uniform(3), WordSpec::constant(0), Rational(1, 4)), Rational(2, 9));
  EXPECT_EQ(brute_force_cube_measure(s, uniform(3), WordSpec::constant(0), Rational(1, 4)), Rational(2, 9));
}

TEST(CubeMeasure, SingleMapIsOne) {
  auto s = single_map(3);
  std::vector<Rational> p{1};
  for (int k = 1; k < 40; k += 7) {
    Rational r(1, k + 1);
    EXPECT_EQ(cube_measure(s, p, WordSpec::constant(0), r), Rational(1));
  }
}

TEST(CubeMeasure, BruteForceCaps) {
  auto s = bedford_mcmullen();
  EXPECT_THROW(brute_force_cube_measure(s, uniform(3), WordSpec::constant(0), Rational(1, 1 << 20)), CapExceeded);
  BruteForceLimits tiny{14, 3};
  EXPECT_THROW(brute_force_cube_measure(s, uniform(3), WordSpec::constant(1), Rational(1, 64), tiny), CapExceeded);
}

TEST(CubeMeasure, FormsAgreeAndMatchBruteForce) {
  std::mt19937_64 rng(21);
  int compared = 0;
  for (int t = 0; t < 60; ++t) {
    auto s = random_column_sponge(rng, {2, 3, 2, 4, 3});
    auto p = random_weights(rng, s.size());
    for (int k = 0; k < 10; ++k) {
      auto w = random_word(rng, s.size());
      Rational r = rational_from_log(-std::uniform_real_distribution<double>(0.2, 4.0)(rng));
      auto c = approximate_cube(s, w, r);
      auto forms = cube_measure_forms(project_weights(s, c.structure, p), c);
      EXPECT_EQ(forms.projected, forms.conditional);
      try {
        EXPECT_EQ(brute_force_cube_measure(s, p, w, r), forms.projected);
        ++compared;
      } catch (const CapExceeded&) {
      }
    }
  }
  EXPECT_GT(compared, 100);
}

TEST(CubeMeasure, TiedOrderingsGiveSameMeasure) {
  std::mt19937_64 rng(8);
  int tied = 0;
  for (int t = 0; t < 200; ++t) {
    auto s = random_column_sponge(rng, {2, 3, 1, 4, 3});
    auto p = random_weights(rng, s.size());
    auto w = random_word(rng, s.size());
    WordProducts wp(s, w);
    for (const auto& r : detail::breakpoints(wp, -6.0)) {
      auto c = approximate_cube(s, wp, r, log_of(r));
      auto perms = tied_block_permutations(c);
      if (perms.size() > 1) ++tied;
      Rational ref = cube_measure(project_weights(s, c.structure, p), c);
      for (const auto& omega : perms) EXPECT_EQ(cube_measure_with_ordering(s, p, c, omega), ref);
    }
  }
  EXPECT_GT(tied, 0);
}

TEST(CubeMeasure, NonTiedPermutationRejected) {
  auto s = bedford_mcmullen();
  auto c = approximate_cube(s, WordSpec::constant(0), Rational(1, 4));
  EXPECT_THROW(cube_measure_with_ordering(s, uniform(3), c, Ordering::one_based({2, 1})), PreconditionViolated);
}

TEST(CubeMeasure, MonotoneInScale) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    auto s = random_column_sponge(rng, {2, 3, 1, 4, 3});
    auto p = random_weights(rng, s.size());
    auto w = random_word(rng, s.size());
    Rational r = rational_from_log(-std::uniform_real_distribution<double>(0.2, 10.0)(rng));
    EXPECT_LE(cube_measure(s, p, w, r * Rational(1, 2)), cube_measure(s, p, w, r));
  }
}

TEST(Sampler, BedfordMcMullenUniform) {
  auto s = bedford_mcmullen();
  std::vector<double> p(3, 1.0 / 3);
  auto res = sample_ratio_exponents(s, p, SamplerConfig{}, 1, {Ordering::one_based({1, 2})});
  const double up = std::log(3.0) / std::log(2.0) + 0.5;
  const double lo = std::log(1.5) / std::log(2.0);
  EXPECT_NEAR(res.sup_estimate, up, 0.05);
  EXPECT_NEAR(res.inf_estimate, lo, 0.05);
  EXPECT_LE(res.sup_estimate, up + 0.05);
  EXPECT_GE(res.inf_estimate, lo - 0.05);
}

TEST(Sampler, SingleMapExponentZero) {
  auto s = single_map(2);
  auto res = sample_ratio_exponents(s, std::vector<double>{1.0}, SamplerConfig{}, 3, {Ordering::one_based({1, 2})});
  EXPECT_NEAR(res.sup_estimate, 0.0, 1e-12);
  EXPECT_NEAR(res.inf_estimate, 0.0, 1e-12);
  for (const auto& x : res.samples) EXPECT_NEAR(x.exponent, 0.0, 1e-12);
}

TEST(Sampler, SameSeedSameResult) {
  auto s = shrunken_bm();
  std::vector<double> p{0.2, 0.3, 0.5};
  SamplerConfig cfg;
  cfg.random_words = 8;
  auto a = sample_ratio_exponents(s, p, cfg, 5, {Ordering::one_based({1, 2})});
  auto b = sample_ratio_exponents(s, p, cfg, 5, {Ordering::one_based({1, 2})});
  EXPECT_EQ(a.sup_estimate, b.sup_estimate);
  EXPECT_EQ(a.inf_estimate, b.inf_estimate);
  EXPECT_EQ(a.samples.size(), b.samples.size());
}

TEST(ExtremalWitness, BedfordMcMullen) {
  auto s = bedford_mcmullen();
  std::vector<double> p(3, 1.0 / 3);
  auto sigma = Ordering::one_based({1, 2});
  auto mx = extremal_witness(s, p, sigma, Extremum::Max);
  EXPECT_EQ(mx.iterate, 1);
  EXPECT_NEAR(mx.target, std::log(3.0) / std::log(2.0) + 0.5, 1e-12);
  EXPECT_NEAR(mx.fitted_exponent, mx.target, 0.05);
  auto mn = extremal_witness(s, p, sigma, Extremum::Min);
  EXPECT_NEAR(mn.fitted_exponent, mn.target, 0.05);
  for (const auto& x : mx.samples) {
    EXPECT_EQ(x.sigma_R, sigma);
    EXPECT_TRUE(witness_interleaving_holds(s, sigma, x.word, x.R, x.r));
  }
}

TEST(ExtremalWitness, NeedsIterate) {
  // Each map is strict on one adjacent pair only; their composition is strict on both.
  auto s = make_sponge({3,
                        {map_of({"1/2", "1/4", "1/4"}, {"0", "0", "0"}),
                         map_of({"1/2", "1/2", "1/4"}, {"1/2", "1/2", "1/2"})}});
  auto sigma = Ordering::one_based({1, 2, 3});
  std::vector<double> p{0.5, 0.5};
  auto w = extremal_witness(s, p, sigma, Extremum::Max);
  EXPECT_EQ(w.iterate, 2);
  EXPECT_EQ(w.j_letters.size(), 2u);
  auto s2 = iterate_system(s, 2);
  for (const auto& x : w.samples) EXPECT_TRUE(witness_interleaving_holds(s2, sigma, x.word, x.R, x.r));
  EXPECT_NEAR(w.fitted_exponent, w.target, 0.05);

  auto t = make_sponge({2, {map_of({"1/2", "1/2"}, {"0", "0"}), map_of({"1/3", "1/2"}, {"1/2", "1/2"})}});
  EXPECT_THROW(extremal_witness(t, p, Ordering::one_based({1, 2}), Extremum::Max), NoStrictLetter);
}

TEST(ExtremalWitness, ExplicitScalesAndEmptyRange) {
  auto s = bedford_mcmullen();
  std::vector<double> p(3, 1.0 / 3);
  auto sigma = Ordering::one_based({1, 2});
  auto w = extremal_witness_for(s, p, sigma, Extremum::Max, {Rational(1, 1 << 20), Rational(1, 1 << 30)});
  EXPECT_EQ(w.samples.size(), 2u);
  EXPECT_THROW(extremal_witness_for(s, p, sigma, Extremum::Max, {Rational(1, 2)}), RangeEmpty);
}

TEST(SameOrdering, BedfordMcMullenBounded) {
  auto s = shrunken_bm();
  auto cert = b_membership(s, Ordering::one_based({1, 2}));
  ASSERT_TRUE(cert);
  auto rep = verify_same_ordering_bounds(s, uniform(3), *cert, 300, 1);
  EXPECT_GE(rep.samples, 100u);
  EXPECT_TRUE(rep.bounded);
  EXPECT_LE(rep.C_observed, rep.C_bound * (1 + 1e-9));
}

TEST(SameOrdering, RandomSystems) {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    auto s = random_column_sponge(rng, {2, 3, 2, 4, 3});
    auto p = random_weights(rng, s.size());
    OrderingSets sets;
    try {
      sets = compute_ordering_sets(s);
    } catch (const BorderlineOrdering&) {
      continue;
    }
    for (const auto& cert : sets.B) {
      const auto& sigma = cert.sigma;
      auto rep = verify_same_ordering_bounds(s, p, cert, 60, static_cast<std::uint64_t>(t));
      if (rep.samples == 0) continue;
      ++checked;
      EXPECT_TRUE(rep.bounded) << sigma.str() << " C=" << rep.C_observed << " bound=" << rep.C_bound;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Subdivision, BedfordMcMullen) {
  auto s = bedford_mcmullen();
  auto rep = verify_subdivision_bound(s, uniform(3), Rational(1, 10), 500, 1);
  EXPECT_EQ(rep.samples, 500u);
  EXPECT_LE(rep.bound, 81.0 + 1e-9);
  EXPECT_TRUE(rep.bounded);
}

TEST(Subdivision, SingleMapRatioOne) {
  auto s = single_map(2);
  auto rep = verify_subdivision_bound(s, std::vector<Rational>{1}, Rational(1, 10), 200, 2);
  EXPECT_EQ(rep.max_ratio, 1.0);
  EXPECT_TRUE(rep.bounded);
}

TEST(Subdivision, InvalidEpsilon) {
  auto s = bedford_mcmullen();
  EXPECT_THROW(verify_subdivision_bound(s, uniform(3), Rational(0), 10, 1), InvalidEpsilon);
  EXPECT_THROW(verify_subdivision_bound(s, uniform(3), Rational(1, 2), 10, 1), InvalidEpsilon);
  EXPECT_THROW(verify_subdivision_bound(s, uniform(3), Rational(3, 2), 10, 1), InvalidEpsilon);
}

TEST(Sandwich, ShrunkenCarpet) {
  auto s = shrunken_bm();
  auto sep = check_separation(s, {Ordering::one_based({1, 2})});
  ASSERT_TRUE(sep.delta0);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    auto w = random_word(rng, 3);
    Rational r = rational_from_log(-std::uniform_real_distribution<double>(0.5, 6.0)(rng));
    auto rep = check_sandwich(s, *sep.delta0, w, r, 50, static_cast<std::uint64_t>(t));
    EXPECT_TRUE(rep.inner_ok);
    EXPECT_TRUE(rep.outer_ok);
    EXPECT_EQ(rep.members_checked, 50u);
  }
}

TEST(Sandwich, RandomColumnSystems) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 40; ++t) {
    auto s = random_column_sponge(rng, {2, 3, 2, 4, 3});
    auto sep = check_separation(s, all_orderings(s.dimension()));
    ASSERT_TRUE(sep.delta0);
    auto w = random_word(rng, s.size());
    Rational r = rational_from_log(-std::uniform_real_distribution<double>(0.5, 5.0)(rng));
    auto rep = check_sandwich(s, *sep.delta0, w, r, 30, static_cast<std::uint64_t>(t));
    EXPECT_TRUE(rep.inner_ok);
    EXPECT_TRUE(rep.outer_ok);
  }
}
