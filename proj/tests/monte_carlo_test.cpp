#include <gtest/gtest.h>

#include <cmath>

#include "ftmux/analytic_rates.hpp"
#include "ftmux/monte_carlo.hpp"
#include "oracles.hpp"

using namespace ftmux;

namespace {

SetupConfig make(Preset p, Variant v, int n, int m, double prob = 0.1, Occupancy occ = Occupancy::Unlimited) {
  SetupConfig c = preset(p);
  c.variant = v;
  c.n = n;
  c.m = m;
  c.p = prob;
  c.occupancy = occ;
  return c;
}

// Standard error of the success probability (the estimate stores it per bin).
double success_stderr(const RateResult& r, const SetupConfig& c) {
  return r.std_error * static_cast<double>(c.total_bins());
}

}  // namespace

TEST(McEstimate, CertainPhotons) {
  const SetupConfig c = make(Preset::OneLoopDefault, Variant::Fixed, 3, 4, 1.0);
  const McEstimate e = mc_estimate(c, {1000, 1, 1});
  EXPECT_EQ(e.lossless.success_prob, 1.0);
  EXPECT_EQ(e.lossless.std_error, 0.0);
  // Every photon sits in the last bin, so each survives with the zero-delay value.
  double expected = 1.0;
  for (int b = 0; b < 3; ++b) expected *= survival_prob(c, b, 0);
  EXPECT_NEAR(e.lossy.success_prob, expected, 1e-14);
}

TEST(McEstimate, NoPhotons) {
  const McEstimate e = mc_estimate(make(Preset::OneLoopDefault, Variant::Partial, 2, 3, 0.0), {500, 1, 1});
  EXPECT_EQ(e.lossless.success_prob, 0.0);
  EXPECT_EQ(e.lossy.success_prob, 0.0);
}

TEST(McEstimate, SingleSample) {
  const McEstimate e = mc_estimate(make(Preset::Lossless, Variant::Partial, 2, 3, 1.0), {1, 42, 1});
  EXPECT_EQ(e.lossless.success_prob, 1.0);
  EXPECT_EQ(e.lossless.std_error, 0.0);
  EXPECT_THROW(mc_estimate(make(Preset::Lossless, Variant::Partial, 2, 3), {0, 42, 1}), DomainError);
}

TEST(McEstimate, FixedFourPhotonsAgreesWithClosedForm) {
  const SetupConfig c = make(Preset::OneLoopDefault, Variant::Fixed, 4, 10);
  const McEstimate e = mc_estimate(c, {200'000, 11, 0});
  EXPECT_NEAR(e.lossless.success_prob, 0.179962416983986, 4 * success_stderr(e.lossless, c));
  EXPECT_NEAR(e.lossy.success_prob, lossy_success(c), 4 * success_stderr(e.lossy, c));
  EXPECT_DOUBLE_EQ(e.lossless.rate_per_bin, e.lossless.success_prob / 40);
  EXPECT_DOUBLE_EQ(e.lossy.rate_hz, e.lossy.rate_per_bin / c.t_bin);
}

TEST(McEstimate, WorkerCountDoesNotChangeResults) {
  for (Variant v : {Variant::Fixed, Variant::Partial}) {
    const SetupConfig c = make(Preset::ThreeLoopDefault, v, 3, 6);
    const McEstimate one = mc_estimate(c, {50'000, 2024, 1});
    for (unsigned workers : {2u, 3u, 8u}) {
      const McEstimate many = mc_estimate(c, {50'000, 2024, workers});
      EXPECT_EQ(one.lossless, many.lossless);
      EXPECT_EQ(one.lossy, many.lossy);
    }
  }
}

TEST(McEstimate, SeedChangesResults) {
  const SetupConfig c = make(Preset::OneLoopDefault, Variant::Fixed, 2, 6);
  EXPECT_NE(mc_estimate(c, {10'000, 1, 1}).lossy.success_prob, mc_estimate(c, {10'000, 2, 1}).lossy.success_prob);
}

// |estimate - exact| <= 4 stderr on every one of 20 seeds.
TEST(McEstimate, ConsistentAcrossSeeds) {
  const SetupConfig c = make(Preset::OneLoopDefault, Variant::Fixed, 2, 5, 0.2);
  const double lossless = lossless_success(c.p, c.m, c.n);
  const double lossy = lossy_success(c);
  int ok = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const McEstimate e = mc_estimate(c, {20'000, seed, 1});
    ok += std::abs(e.lossless.success_prob - lossless) <= 4 * success_stderr(e.lossless, c) &&
          std::abs(e.lossy.success_prob - lossy) <= 4 * success_stderr(e.lossy, c);
  }
  EXPECT_GE(ok, 20);
}

TEST(McEstimate, StandardErrorScalesAsInverseRootN) {
  const SetupConfig c = make(Preset::OneLoopDefault, Variant::Fixed, 2, 5, 0.2);
  const McEstimate full = mc_estimate(c, {160'000, 5, 1});
  const McEstimate quarter = mc_estimate(c, {40'000, 5, 1});
  EXPECT_NEAR(quarter.lossless.std_error / full.lossless.std_error, 2.0, 0.1);
  EXPECT_NEAR(quarter.lossy.std_error / full.lossy.std_error, 2.0, 0.1);
}

TEST(McEstimate, PartialLosslessMatchesIndependentRows) {
  for (int n : {1, 2, 4})
    for (int m : {1, 3}) {
      const SetupConfig c = make(Preset::Lossless, Variant::Partial, n, m);
      const McEstimate e = mc_estimate(c, {100'000, 77, 0});
      EXPECT_NEAR(e.lossless.success_prob, oracle::partial_unlimited_lossless(0.1, m, n),
                  4 * success_stderr(e.lossless, c) + 1e-12);
      EXPECT_EQ(e.lossless, e.lossy);
    }
}

// Lossy partial estimate against an exact enumeration of every small grid.
TEST(McEstimate, PartialMatchesBruteForce) {
  for (Occupancy occ : {Occupancy::Unlimited, Occupancy::Single}) {
    const SetupConfig c = make(Preset::OneLoopDefault, Variant::Partial, 2, 1, 0.3, occ);
    const ExactSuccess exact = brute_force_success(c);
    const McEstimate e = mc_estimate(c, {200'000, 31, 0});
    EXPECT_NEAR(e.lossless.success_prob, exact.p_lossless, 4 * success_stderr(e.lossless, c));
    EXPECT_NEAR(e.lossy.success_prob, exact.p_lossy, 4 * success_stderr(e.lossy, c));
  }
}

TEST(McEstimate, SingleOccupancyNeverBeatsUnlimited) {
  const SetupConfig u = make(Preset::OneLoopDefault, Variant::Partial, 3, 4, 0.1, Occupancy::Unlimited);
  SetupConfig s = u;
  s.occupancy = Occupancy::Single;
  // Same seed, same grids: single-occupancy successes are a subset.
  const McEstimate eu = mc_estimate(u, {50'000, 3, 1});
  const McEstimate es = mc_estimate(s, {50'000, 3, 1});
  EXPECT_LE(es.lossless.success_prob, eu.lossless.success_prob);
  EXPECT_LE(es.lossy.success_prob, eu.lossy.success_prob);
}

TEST(McOptimalM, SingleCandidate) {
  const McOptimum best = mc_optimal_m(make(Preset::OneLoopDefault, Variant::Partial, 2, 1), {1000, 1, 1}, 1);
  EXPECT_EQ(best.m, 1);
  EXPECT_THROW(mc_optimal_m(make(Preset::OneLoopDefault, Variant::Partial, 2, 1), {1000, 1, 1}, 0), DomainError);
}

TEST(McOptimalM, FixedLosslessNearAnalyticOptimum) {
  const SetupConfig c = make(Preset::Lossless, Variant::Fixed, 2, 1, 0.3);
  const int analytic = optimal_m(c, 30, RateObjective::Lossless).m;
  const McOptimum best = mc_optimal_m(c, {200'000, 8, 0}, 30);
  EXPECT_LE(std::abs(best.m - analytic), 2);
}

TEST(McOptimalM, PartialBeatsFixedWithoutLoss) {
  const SetupConfig c = make(Preset::Lossless, Variant::Partial, 4, 1);
  SetupConfig fixed = c;
  fixed.variant = Variant::Fixed;
  const McOptimum partial = mc_optimal_m(c, {50'000, 21, 0}, 10);
  const OptimalM analytic = optimal_m(fixed, 300, RateObjective::Lossless);
  EXPECT_GE(partial.estimate.lossless.rate_per_bin,
            analytic.rate.rate_per_bin - 3 * partial.estimate.lossless.std_error);
}
