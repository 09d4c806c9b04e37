#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "rmhc/engine.hpp"
#include "rmhc/onemax.hpp"
#include "rmhc/rng.hpp"
#include "rmhc/theory.hpp"

namespace rmhc {
namespace {

struct Stats {
  double mean;
  double std_error;
};

Stats summarize(const std::vector<double>& xs) {
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const auto count = static_cast<double>(xs.size());
  return {mean, std::sqrt(ss / (count - 1.0) / count)};
}

double harmonic(std::size_t n) {
  double h = 0.0;
  for (std::size_t k = n; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  return h;
}

PolicyConfig policy(std::uint64_t r, double sigma, bool store, std::uint64_t budget = 10'000'000) {
  PolicyConfig cfg;
  cfg.r = r;
  cfg.sigma = sigma;
  cfg.store_statistic = store;
  cfg.budget = budget;
  return cfg;
}

Stats noisy_mean_evaluations(std::size_t n, const PolicyConfig& cfg, int trials, std::uint64_t seed) {
  std::vector<double> evals;
  evals.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    RngStream rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    const RunResult res = run_noisy(n, Genome::zeros(n), cfg, rng);
    EXPECT_TRUE(res.solved);
    evals.push_back(static_cast<double>(res.evaluations_used));
  }
  return summarize(evals);
}

TEST(AcceptDecision, TiesAreAccepted) {
  EXPECT_TRUE(accept_decision(3.0, 3.0));
  EXPECT_FALSE(accept_decision(2.9, 3.0));
  EXPECT_TRUE(accept_decision(3.1, 3.0));
}

TEST(NoiseFree, SingleBit) {
  RngStream rng(1);
  const RunResult res = run_noise_free(1, Genome::zeros(1), 100, rng);
  EXPECT_TRUE(res.solved);
  EXPECT_EQ(res.evaluations_used, 2U);
  EXPECT_EQ(res.generations, 1U);
  EXPECT_EQ(res.final_true_fitness, 1U);
}

TEST(NoiseFree, BudgetCutoff) {
  RngStream rng(2);
  const RunResult res = run_noise_free(1000, Genome::zeros(1000), 5, rng);
  EXPECT_FALSE(res.solved);
  EXPECT_LE(res.evaluations_used, 6U);
  EXPECT_LT(res.final_true_fitness, 1000U);
}

TEST(NoiseFree, AlreadyOptimalCostsOneEvaluation) {
  RngStream rng(3);
  const RunResult res = run_noise_free(8, Genome::ones(8), 100, rng);
  EXPECT_TRUE(res.solved);
  EXPECT_EQ(res.evaluations_used, 1U);
  EXPECT_EQ(res.generations, 0U);
}

TEST(NoiseFree, MeanMatchesCouponCollector) {
  std::vector<double> evals;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    RngStream rng(derive_seed(100, {t}));
    evals.push_back(static_cast<double>(run_noise_free(10, Genome::zeros(10), 1'000'000, rng).evaluations_used));
  }
  const Stats s = summarize(evals);
  EXPECT_NEAR(s.mean, 10.0 * harmonic(10) + 1.0, 3 * s.std_error);
}

TEST(NoiseFree, RejectsMismatchedInit) {
  RngStream rng(4);
  EXPECT_THROW(run_noise_free(5, Genome::zeros(4), 10, rng), std::invalid_argument);
  EXPECT_THROW(run_noisy(5, Genome::zeros(4), policy(1, 1.0, false), rng), std::invalid_argument);
  EXPECT_THROW(run_noisy(4, Genome::zeros(4), policy(0, 1.0, false), rng), std::invalid_argument);
  EXPECT_THROW(run_noisy(4, Genome::zeros(4), policy(1, -1.0, false), rng), std::invalid_argument);
}

TEST(Noisy, ZeroNoiseMatchesCouponCollectorTimesTwo) {
  const Stats s = noisy_mean_evaluations(10, policy(1, 0.0, false), 1000, 200);
  EXPECT_NEAR(s.mean, 2.0 * 10.0 * harmonic(10), 3 * s.std_error);
}

TEST(Noisy, PublishedRowSingleEvaluation) {
  const Stats s = noisy_mean_evaluations(10, policy(1, 1.0, false), 10'000, 300);
  EXPECT_NEAR(s.mean, 205.8283, 0.02 * 205.8283);
}

TEST(Noisy, PublishedRowTenResamples) {
  const Stats s = noisy_mean_evaluations(10, policy(10, 1.0, false), 10'000, 301);
  EXPECT_NEAR(s.mean, 612.2250, 0.02 * 612.2250);
}

TEST(Noisy, BudgetSmallerThanOneGeneration) {
  RngStream rng(5);
  const RunResult res = run_noisy(100, Genome::zeros(100), policy(5, 1.0, false, 2), rng);
  EXPECT_FALSE(res.solved);
  EXPECT_EQ(res.generations, 1U);
  EXPECT_EQ(res.evaluations_used, 10U);
}

TEST(Noisy, EvaluationsAreTwoRPerGenerationAndWithinBudgetSlack) {
  RngStream seeds(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t r = 1 + seeds.uniform_index(8);
    const std::uint64_t budget = 1 + seeds.uniform_index(400);
    const bool store = seeds.uniform_index(2) == 1;
    RngStream rng(seeds.next_u64());
    const RunResult res = run_noisy(30, Genome::zeros(30), policy(r, 1.0, store, budget), rng);
    ASSERT_EQ(res.evaluations_used, 2 * r * res.generations);
    ASSERT_LE(res.evaluations_used, budget + 2 * r);
    if (res.solved) {
      ASSERT_EQ(res.final_true_fitness, 30U);
    } else {
      ASSERT_GE(res.evaluations_used, budget);
    }
  }
}

TEST(Noisy, ZeroNoiseNeverAcceptsWorseNorRejectsBetter) {
  for (bool store : {false, true}) {
    RngStream rng(7);
    const auto cfg = policy(3, 0.0, store);
    run_noisy(40, Genome::zeros(40), cfg, rng, [](const GenerationEvent& ev) {
      const bool improving = ev.fit_y > ev.fit_x;
      EXPECT_EQ(ev.accepted, improving);
    });
  }
}

TEST(Noisy, TrueFitnessMovesByAtMostOne) {
  RngStream rng(8);
  auto cfg = policy(2, 1.0, true);
  cfg.record_trajectory = true;
  const RunResult res = run_noisy(25, Genome::zeros(25), cfg, rng);
  ASSERT_TRUE(res.trajectory.has_value());
  ASSERT_EQ(res.trajectory->size(), res.generations + 1);
  for (std::size_t i = 1; i < res.trajectory->size(); ++i) {
    const auto a = static_cast<long>((*res.trajectory)[i - 1].true_fitness);
    const auto b = static_cast<long>((*res.trajectory)[i].true_fitness);
    ASSERT_LE(std::abs(a - b), 1);
    ASSERT_EQ((*res.trajectory)[i].generation, i);
  }
}

TEST(Noisy, TrajectoryIsOffByDefault) {
  RngStream rng(9);
  EXPECT_FALSE(run_noisy(5, Genome::zeros(5), policy(1, 1.0, false), rng).trajectory.has_value());
}

TEST(Noisy, DeterministicReplay) {
  for (bool store : {false, true}) {
    auto cfg = policy(3, 1.0, store);
    cfg.record_trajectory = true;
    RngStream a(1234);
    RngStream b(1234);
    const Genome init = Genome::from_string("0110010000111000");
    EXPECT_EQ(run_noisy(16, init, cfg, a), run_noisy(16, init, cfg, b));
  }
  RngStream a(55);
  RngStream b(55);
  EXPECT_EQ(run_noise_free(64, Genome::zeros(64), 100000, a, true),
            run_noise_free(64, Genome::zeros(64), 100000, b, true));
}

// Replays the evaluation log: the stored statistic must equal the mean of
// every reading of the current best-so-far genome since it was accepted.
TEST(Noisy, StoredStatisticIsMeanOfAllReadings) {
  RngStream rng(10);
  const auto cfg = policy(3, 1.0, true);
  std::vector<double> readings;
  std::uint64_t checked = 0;
  run_noisy(20, Genome::zeros(20), cfg, rng, [&](const GenerationEvent& ev) {
    if (ev.accepted) {
      readings.assign(ev.offspring_samples.begin(), ev.offspring_samples.end());
    } else {
      readings.insert(readings.end(), ev.parent_samples.begin(), ev.parent_samples.end());
    }
    ASSERT_EQ(ev.state.M, readings.size());
    ASSERT_EQ(ev.state.M % cfg.r, 0U);
    const double mean = std::accumulate(readings.begin(), readings.end(), 0.0) /
                        static_cast<double>(readings.size());
    ASSERT_NEAR(ev.state.best_fit_so_far, mean, 1e-9 * (1.0 + std::abs(mean)));
    ++checked;
  });
  EXPECT_GT(checked, 10U);
}

TEST(Noisy, FirstGenerationReferenceIsParentMean) {
  RngStream rng(11);
  bool first = true;
  run_noisy(10, Genome::zeros(10), policy(4, 1.0, true), rng, [&](const GenerationEvent& ev) {
    if (first) {
      EXPECT_EQ(ev.reference, ev.fit_x);
      first = false;
    }
  });
}

TEST(Noisy, WithoutStatisticMStaysZero) {
  RngStream rng(12);
  run_noisy(10, Genome::zeros(10), policy(4, 1.0, false), rng, [](const GenerationEvent& ev) {
    ASSERT_EQ(ev.state.M, 0U);
    ASSERT_EQ(ev.reference, ev.fit_x);
  });
}

TEST(Noisy, OracleIsNotCountedAsEvaluation) {
  RngStream rng(13);
  const RunResult res = run_noisy(10, Genome::zeros(10), policy(2, 1.0, false), rng);
  EXPECT_EQ(res.oracle_checks, res.generations + 1);
  EXPECT_EQ(res.evaluations_used, 4 * res.generations);
}

}  // namespace
}  // namespace rmhc
