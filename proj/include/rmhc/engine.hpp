#pragma once

// Random Mutation Hill-Climbing on OneMax.
//
// run_noise_free: the plain hill climber; the parent's fitness is stored, so
//   each generation costs one evaluation (N starts at 1 for the initial one).
// run_noisy: the resampling climber; each generation evaluates parent and
//   offspring r times each (N += 2r). With store_statistic the parent keeps a
//   running mean over all M evaluations made since it became best-so-far.
//
// Termination uses the noise-free fitness as an external oracle. It never
// feeds a search decision and is not counted in N.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rmhc/onemax.hpp"
#include "rmhc/rng.hpp"

namespace rmhc {

struct PolicyConfig {
  std::uint64_t r = 1;
  bool store_statistic = false;
  std::uint64_t budget = 10'000'000;
  double sigma = 1.0;
  bool record_trajectory = false;

  void validate() const {
    if (r < 1) throw std::invalid_argument("PolicyConfig: r must be >= 1");
    if (budget < 1) throw std::invalid_argument("PolicyConfig: budget must be >= 1");
    NoiseModel{sigma}.validate();
  }
};

struct SearchState {
  Genome current;
  double best_fit_so_far = 0.0;
  std::uint64_t M = 0;  // evaluations backing best_fit_so_far
  std::uint64_t N = 0;  // total fitness evaluations
};

struct TrajectoryPoint {
  std::uint64_t generation;
  std::size_t true_fitness;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

struct RunResult {
  bool solved = false;
  std::uint64_t evaluations_used = 0;
  std::uint64_t generations = 0;
  std::size_t final_true_fitness = 0;
  std::uint64_t oracle_checks = 0;
  std::optional<std::vector<TrajectoryPoint>> trajectory;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// What an observer sees after each generation of run_noisy.
struct GenerationEvent {
  std::uint64_t generation;  // 1-based
  std::size_t k;             // 1-based mutated position
  std::span<const double> parent_samples;
  std::span<const double> offspring_samples;
  double fit_x;
  double fit_y;
  double reference;  // averageFitness_x (case 3) or fit_x (case 2)
  bool accepted;
  const SearchState& state;  // after the update
};

struct NullObserver {
  void operator()(const GenerationEvent&) const noexcept {}
};

/// Ties are accepted.
constexpr bool accept_decision(double fit_y, double reference) noexcept {
  return fit_y >= reference;
}

namespace detail {

inline void check_init(std::size_t n, const Genome& init) {
  if (n < 1) throw std::invalid_argument("run: n must be >= 1");
  if (init.size() != n) throw std::invalid_argument("run: init genome length differs from n");
}

// Mean of r fresh noisy evaluations; the individual draws go to `samples`.
inline double resample_mean(const Genome& g, const NoiseModel& noise, std::uint64_t r,
                            RngStream& rng, std::vector<double>& samples) {
  double sum = 0.0;
  for (std::uint64_t i = 0; i < r; ++i) {
    samples[i] = noisy_fitness(g, noise, rng);
    sum += samples[i];
  }
  return sum / static_cast<double>(r);
}

}  // namespace detail

inline RunResult run_noise_free(std::size_t n, const Genome& init, std::uint64_t budget,
                                RngStream& rng, bool record_trajectory = false) {
  detail::check_init(n, init);
  if (budget < 1) throw std::invalid_argument("run_noise_free: budget must be >= 1");

  RunResult result;
  if (record_trajectory) result.trajectory.emplace();

  Genome x = init;
  Genome y = init;
  auto best_fit = static_cast<double>(true_fitness(x));
  std::uint64_t evaluations = 1;

  auto reached_optimum = [&] {
    ++result.oracle_checks;
    return true_fitness(x) == n;
  };
  if (result.trajectory) result.trajectory->push_back({0, true_fitness(x)});

  bool solved = reached_optimum();
  while (!solved && evaluations < budget) {
    const auto k = static_cast<std::size_t>(rng.uniform_index(n));
    y = x;
    y.flip(k);
    const auto fit_y = static_cast<double>(true_fitness(y));
    ++evaluations;
    if (accept_decision(fit_y, best_fit)) {
      std::swap(x, y);
      best_fit = fit_y;
    }
    ++result.generations;
    if (result.trajectory) result.trajectory->push_back({result.generations, true_fitness(x)});
    solved = reached_optimum();
  }

  result.solved = solved;
  result.evaluations_used = evaluations;
  result.final_true_fitness = true_fitness(x);
  return result;
}

/// Resampling hill climber. `observer` is invoked once per generation.
template <typename Observer = NullObserver>
RunResult run_noisy(std::size_t n, const Genome& init, const PolicyConfig& cfg, RngStream& rng,
                    Observer&& observer = {}) {
  detail::check_init(n, init);
  cfg.validate();

  const NoiseModel noise{cfg.sigma};
  const std::uint64_t r = cfg.r;
  const auto r_real = static_cast<double>(r);

  RunResult result;
  if (cfg.record_trajectory) result.trajectory.emplace();

  SearchState state{init, 0.0, 0, 0};
  Genome y = init;
  std::vector<double> parent_samples(r);
  std::vector<double> offspring_samples(r);

  auto reached_optimum = [&] {
    ++result.oracle_checks;
    return true_fitness(state.current) == n;
  };
  if (result.trajectory) result.trajectory->push_back({0, true_fitness(state.current)});

  bool solved = reached_optimum();
  while (!solved && state.N < cfg.budget) {
    const auto k = static_cast<std::size_t>(rng.uniform_index(n));
    y = state.current;
    y.flip(k);
    const double fit_x = detail::resample_mean(state.current, noise, r, rng, parent_samples);
    const double fit_y = detail::resample_mean(y, noise, r, rng, offspring_samples);
    state.N += 2 * r;

    double reference = fit_x;
    if (cfg.store_statistic) {
      const auto m = static_cast<double>(state.M);
      reference = (state.best_fit_so_far * m + fit_x * r_real) / (m + r_real);
    }

    const bool accepted = accept_decision(fit_y, reference);
    if (cfg.store_statistic) {
      if (accepted) {
        state.best_fit_so_far = fit_y;
        state.M = r;
      } else {
        state.best_fit_so_far = reference;
        state.M += r;
      }
    } else {
      state.best_fit_so_far = accepted ? fit_y : fit_x;
    }
    if (accepted) std::swap(state.current, y);

    ++result.generations;
    if (result.trajectory) {
      result.trajectory->push_back({result.generations, true_fitness(state.current)});
    }
    observer(GenerationEvent{result.generations, k + 1, parent_samples, offspring_samples, fit_x,
                             fit_y, reference, accepted, state});
    solved = reached_optimum();
  }

  result.solved = solved;
  result.evaluations_used = state.N;
  result.final_true_fitness = true_fitness(state.current);
  return result;
}

}  // namespace rmhc
