#pragma once

// Markov-chain runtime theory for the resampling hill climber on noisy OneMax.
//
// The number of ones i is a birth-death chain on {0, ..., n} absorbed at n.
// From state i a generation moves up with probability ((n-i)/n) p_TA, down
// with probability (i/n) p_FA, and stays otherwise. With p_TR = p_TA the
// expected time to climb one level satisfies
//
//   E[1|0]   = 1 / p_TA
//   E[i+1|i] = i (1 - p_TA) / ((n - i) p_TA) * E[i|i-1] + n / ((n - i) p_TA)
//
// and the hitting time from all-zeros is the sum of those terms. Each
// generation of the resampling climber costs 2r evaluations.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmhc/rng.hpp"

namespace rmhc {

/// Thrown when the hitting-time recursion leaves the double range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Error function. Backed by the C library, whose erf is accurate to a few
/// ulp; tests check it against an independent quadrature.
inline double erf(double x) noexcept { return std::erf(x); }

struct AcceptanceProbs {
  double p_ta;
  double p_fa;
  double p_tr;
  double p_fr;

  /// p_TR = p_TA under additive Gaussian noise; false rates are complements.
  static AcceptanceProbs from_true_acceptance(double p_ta) {
    if (!(p_ta >= 0.0 && p_ta <= 1.0)) {
      throw std::invalid_argument("AcceptanceProbs: p_ta must lie in [0, 1]");
    }
    return {p_ta, 1.0 - p_ta, p_ta, 1.0 - p_ta};
  }
};

namespace detail {

inline void require_positive_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sigma must be finite and > 0; use p_ta = 1 for the noise-free limit");
  }
}

inline void require_r(std::uint64_t r) {
  if (r < 1) throw std::invalid_argument("r must be >= 1");
}

}  // namespace detail

/// Single evaluation of parent and offspring: the difference of two readings
/// has variance 2 sigma^2.
inline double p_ta_case1(double sigma) {
  detail::require_positive_sigma(sigma);
  return 0.5 + 0.5 * rmhc::erf(1.0 / (2.0 * sigma));
}

/// Both genomes averaged over r readings, no stored statistic.
inline double p_ta_resampled(std::uint64_t r, double sigma) {
  detail::require_r(r);
  detail::require_positive_sigma(sigma);
  return 0.5 + 0.5 * rmhc::erf(std::sqrt(static_cast<double>(r)) / (2.0 * sigma));
}

/// Parent's running mean backed by M + r readings, offspring by r.
inline double p_ta_with_history(std::uint64_t r, std::uint64_t M, double sigma) {
  detail::require_r(r);
  detail::require_positive_sigma(sigma);
  const auto rr = static_cast<double>(r);
  const auto m = static_cast<double>(M);
  return 0.5 + 0.5 * rmhc::erf(std::sqrt(rr * (m + rr) / (2.0 * (m + 2.0 * rr))) / sigma);
}

struct Transition {
  double up;
  double stay;
  double down;
};

inline Transition transition_probs(std::size_t n, std::size_t i, const AcceptanceProbs& acc) {
  if (n < 1 || i >= n) throw std::out_of_range("transition_probs: need 0 <= i <= n - 1");
  const double zeros = static_cast<double>(n - i) / static_cast<double>(n);
  const double ones = static_cast<double>(i) / static_cast<double>(n);
  return {zeros * acc.p_ta, ones * acc.p_tr + zeros * acc.p_fr, ones * acc.p_fa};
}

struct TheoryResult {
  std::size_t n = 0;
  std::uint64_t r = 1;
  double sigma = 1.0;
  double p_ta = 1.0;
  double expected_generations = 0.0;  // E[n|0]
  double expected_evaluations = 0.0;  // 2r E[n|0]
  std::vector<double> per_step;       // E[i+1|i], i = 0..n-1
};

/// Runs the recursion for a given p_TA. Fills n, p_ta, per_step and
/// expected_generations; the caller sets r/sigma/expected_evaluations.
inline TheoryResult expected_generations(std::size_t n, double p_ta) {
  if (n < 1) throw std::invalid_argument("expected_generations: n must be >= 1");
  if (!(p_ta > 0.5 && p_ta <= 1.0)) {
    throw std::invalid_argument("expected_generations: p_ta must lie in (0.5, 1]");
  }

  TheoryResult out;
  out.n = n;
  out.p_ta = p_ta;
  out.per_step.reserve(n);

  const auto nn = static_cast<double>(n);
  double step = 1.0 / p_ta;
  // Neumaier-compensated running sum of the per-step expectations.
  double sum = 0.0;
  double compensation = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const auto ii = static_cast<double>(i);
      const double denom = (nn - ii) * p_ta;
      step = ii * (1.0 - p_ta) / denom * step + nn / denom;
    }
    if (!std::isfinite(step)) {
      throw OverflowError("expected_generations: recursion overflowed at n=" + std::to_string(n) +
                          ", step " + std::to_string(i));
    }
    out.per_step.push_back(step);
    const double t = sum + step;
    compensation += std::abs(sum) >= std::abs(step) ? (sum - t) + step : (step - t) + sum;
    sum = t;
  }
  out.expected_generations = sum + compensation;
  if (!std::isfinite(out.expected_generations)) {
    throw OverflowError("expected_generations: total overflowed at n=" + std::to_string(n));
  }
  return out;
}

/// Same as expected_evaluations() but with a caller-supplied p_TA.
inline TheoryResult expected_evaluations_for(std::size_t n, std::uint64_t r, double sigma,
                                             double p_ta) {
  detail::require_r(r);
  TheoryResult out = expected_generations(n, p_ta);
  out.r = r;
  out.sigma = sigma;
  out.expected_evaluations = 2.0 * static_cast<double>(r) * out.expected_generations;
  if (!std::isfinite(out.expected_evaluations)) {
    throw OverflowError("expected_evaluations: overflow at n=" + std::to_string(n) +
                        ", r=" + std::to_string(r));
  }
  return out;
}

/// Expected evaluations to solve from all-zeros without a stored statistic.
inline TheoryResult expected_evaluations(std::size_t n, std::uint64_t r, double sigma = 1.0) {
  const double p_ta = p_ta_resampled(r, sigma);
  // p_ta rounds to exactly 0.5 only for astronomically large sigma/sqrt(r).
  if (!(p_ta > 0.5)) {
    throw OverflowError("expected_evaluations: p_ta indistinguishable from 0.5 at n=" +
                        std::to_string(n) + ", r=" + std::to_string(r));
  }
  return expected_evaluations_for(n, r, sigma, p_ta);
}

struct OptimalResampling {
  std::uint64_t r_star = 0;
  double cost = std::numeric_limits<double>::infinity();
  bool bound_hit = false;          // the minimum was not bracketed below r_max
  std::uint64_t r_scanned = 0;     // last r evaluated
  std::vector<double> cost_curve;  // cost for r = 1..r_scanned (inf on overflow)
};

/// Linear scan over r = 1..r_max. Stops early once the cost has risen for 20
/// consecutive r and exceeds twice the incumbent. Ties keep the smallest r.
/// An r whose recursion overflows is treated as infinite cost.
inline OptimalResampling optimal_resampling(std::size_t n, double sigma,
                                            std::uint64_t r_max = 1000) {
  if (r_max < 1) throw std::invalid_argument("optimal_resampling: r_max must be >= 1");
  detail::require_positive_sigma(sigma);

  constexpr int kRisingRun = 20;
  OptimalResampling best;
  double previous = std::numeric_limits<double>::infinity();
  int rising = 0;
  for (std::uint64_t r = 1; r <= r_max; ++r) {
    double cost = std::numeric_limits<double>::infinity();
    try {
      cost = expected_evaluations(n, r, sigma).expected_evaluations;
    } catch (const OverflowError&) {
    }
    best.cost_curve.push_back(cost);
    best.r_scanned = r;
    if (cost < best.cost) {
      best.cost = cost;
      best.r_star = r;
    }
    rising = (std::isfinite(cost) && cost > previous) ? rising + 1 : 0;
    previous = cost;
    if (rising >= kRisingRun && cost > 2.0 * best.cost) break;
  }
  if (best.r_star == 0) {
    throw OverflowError("optimal_resampling: every r up to r_max overflowed at n=" +
                        std::to_string(n));
  }
  best.bound_hit = best.r_star == best.r_scanned;
  return best;
}

struct ChainEstimate {
  double mean_generations = 0.0;
  double std_error = 0.0;
  std::uint64_t episodes = 0;
};

/// Monte-Carlo walk of the abstract birth-death chain from state 0 to n.
inline ChainEstimate simulate_chain(std::size_t n, double p_ta, std::uint64_t episodes,
                                    RngStream& rng) {
  if (n < 1) throw std::invalid_argument("simulate_chain: n must be >= 1");
  if (episodes < 1) throw std::invalid_argument("simulate_chain: episodes must be >= 1");
  const auto acc = AcceptanceProbs::from_true_acceptance(p_ta);

  std::vector<Transition> table;
  table.reserve(n);
  for (std::size_t i = 0; i < n; ++i) table.push_back(transition_probs(n, i, acc));

  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t e = 1; e <= episodes; ++e) {
    std::size_t state = 0;
    std::uint64_t steps = 0;
    while (state < n) {
      const double u = rng.uniform01();
      const Transition& t = table[state];
      if (u < t.up) {
        ++state;
      } else if (u < t.up + t.down) {
        --state;
      }
      ++steps;
    }
    // Welford update.
    const auto x = static_cast<double>(steps);
    const double delta = x - mean;
    mean += delta / static_cast<double>(e);
    m2 += delta * (x - mean);
  }

  ChainEstimate out;
  out.mean_generations = mean;
  out.episodes = episodes;
  out.std_error = episodes > 1
                      ? std::sqrt(m2 / static_cast<double>(episodes - 1) / static_cast<double>(episodes))
                      : 0.0;
  return out;
}

}  // namespace rmhc
