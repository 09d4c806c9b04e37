// rmhc: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 numerical overflow,
// 3 budget exhausted (run), 4 validation tolerance breach.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "rmhc/rmhc.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kOverflow = 2,
  kBudgetExhausted = 3,
  kToleranceBreach = 4,
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::filesystem::path default_out(const std::string& name) {
  if (const char* dir = std::getenv("RMHC_OUT_DIR"); dir != nullptr && *dir != '\0') {
    return std::filesystem::path(dir) / name;
  }
  return std::filesystem::path(name);
}

struct TheoryArgs {
  std::size_t n = 10;
  std::uint64_t r = 1;
  double sigma = 1.0;
  std::string r_range;
  std::optional<double> p_ta_override;
  std::string out;
};

struct OptimalArgs {
  std::vector<std::size_t> n_list{10};
  double sigma = 1.0;
  std::uint64_t r_max = 1000;
  std::string out;
};

struct RunArgs {
  std::size_t n = 10;
  std::uint64_t r = 1;
  double sigma = 1.0;
  std::uint64_t budget = 10'000'000;
  std::uint64_t seed = 0;
  bool store_statistic = false;
  bool noise_free = false;
  std::string init = "all-zeros";
};

struct ValidateArgs {
  std::uint64_t trials = 10'000;
  double tolerance = 0.02;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
};

struct SweepArgs {
  std::vector<std::size_t> n_list{10};
  std::vector<std::uint64_t> r_list{1};
  double sigma = 1.0;
  std::uint64_t trials = 100;
  std::uint64_t budget = 10'000'000;
  bool store_statistic = false;
  bool censored_mean = false;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string init = "all-zeros";
  std::string out;
};

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--r-range", "expected FIRST:LAST");
  const auto first = std::stoull(text.substr(0, colon));
  const auto last = std::stoull(text.substr(colon + 1));
  if (first < 1 || last < first) throw CLI::ValidationError("--r-range", "need 1 <= FIRST <= LAST");
  return {first, last};
}

int cmd_theory(const TheoryArgs& a) {
  std::uint64_t r_first = a.r;
  std::uint64_t r_last = a.r;
  if (!a.r_range.empty()) std::tie(r_first, r_last) = parse_range(a.r_range);

  std::ostringstream csv;
  csv << "n,r,sigma,p_ta,expected_generations,expected_evaluations\n";
  std::cout << "n\tr\tsigma\tp_ta\texpected_generations\texpected_evaluations\n";
  for (std::uint64_t r = r_first; r <= r_last; ++r) {
    try {
      const rmhc::TheoryResult t =
          a.p_ta_override ? rmhc::expected_evaluations_for(a.n, r, a.sigma, *a.p_ta_override)
                          : rmhc::expected_evaluations(a.n, r, a.sigma);
      std::cout << t.n << '\t' << t.r << '\t' << a.sigma << '\t' << fixed(t.p_ta, 9) << '\t'
                << fixed(t.expected_generations) << '\t' << fixed(t.expected_evaluations) << '\n';
      csv << t.n << ',' << t.r << ',' << rmhc::detail::format_double(a.sigma) << ','
          << rmhc::detail::format_double(t.p_ta) << ','
          << rmhc::detail::format_double(t.expected_generations) << ','
          << rmhc::detail::format_double(t.expected_evaluations) << '\n';
    } catch (const rmhc::OverflowError& e) {
      std::cerr << "error: numerical overflow for (n=" << a.n << ", r=" << r << "): " << e.what()
                << '\n';
      return kOverflow;
    }
  }
  if (!a.out.empty()) rmhc::detail::write_file(a.out, csv.str());
  return kOk;
}

int cmd_optimal_r(const OptimalArgs& a) {
  std::ostringstream curves;
  curves << "n,r,expected_evaluations\n";
  std::cout << "n\tr_star\tcost\tbound_hit\n";
  for (std::size_t n : a.n_list) {
    rmhc::OptimalResampling opt;
    try {
      opt = rmhc::optimal_resampling(n, a.sigma, a.r_max);
    } catch (const rmhc::OverflowError& e) {
      std::cerr << "error: numerical overflow for n=" << n << ": " << e.what() << '\n';
      return kOverflow;
    }
    std::cout << n << '\t' << opt.r_star << '\t' << fixed(opt.cost) << '\t'
              << (opt.bound_hit ? "r_max-bound-hit" : "no") << '\n';
    for (std::size_t i = 0; i < opt.cost_curve.size(); ++i) {
      if (!std::isfinite(opt.cost_curve[i])) continue;
      curves << n << ',' << i + 1 << ',' << rmhc::detail::format_double(opt.cost_curve[i]) << '\n';
    }
  }
  if (!a.out.empty()) rmhc::detail::write_file(a.out, curves.str());
  return kOk;
}

int cmd_run(const RunArgs& a) {
  rmhc::RngStream rng(a.seed);
  const auto policy = rmhc::parse_init_policy(a.init);
  const rmhc::Genome init =
      policy == rmhc::InitPolicy::AllZeros ? rmhc::Genome::zeros(a.n) : rmhc::Genome::random(a.n, rng);

  rmhc::RunResult res;
  if (a.noise_free) {
    res = rmhc::run_noise_free(a.n, init, a.budget, rng);
  } else {
    rmhc::PolicyConfig cfg;
    cfg.r = a.r;
    cfg.sigma = a.sigma;
    cfg.budget = a.budget;
    cfg.store_statistic = a.store_statistic;
    res = rmhc::run_noisy(a.n, init, cfg, rng);
  }

  std::cout << "algorithm: " << (a.noise_free ? "noise-free" : "resampling") << '\n'
            << "n: " << a.n << '\n'
            << "r: " << a.r << '\n'
            << "sigma: " << a.sigma << '\n'
            << "budget: " << a.budget << '\n'
            << "seed: " << a.seed << '\n'
            << "store_statistic: " << (a.store_statistic ? "true" : "false") << '\n'
            << "init: " << rmhc::to_string(policy) << '\n'
            << "solved: " << (res.solved ? "true" : "false") << '\n'
            << "evaluations_used: " << res.evaluations_used << '\n'
            << "generations: " << res.generations << '\n'
            << "final_true_fitness: " << res.final_true_fitness << '\n';
  return res.solved ? kOk : kBudgetExhausted;
}

int cmd_validate(const ValidateArgs& a) {
  rmhc::ExperimentConfig cfg = rmhc::table_validation_config();
  cfg.trials = a.trials;
  cfg.master_seed = a.seed;
  cfg.threads = a.threads;
  const rmhc::ValidationTable table = rmhc::validate_table(cfg, a.tolerance);

  std::cout << "n\tr\ttheory\tempirical\tstd_error\trel_error\tstatus\n";
  for (const auto& row : table.rows) {
    std::cout << row.n << '\t' << row.r << '\t' << fixed(row.theory_evaluations) << '\t'
              << (row.empirical_mean ? fixed(*row.empirical_mean) : "-") << '\t'
              << (row.std_error ? fixed(*row.std_error) : "-") << '\t'
              << (row.relative_error ? fixed(*row.relative_error, 5) : "-") << '\t'
              << (row.within_tolerance ? "ok" : "BREACH") << '\n';
  }
  std::cout << "tolerance: " << a.tolerance << "  trials: " << a.trials << "  seed: " << a.seed << '\n';
  if (!a.out.empty()) rmhc::persist_report(table.report, a.out);
  return table.all_within() ? kOk : kToleranceBreach;
}

int cmd_sweep(const SweepArgs& a) {
  rmhc::ExperimentConfig cfg;
  cfg.n_list = a.n_list;
  cfg.r_list = a.r_list;
  cfg.sigma = a.sigma;
  cfg.trials = a.trials;
  cfg.budget = a.budget;
  cfg.store_statistic = a.store_statistic;
  cfg.censored_mean = a.censored_mean;
  cfg.master_seed = a.seed;
  cfg.threads = a.threads;
  cfg.init_policy = rmhc::parse_init_policy(a.init);

  const rmhc::ExperimentReport report = rmhc::sweep(cfg);
  const std::filesystem::path stem = a.out.empty() ? default_out("sweep") : std::filesystem::path(a.out);
  const auto paths = rmhc::persist_report(report, stem);
  const auto plots = rmhc::persist_gnuplot(report, stem);

  std::cout << "n\tbest_r\tmean_evaluations\n";
  for (const auto& best : report.argmin) {
    std::cout << best.n << '\t' << (best.r ? std::to_string(*best.r) : "-") << '\t'
              << (best.mean_evaluations ? fixed(*best.mean_evaluations) : "truncated") << '\n';
  }
  std::cout << "wrote " << paths.csv.string() << ", " << paths.json.string();
  for (const auto& p : plots) std::cout << ", " << p.string();
  std::cout << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random mutation hill-climbing with resampling on noisy OneMax"};
  app.require_subcommand(1);

  TheoryArgs theory;
  auto* sub_theory = app.add_subcommand("theory", "Expected evaluations from the Markov-chain recursion");
  sub_theory->add_option("--n", theory.n, "Problem dimension")->check(CLI::PositiveNumber);
  sub_theory->add_option("--r", theory.r, "Resampling number")->check(CLI::PositiveNumber);
  sub_theory->add_option("--sigma", theory.sigma, "Noise standard deviation")->check(CLI::PositiveNumber);
  sub_theory->add_option("--r-range", theory.r_range, "Emit one row per r in FIRST:LAST");
  sub_theory->add_option("--p-ta-override", theory.p_ta_override,
                         "Debug: use this acceptance probability instead of the noise model")
      ->check(CLI::Range(0.5, 1.0));
  sub_theory->add_option("--out", theory.out, "Also write the rows as CSV");

  OptimalArgs optimal;
  auto* sub_opt = app.add_subcommand("optimal-r", "Analytically optimal resampling number per n");
  sub_opt->add_option("--n-list", optimal.n_list, "Comma-separated dimensions")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sub_opt->add_option("--sigma", optimal.sigma, "Noise standard deviation")->check(CLI::PositiveNumber);
  sub_opt->add_option("--r-max", optimal.r_max, "Largest r to scan")->check(CLI::PositiveNumber);
  sub_opt->add_option("--out", optimal.out, "Write the full cost curves as CSV");

  RunArgs run;
  auto* sub_run = app.add_subcommand("run", "Single hill-climbing run");
  sub_run->add_option("--n", run.n, "Problem dimension")->check(CLI::PositiveNumber);
  auto* run_r = sub_run->add_option("--r", run.r, "Resampling number")->check(CLI::PositiveNumber);
  auto* run_sigma = sub_run->add_option("--sigma", run.sigma, "Noise standard deviation")
                        ->check(CLI::NonNegativeNumber);
  sub_run->add_option("--budget", run.budget, "Maximum fitness evaluations")->check(CLI::PositiveNumber);
  sub_run->add_option("--seed", run.seed, "Stream seed");
  auto* run_store = sub_run->add_flag("--store-statistic", run.store_statistic,
                                      "Keep the running mean of the best-so-far genome");
  sub_run->add_flag("--noise-free", run.noise_free, "Plain hill climber on the noise-free fitness")
      ->excludes(run_r)
      ->excludes(run_sigma)
      ->excludes(run_store);
  sub_run->add_option("--init", run.init, "all-zeros | uniform-random")
      ->check(CLI::IsMember({"all-zeros", "zeros", "uniform-random", "random"}));

  ValidateArgs validate;
  auto* sub_val = app.add_subcommand("validate", "Compare theory and simulation at n = 10, sigma = 1");
  sub_val->add_option("--trials", validate.trials, "Trials per r")->check(CLI::PositiveNumber);
  sub_val->add_option("--tolerance", validate.tolerance, "Allowed relative error")
      ->check(CLI::NonNegativeNumber);
  sub_val->add_option("--seed", validate.seed, "Master seed");
  sub_val->add_option("--threads", validate.threads, "Worker threads (0 = all cores)");
  sub_val->add_option("--out", validate.out, "Also persist the report to <stem>.csv/.json");

  SweepArgs sw;
  auto* sub_sweep = app.add_subcommand("sweep", "Empirical (n, r) sweep written as CSV, JSON and gnuplot data");
  sub_sweep->add_option("--n-list", sw.n_list, "Comma-separated dimensions")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sub_sweep->add_option("--r-list", sw.r_list, "Comma-separated resampling numbers")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sub_sweep->add_option("--sigma", sw.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  sub_sweep->add_option("--trials", sw.trials, "Trials per cell")->check(CLI::PositiveNumber);
  sub_sweep->add_option("--budget", sw.budget, "Maximum fitness evaluations per trial")
      ->check(CLI::PositiveNumber);
  sub_sweep->add_flag("--store-statistic", sw.store_statistic,
                      "Keep the running mean of the best-so-far genome");
  sub_sweep->add_flag("--censored-mean", sw.censored_mean,
                      "Average over all trials, including budget-truncated ones");
  sub_sweep->add_option("--seed", sw.seed, "Master seed");
  sub_sweep->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");
  sub_sweep->add_option("--init", sw.init, "all-zeros | uniform-random")
      ->check(CLI::IsMember({"all-zeros", "zeros", "uniform-random", "random"}));
  sub_sweep->add_option("--out", sw.out, "Output stem (default $RMHC_OUT_DIR/sweep or ./sweep)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sub_theory) return cmd_theory(theory);
    if (*sub_opt) return cmd_optimal_r(optimal);
    if (*sub_run) return cmd_run(run);
    if (*sub_val) return cmd_validate(validate);
    if (*sub_sweep) return cmd_sweep(sw);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const rmhc::OverflowError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOverflow;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
