#pragma once

// Repeated-trial experiments, theory validation and sweep persistence.
//
// Trial t of cell (n, r) runs on RngStream(derive_seed(master_seed, {n, r, t})),
// so results do not depend on thread count or scheduling. Per-trial results
// are reduced in trial-index order.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmhc/engine.hpp"
#include "rmhc/onemax.hpp"
#include "rmhc/rng.hpp"
#include "rmhc/theory.hpp"

namespace rmhc {

inline constexpr std::string_view kToolName = "rmhc";
inline constexpr std::string_view kToolVersion = "1.0.0";

enum class InitPolicy { AllZeros, UniformRandom };

inline std::string_view to_string(InitPolicy p) noexcept {
  return p == InitPolicy::AllZeros ? "all-zeros" : "uniform-random";
}

inline InitPolicy parse_init_policy(std::string_view s) {
  if (s == "all-zeros" || s == "zeros") return InitPolicy::AllZeros;
  if (s == "uniform-random" || s == "random") return InitPolicy::UniformRandom;
  throw std::invalid_argument("unknown init policy: " + std::string(s));
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::vector<std::size_t> n_list{10};
  std::vector<std::uint64_t> r_list{1};
  double sigma = 1.0;
  std::uint64_t trials = 100;
  std::uint64_t budget = 10'000'000;
  bool store_statistic = false;
  std::uint64_t master_seed = 0;
  InitPolicy init_policy = InitPolicy::AllZeros;
  // Include budget-truncated trials in the mean instead of dropping the cell.
  bool censored_mean = false;
  // Worker threads; 0 picks std::thread::hardware_concurrency(). Results do
  // not depend on this value.
  unsigned threads = 0;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (budget < 1) throw std::invalid_argument("ExperimentConfig: budget must be >= 1");
    if (n_list.empty()) throw std::invalid_argument("ExperimentConfig: n_list is empty");
    if (r_list.empty()) throw std::invalid_argument("ExperimentConfig: r_list is empty");
    for (auto n : n_list) {
      if (n < 1) throw std::invalid_argument("ExperimentConfig: every n must be >= 1");
    }
    for (auto r : r_list) {
      if (r < 1) throw std::invalid_argument("ExperimentConfig: every r must be >= 1");
    }
    NoiseModel{sigma}.validate();
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Ten thousand trials at n = 10, sigma = 1, r in {1, 2, 3, 4, 5, 10}.
inline ExperimentConfig table_validation_config() {
  ExperimentConfig cfg;
  cfg.n_list = {10};
  cfg.r_list = {1, 2, 3, 4, 5, 10};
  cfg.sigma = 1.0;
  cfg.trials = 10'000;
  cfg.store_statistic = false;
  return cfg;
}

struct CellRecord {
  std::size_t n = 0;
  std::uint64_t r = 0;
  double sigma = 0.0;
  bool store_statistic = false;
  std::uint64_t trials = 0;
  std::uint64_t success_count = 0;
  std::optional<double> mean_evaluations;
  std::optional<double> std_error;
  bool truncated = false;

  friend bool operator==(const CellRecord&, const CellRecord&) = default;
};

struct ArgminRecord {
  std::size_t n = 0;
  std::optional<std::uint64_t> r;  // empty when every cell for n is truncated
  std::optional<double> mean_evaluations;

  friend bool operator==(const ArgminRecord&, const ArgminRecord&) = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellRecord> cells;
  std::vector<ArgminRecord> argmin;
  double wall_time_seconds = 0.0;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

namespace detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Calls fn(i) for i in [0, count) across up to `threads` workers.
template <typename Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
  const auto workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

struct Moments {
  std::optional<double> mean;
  std::optional<double> std_error;
};

// Two-pass mean and standard error (unbiased variance), in input order.
inline Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  m.mean = mean;
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const auto count = static_cast<double>(xs.size());
    m.std_error = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  }
  return m;
}

// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

inline std::filesystem::path with_suffix(const std::filesystem::path& stem, std::string_view suffix) {
  auto p = stem;
  p.replace_extension();
  p += std::string(suffix);
  return p;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

/// One trial of cell (n, r) under cfg.
inline RunResult run_trial(std::size_t n, std::uint64_t r, const ExperimentConfig& cfg,
                           std::uint64_t trial_index) {
  RngStream rng(derive_seed(cfg.master_seed, {n, r, trial_index}));
  const Genome init =
      cfg.init_policy == InitPolicy::AllZeros ? Genome::zeros(n) : Genome::random(n, rng);
  PolicyConfig policy;
  policy.r = r;
  policy.store_statistic = cfg.store_statistic;
  policy.budget = cfg.budget;
  policy.sigma = cfg.sigma;
  return run_noisy(n, init, policy, rng);
}

inline CellRecord run_cell(std::size_t n, std::uint64_t r, const ExperimentConfig& cfg) {
  cfg.validate();
  if (n < 1 || r < 1) throw std::invalid_argument("run_cell: n and r must be >= 1");

  std::vector<std::uint64_t> evaluations(cfg.trials);
  std::vector<char> solved(cfg.trials);
  detail::parallel_for(cfg.trials, cfg.threads, [&](std::uint64_t t) {
    const RunResult res = run_trial(n, r, cfg, t);
    evaluations[t] = res.evaluations_used;
    solved[t] = res.solved ? 1 : 0;
  });

  CellRecord cell;
  cell.n = n;
  cell.r = r;
  cell.sigma = cfg.sigma;
  cell.store_statistic = cfg.store_statistic;
  cell.trials = cfg.trials;

  std::vector<double> sample;
  sample.reserve(cfg.trials);
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    if (solved[t]) ++cell.success_count;
    if (solved[t] || cfg.censored_mean) sample.push_back(static_cast<double>(evaluations[t]));
  }
  cell.truncated = cell.success_count != cell.trials;
  if (!cell.truncated || cfg.censored_mean) {
    const auto m = detail::moments(sample);
    cell.mean_evaluations = m.mean;
    cell.std_error = m.std_error;
  }
  return cell;
}

/// Cross product n_list x r_list, plus the empirical best r per n.
inline ExperimentReport sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  ExperimentReport report;
  report.config = cfg;
  for (std::size_t n : cfg.n_list) {
    ArgminRecord best{n, std::nullopt, std::nullopt};
    for (std::uint64_t r : cfg.r_list) {
      CellRecord cell = run_cell(n, r, cfg);
      if (!cell.truncated && cell.mean_evaluations &&
          (!best.mean_evaluations || *cell.mean_evaluations < *best.mean_evaluations)) {
        best.r = r;
        best.mean_evaluations = cell.mean_evaluations;
      }
      report.cells.push_back(std::move(cell));
    }
    report.argmin.push_back(best);
  }

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

struct ValidationRow {
  std::size_t n = 0;
  std::uint64_t r = 0;
  double theory_evaluations = 0.0;
  std::optional<double> empirical_mean;
  std::optional<double> std_error;
  std::optional<double> relative_error;
  bool within_tolerance = false;
};

struct ValidationTable {
  double tolerance = 0.02;
  std::vector<ValidationRow> rows;
  ExperimentReport report;

  [[nodiscard]] bool all_within() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const ValidationRow& row) { return row.within_tolerance; });
  }
};

/// Compares the analytic expected evaluations against the empirical mean for
/// every cell. The theory covers the no-stored-statistic climber from
/// all-zeros only.
inline ValidationTable validate_table(const ExperimentConfig& cfg, double tolerance = 0.02) {
  cfg.validate();
  if (cfg.store_statistic) {
    throw std::invalid_argument("validate_table: theory is only available without a stored statistic");
  }
  if (cfg.init_policy != InitPolicy::AllZeros) {
    throw std::invalid_argument("validate_table: theory assumes an all-zeros initial genome");
  }
  if (!(cfg.sigma > 0.0)) throw std::invalid_argument("validate_table: sigma must be > 0");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("validate_table: tolerance must be >= 0");

  ValidationTable table;
  table.tolerance = tolerance;
  table.report = sweep(cfg);
  for (const CellRecord& cell : table.report.cells) {
    ValidationRow row;
    row.n = cell.n;
    row.r = cell.r;
    row.theory_evaluations = expected_evaluations(cell.n, cell.r, cfg.sigma).expected_evaluations;
    row.empirical_mean = cell.mean_evaluations;
    row.std_error = cell.std_error;
    if (cell.mean_evaluations && !cell.truncated) {
      row.relative_error =
          std::abs(*cell.mean_evaluations - row.theory_evaluations) / row.theory_evaluations;
      row.within_tolerance = *row.relative_error <= tolerance;
    }
    table.rows.push_back(row);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr std::string_view kCsvHeader =
    "n,r,sigma,store_statistic,trials,success_count,mean_evaluations,std_error,truncated";

/// One row per cell. Missing means and standard errors are empty fields.
inline std::string to_csv(const ExperimentReport& report) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const CellRecord& c : report.cells) {
    out += std::to_string(c.n) + ',' + std::to_string(c.r) + ',' + detail::format_double(c.sigma) +
           ',' + (c.store_statistic ? "true" : "false") + ',' + std::to_string(c.trials) + ',' +
           std::to_string(c.success_count) + ',' +
           (c.mean_evaluations ? detail::format_double(*c.mean_evaluations) : "") + ',' +
           (c.std_error ? detail::format_double(*c.std_error) : "") + ',' +
           (c.truncated ? "true" : "false") + '\n';
  }
  return out;
}

/// gnuplot data for one n: "r mean std_error" rows, truncated cells omitted.
inline std::string to_gnuplot(const ExperimentReport& report, std::size_t n) {
  std::string out = "# n=" + std::to_string(n) + " sigma=" + detail::format_double(report.config.sigma) +
                    " store_statistic=" + (report.config.store_statistic ? "true" : "false") +
                    "\n# r mean_evaluations std_error\n";
  for (const CellRecord& c : report.cells) {
    if (c.n != n || c.truncated || !c.mean_evaluations) continue;
    out += std::to_string(c.r) + ' ' + detail::format_double(*c.mean_evaluations) + ' ' +
           (c.std_error ? detail::format_double(*c.std_error) : "0") + '\n';
  }
  return out;
}

namespace detail {

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace detail

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  return {{"n_list", cfg.n_list},
          {"r_list", cfg.r_list},
          {"sigma", cfg.sigma},
          {"trials", cfg.trials},
          {"budget", cfg.budget},
          {"store_statistic", cfg.store_statistic},
          {"master_seed", cfg.master_seed},
          {"init_policy", std::string(to_string(cfg.init_policy))},
          {"censored_mean", cfg.censored_mean},
          {"threads", cfg.threads}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.n_list = j.at("n_list").get<std::vector<std::size_t>>();
  cfg.r_list = j.at("r_list").get<std::vector<std::uint64_t>>();
  cfg.sigma = j.at("sigma").get<double>();
  cfg.trials = j.at("trials").get<std::uint64_t>();
  cfg.budget = j.at("budget").get<std::uint64_t>();
  cfg.store_statistic = j.at("store_statistic").get<bool>();
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  cfg.init_policy = parse_init_policy(j.at("init_policy").get<std::string>());
  cfg.censored_mean = j.value("censored_mean", false);
  cfg.threads = j.value("threads", 0U);
  return cfg;
}

inline nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellRecord& c : report.cells) {
    cells.push_back({{"n", c.n},
                     {"r", c.r},
                     {"sigma", c.sigma},
                     {"store_statistic", c.store_statistic},
                     {"trials", c.trials},
                     {"success_count", c.success_count},
                     {"mean_evaluations", detail::optional_json(c.mean_evaluations)},
                     {"std_error", detail::optional_json(c.std_error)},
                     {"truncated", c.truncated}});
  }
  nlohmann::json argmin = nlohmann::json::array();
  for (const ArgminRecord& a : report.argmin) {
    argmin.push_back({{"n", a.n},
                      {"r", detail::optional_json(a.r)},
                      {"mean_evaluations", detail::optional_json(a.mean_evaluations)}});
  }
  return {{"tool", std::string(kToolName)},
          {"version", std::string(kToolVersion)},
          {"rng", std::string(RngStream::algorithm_id)},
          {"config", to_json(report.config)},
          {"cells", std::move(cells)},
          {"argmin", std::move(argmin)},
          {"wall_time_seconds", report.wall_time_seconds}};
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport report;
  report.config = config_from_json(j.at("config"));
  for (const auto& c : j.at("cells")) {
    CellRecord cell;
    cell.n = c.at("n").get<std::size_t>();
    cell.r = c.at("r").get<std::uint64_t>();
    cell.sigma = c.at("sigma").get<double>();
    cell.store_statistic = c.at("store_statistic").get<bool>();
    cell.trials = c.at("trials").get<std::uint64_t>();
    cell.success_count = c.at("success_count").get<std::uint64_t>();
    cell.mean_evaluations = detail::optional_from<double>(c.at("mean_evaluations"));
    cell.std_error = detail::optional_from<double>(c.at("std_error"));
    cell.truncated = c.at("truncated").get<bool>();
    report.cells.push_back(cell);
  }
  for (const auto& a : j.at("argmin")) {
    report.argmin.push_back({a.at("n").get<std::size_t>(),
                             detail::optional_from<std::uint64_t>(a.at("r")),
                             detail::optional_from<double>(a.at("mean_evaluations"))});
  }
  report.wall_time_seconds = j.value("wall_time_seconds", 0.0);
  return report;
}

struct PersistedPaths {
  std::filesystem::path csv;
  std::filesystem::path json;
};

/// Writes `<stem>.csv` and `<stem>.json` (any extension on `stem` is replaced).
inline PersistedPaths persist_report(const ExperimentReport& report, const std::filesystem::path& stem) {
  PersistedPaths paths{detail::with_suffix(stem, ".csv"), detail::with_suffix(stem, ".json")};
  detail::write_file(paths.csv, to_csv(report));
  detail::write_file(paths.json, to_json(report).dump(2) + '\n');
  return paths;
}

/// Writes `<stem>_n<N>.dat` for every n in the report; returns the paths.
inline std::vector<std::filesystem::path> persist_gnuplot(const ExperimentReport& report,
                                                          const std::filesystem::path& stem) {
  std::vector<std::filesystem::path> paths;
  for (std::size_t n : report.config.n_list) {
    auto path = detail::with_suffix(stem, "_n" + std::to_string(n) + ".dat");
    detail::write_file(path, to_gnuplot(report, n));
    paths.push_back(std::move(path));
  }
  return paths;
}

inline ExperimentReport load_report(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open " + json_path.string() + " for reading");
  try {
    return report_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed report " + json_path.string() + ": " + e.what());
  }
}

}  // namespace rmhc
