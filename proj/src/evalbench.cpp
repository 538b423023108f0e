// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/evalbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "abhorizon/baselines.hpp"
#include "abhorizon/fit.hpp"
#include "abhorizon/nbp.hpp"
#include "abhorizon/rng.hpp"

namespace abh {

std::optional<double> accuracy_v(double observed, double predicted) {
  if (!(observed > 0.0)) return std::nullopt;
  return 1.0 - std::min(std::fabs(observed - predicted) / observed, 1.0);
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kJk1: return "jk1";
    case Method::kJk2: return "jk2";
    case Method::kJk3: return "jk3";
    case Method::kJk4: return "jk4";
    case Method::kGt: return "gt";
    case Method::kBb: return "bb";
    case Method::kBg: return "bg";
    case Method::kNbpMle: return "nbp-mle";
    case Method::kNbpRegression: return "nbp-regression";
  }
  throw std::logic_error("method_name: unknown method");
}

std::optional<Method> method_from_name(const std::string& name) {
  static const std::pair<const char*, Method> table[] = {
      {"jk1", Method::kJk1},       {"jk2", Method::kJk2},
      {"jk3", Method::kJk3},       {"jk4", Method::kJk4},
      {"gt", Method::kGt},         {"bb", Method::kBb},
      {"bg", Method::kBg},         {"nbp-mle", Method::kNbpMle},
      {"nbp-regression", Method::kNbpRegression},
  };
  for (const auto& [key, value] : table) {
    if (name == key) return value;
  }
  return std::nullopt;
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AB_HORIZON_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::int64_t> daily_arrivals(const SuffStats& stats) {
  std::vector<std::int64_t> daily(stats.arrivals.size());
  for (std::size_t d = 0; d < daily.size(); ++d) {
    daily[d] = stats.arrivals[d] - (d ? stats.arrivals[d - 1] : 0);
  }
  return daily;
}

void run_cell(const NamedDataset& dataset, const BenchmarkConfig& config,
              std::uint64_t cell_seed, AccuracyReport& report) {
  const auto started = std::chrono::steady_clock::now();
  const HoldoutTruth truth =
      holdout_truth(dataset.data, config.pilot_days, config.horizon);
  report.observed_new = static_cast<double>(truth.new_users);

  // Everything a method may read is derived from pilot days only.
  const SuffStats stats = compute_suffstats(dataset.data, config.pilot_days);
  const FreqSpectrum spectrum =
      compute_spectrum(dataset.data, config.pilot_days);

  double predicted = 0.0;
  switch (report.method) {
    case Method::kJk1:
    case Method::kJk2:
    case Method::kJk3:
    case Method::kJk4: {
      const int order = static_cast<int>(report.method) -
                        static_cast<int>(Method::kJk1) + 1;
      predicted = jackknife_predict(spectrum, config.pilot_days,
                                    config.horizon, order);
      break;
    }
    case Method::kGt:
      predicted = good_toulmin_predict(spectrum, config.pilot_days,
                                       config.horizon);
      break;
    case Method::kBb: {
      BbOptions options;
      options.fit_seed = cell_seed;
      predicted = beta_binomial_predict(spectrum, config.pilot_days,
                                        config.horizon, options);
      break;
    }
    case Method::kBg:
      predicted = beta_geometric_predict(daily_arrivals(stats), config.horizon,
                                         cell_seed);
      break;
    case Method::kNbpMle:
    case Method::kNbpRegression: {
      FitConfig fit_config;
      fit_config.seed = cell_seed;
      const FitResult fit =
          report.method == Method::kNbpMle
              ? fit_mle(stats, fit_config)
              : fit_regression(stats.arrivals, fit_config);
      predicted = predict_new_users(fit.params, stats, config.horizon).mean();
      // Total-activity scoring comes along for free with a fitted model.
      const Interval total = predict_total(fit.params, stats, config.horizon,
                                           50, 128, cell_seed);
      report.observed_total = static_cast<double>(truth.total);
      report.predicted_total = total.mean;
      report.v_tilde =
          accuracy_v(static_cast<double>(truth.total), total.mean);
      break;
    }
  }
  report.predicted_new = predicted;
  report.v = accuracy_v(report.observed_new, predicted);
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - started)
          .count();
}

}  // namespace

std::vector<AccuracyReport> run_benchmark(
    const std::vector<NamedDataset>& datasets, const BenchmarkConfig& config) {
  if (config.pilot_days < 1 || config.horizon < 0) {
    throw std::invalid_argument("run_benchmark: bad window");
  }
  std::vector<AccuracyReport> reports;
  reports.reserve(datasets.size() * config.methods.size());
  for (std::size_t di = 0; di < datasets.size(); ++di) {
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      AccuracyReport report;
      report.dataset = datasets[di].name;
      report.method = config.methods[mi];
      report.pilot_days = config.pilot_days;
      report.horizon = config.horizon;
      reports.push_back(std::move(report));
    }
  }

  SplitRng seeder(config.seed);
  std::vector<std::uint64_t> cell_seeds(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    cell_seeds[i] = seeder.split(i).next_u64();
  }

  const int threads =
      std::min<int>(resolve_threads(config.threads),
                    std::max<std::size_t>(reports.size(), 1));
  std::atomic<std::size_t> cursor{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= reports.size()) break;
      const std::size_t di = i / config.methods.size();
      try {
        run_cell(datasets[di], config, cell_seeds[i], reports[i]);
      } catch (const std::exception& e) {
        reports[i].error = e.what();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::sort(reports.begin(), reports.end(),
            [](const AccuracyReport& a, const AccuracyReport& b) {
              if (a.dataset != b.dataset) return a.dataset < b.dataset;
              return method_name(a.method) < method_name(b.method);
            });
  return reports;
}

std::vector<SurvivalPoint> survival_curve(std::span<const double> values,
                                          std::span<const double> grid) {
  if (values.empty()) {
    throw std::invalid_argument("survival_curve: no values");
  }
  std::vector<SurvivalPoint> curve;
  curve.reserve(grid.size());
  for (const double level : grid) {
    std::size_t hits = 0;
    for (const double v : values) {
      if (v >= level) ++hits;
    }
    curve.push_back(
        {level, static_cast<double>(hits) / static_cast<double>(values.size())});
  }
  return curve;
}

double quantile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile_linear: empty");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("quantile_linear: q outside [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double pos = q * (static_cast<double>(values.size()) - 1.0);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

std::vector<MethodSummary> summarize_by_method(
    const std::vector<AccuracyReport>& reports, ScoreKind kind) {
  std::map<std::string, std::pair<Method, std::vector<double>>> buckets;
  for (const AccuracyReport& report : reports) {
    const auto& score = kind == ScoreKind::kNewUsers ? report.v : report.v_tilde;
    if (!score) continue;
    auto& bucket = buckets[method_name(report.method)];
    bucket.first = report.method;
    bucket.second.push_back(*score);
  }
  std::vector<MethodSummary> rows;
  rows.reserve(buckets.size());
  for (auto& [name, bucket] : buckets) {
    MethodSummary row;
    row.method = bucket.first;
    row.scored = static_cast<int>(bucket.second.size());
    row.median = quantile_linear(bucket.second, 0.5);
    row.q1 = quantile_linear(bucket.second, 0.25);
    row.q3 = quantile_linear(bucket.second, 0.75);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace abh
