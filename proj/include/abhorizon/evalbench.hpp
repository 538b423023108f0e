// Apache License, Version 2.0, refer to LICENSE.txt
//
// Accuracy metrics and the benchmark harness: fit every method on the pilot
// window of every dataset, score predictions against the holdout, and emit
// machine-readable tables.

#ifndef ABHORIZON_EVALBENCH_HPP
#define ABHORIZON_EVALBENCH_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abhorizon/trigger_data.hpp"

namespace abh {

/// 1 - min(|observed - predicted| / observed, 1). Undefined (nullopt) when
/// the observation is zero, matching the metric's domain.
std::optional<double> accuracy_v(double observed, double predicted);

enum class Method {
  kJk1,
  kJk2,
  kJk3,
  kJk4,
  kGt,
  kBb,
  kBg,
  kNbpMle,
  kNbpRegression,
};

std::string method_name(Method method);
std::optional<Method> method_from_name(const std::string& name);

struct AccuracyReport {
  std::string dataset;
  Method method;
  int pilot_days = 0;
  int horizon = 0;
  double observed_new = 0.0;
  double predicted_new = 0.0;
  std::optional<double> v;
  // Total-activity scoring, produced by the model-based methods only.
  std::optional<double> observed_total;
  std::optional<double> predicted_total;
  std::optional<double> v_tilde;
  double runtime_ms = 0.0;
  std::string error;  // empty on success
};

struct NamedDataset {
  std::string name;
  TriggerData data;
};

struct BenchmarkConfig {
  int pilot_days;
  int horizon;
  std::vector<Method> methods;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 -> AB_HORIZON_THREADS or hardware concurrency
};

/// One report per dataset x method, sorted by (dataset, method). Failures
/// are captured in the report's error field and never abort the sweep.
std::vector<AccuracyReport> run_benchmark(
    const std::vector<NamedDataset>& datasets, const BenchmarkConfig& config);

struct SurvivalPoint {
  double level;
  double fraction;  // share of values >= level
};

std::vector<SurvivalPoint> survival_curve(std::span<const double> values,
                                          std::span<const double> grid);

/// Linear-interpolation quantile of an unsorted sample (q in [0, 1]).
double quantile_linear(std::vector<double> values, double q);

/// Per-method boxplot row over the scored cells (missing scores skipped).
/// Quantiles use linear interpolation so the tables are platform stable.
struct MethodSummary {
  Method method;
  int scored = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

enum class ScoreKind { kNewUsers, kTotal };

std::vector<MethodSummary> summarize_by_method(
    const std::vector<AccuracyReport>& reports,
    ScoreKind kind = ScoreKind::kNewUsers);

}  // namespace abh

#endif  // ABHORIZON_EVALBENCH_HPP
