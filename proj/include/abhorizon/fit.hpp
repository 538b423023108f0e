// Apache License, Version 2.0, refer to LICENSE.txt
//
// Empirical-Bayes hyperparameter estimation: maximum marginal likelihood and
// the regression fit on arrival curves, both driven by a seeded
// differential-evolution optimizer.

#ifndef ABHORIZON_FIT_HPP
#define ABHORIZON_FIT_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "abhorizon/nbp.hpp"
#include "abhorizon/trigger_data.hpp"

namespace abh {

struct Box {
  double lo;
  double hi;
};

struct DEConfig {
  int population = 0;  // 0 -> 15 * dimension
  int max_iters = 800;
  double tolerance = 1e-4;  // absolute spread of objective values
  std::uint64_t seed = 0;
};

struct DEResult {
  std::vector<double> x;
  double value;
  int iterations;
  bool converged;
};

/// Global minimization over a box, best/1/bin strategy: mutation factor
/// drawn per generation from [0.5, 1.0], crossover 0.7. Non-finite objective
/// values are treated as +inf; throws if no finite value exists in the
/// initial population. Deterministic given the seed.
DEResult differential_evolution(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const Box> bounds, const DEConfig& config);

enum class FitMethod { kMle, kRegression };

struct FitConfig {
  // Natural-space boxes for (beta, sigma, c, r). beta and c are searched in
  // log space, so their default boxes span orders of magnitude.
  std::array<Box, 4> bounds{Box{1e-3, 1e3}, Box{0.01, 0.99}, Box{1e-3, 1e3},
                            Box{0.1, 100.0}};
  int de_population = 0;
  int de_max_iters = 800;
  double de_tolerance = 1e-4;
  std::uint64_t seed = 0;
  FitMethod method = FitMethod::kMle;
  int regression_d0 = 1;

  void validate() const;
};

struct FitResult {
  HyperParams params;
  double objective;    // achieved log likelihood (mle) or SSE (regression)
  bool converged;
  bool degenerate = false;  // regression on a flat arrival curve
  int iterations = 0;
};

/// Maximum marginal likelihood over the bounded box. Requires a nonempty
/// pilot; throws std::invalid_argument when stats.num_users == 0.
FitResult fit_mle(const SuffStats& stats, const FitConfig& config);

/// Least squares between the closed-form new-user curve anchored at day d0
/// and the observed arrival increments. Works from the arrival curve alone.
FitResult fit_regression(std::span<const std::int64_t> arrivals,
                         const FitConfig& config);

}  // namespace abh

#endif  // ABHORIZON_FIT_HPP
