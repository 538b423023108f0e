// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/cli.hpp"

#include <glob.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "abhorizon/baselines.hpp"
#include "abhorizon/evalbench.hpp"
#include "abhorizon/fit.hpp"
#include "abhorizon/io.hpp"
#include "abhorizon/nbp.hpp"
#include "abhorizon/simulate.hpp"

namespace abh {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoConvergence = 3;

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t results;
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &results);
  std::vector<std::string> paths;
  if (rc == 0) {
    for (std::size_t i = 0; i < results.gl_pathc; ++i) {
      paths.emplace_back(results.gl_pathv[i]);
    }
  }
  ::globfree(&results);
  if (rc != 0 && rc != GLOB_NOMATCH) {
    throw std::runtime_error("glob failed for pattern '" + pattern + "'");
  }
  return paths;
}

struct SimulateModelArgs {
  double beta, sigma, c, r;
  int days;
  std::uint64_t seed = 0;
  std::string out;
};

struct SimulateZipfArgs {
  double tau;
  std::int64_t n_users;
  int days;
  std::uint64_t seed = 0;
  std::string out;
};

struct FitArgs {
  std::string input;
  std::string format = "long";
  std::string method = "mle";
  int pilot_days;
  std::string config_path;
  std::string out;
};

struct PredictArgs {
  std::string input;
  std::string format = "long";
  std::string params_path;
  int pilot_days;
  int horizon;
  int freq_max = 10;
  double level = 0.95;
  std::uint64_t seed = 0;
  std::string out;
};

struct EvaluateArgs {
  std::string inputs;
  int pilot_days;
  int horizon;
  std::vector<std::string> methods;
  std::uint64_t seed = 0;
  std::string out;
  std::string timings;
};

struct SpectrumArgs {
  std::string input;
  int pilot_days;
  std::string out;
};

int do_simulate_model(const SimulateModelArgs& args) {
  ModelSimConfig config{HyperParams{args.beta, args.sigma, args.c, args.r},
                        args.days, args.seed};
  write_long_csv(args.out, sample_model(config));
  return kExitOk;
}

int do_simulate_zipf(const SimulateZipfArgs& args) {
  ZipfSimConfig config{args.tau, args.n_users, args.days, args.seed};
  write_long_csv(args.out, sample_zipf(config));
  return kExitOk;
}

int do_fit(const FitArgs& args) {
  FitConfig config;
  if (!args.config_path.empty()) {
    config = fit_config_from_json_file(args.config_path);
  }
  config.method =
      args.method == "regression" ? FitMethod::kRegression : FitMethod::kMle;

  FitResult fit;
  if (config.method == FitMethod::kMle) {
    if (args.format != "long") {
      std::cerr << "error: --method mle needs per-user counts "
                   "(--format long)\n";
      return kExitUsage;
    }
    const TriggerData data = parse_long_csv(args.input);
    fit = fit_mle(compute_suffstats(data, args.pilot_days), config);
  } else {
    std::vector<std::int64_t> arrivals;
    if (args.format == "long") {
      const TriggerData data = parse_long_csv(args.input);
      arrivals = compute_suffstats(data, args.pilot_days).arrivals;
    } else {
      arrivals = parse_aggregate_csv(args.input);
      if (static_cast<int>(arrivals.size()) < args.pilot_days) {
        throw std::invalid_argument("aggregate file covers fewer days than "
                                    "--pilot-days");
      }
      arrivals.resize(args.pilot_days);
    }
    fit = fit_regression(arrivals, config);
  }
  write_fit_json(args.out, fit, args.method);
  if (!fit.converged) {
    std::cerr << "warning: optimizer did not converge within "
              << config.de_max_iters << " generations; best point written\n";
    return kExitNoConvergence;
  }
  if (fit.degenerate) {
    std::cerr << "warning: degenerate fit (flat arrival curve)\n";
  }
  return kExitOk;
}

int do_predict(const PredictArgs& args) {
  const HyperParams params = hyperparams_from_json_file(args.params_path);
  SuffStats stats;
  if (args.format == "long") {
    const TriggerData data = parse_long_csv(args.input);
    stats = compute_suffstats(data, args.pilot_days);
  } else {
    stats = suffstats_from_arrivals(parse_aggregate_csv(args.input),
                                    args.pilot_days);
  }
  const ForecastReport report =
      make_forecast(params, stats, args.horizon, args.freq_max, args.level,
                    10000, args.seed);
  write_forecast_json(args.out, report, params);
  return kExitOk;
}

int do_evaluate(const EvaluateArgs& args) {
  BenchmarkConfig config;
  config.pilot_days = args.pilot_days;
  config.horizon = args.horizon;
  config.seed = args.seed;
  for (const std::string& name : args.methods) {
    const auto method = method_from_name(name);
    if (!method) {
      std::cerr << "error: --methods: unknown method '" << name << "'\n";
      return kExitUsage;
    }
    config.methods.push_back(*method);
  }
  std::vector<NamedDataset> datasets;
  for (const std::string& path : expand_glob(args.inputs)) {
    datasets.push_back({path, parse_long_csv(path)});
  }
  if (datasets.empty()) {
    std::cerr << "error: --inputs matched no files\n";
    return kExitData;
  }
  const auto reports = run_benchmark(datasets, config);
  write_reports_csv(args.out, reports);
  if (!args.timings.empty()) write_timings_csv(args.timings, reports);
  return kExitOk;
}

int do_spectrum(const SpectrumArgs& args) {
  const TriggerData data = parse_long_csv(args.input);
  write_spectrum_csv(args.out, compute_spectrum(data, args.pilot_days));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Forecasts of future user arrivals and re-trigger activity "
               "for online A/B tests"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Generate synthetic data");
  simulate->require_subcommand(1);

  SimulateModelArgs model_args{};
  auto* sim_model =
      simulate->add_subcommand("model", "Draw from the generative model");
  sim_model->add_option("--beta", model_args.beta)->required();
  sim_model->add_option("--sigma", model_args.sigma)->required();
  sim_model->add_option("--c", model_args.c)->required();
  sim_model->add_option("--r", model_args.r)->required();
  sim_model->add_option("--days", model_args.days)->required();
  sim_model->add_option("--seed", model_args.seed)->default_val(0);
  sim_model->add_option("--out", model_args.out)->required();

  SimulateZipfArgs zipf_args{};
  auto* sim_zipf =
      simulate->add_subcommand("zipf", "Draw from the Zipf benchmark model");
  sim_zipf->add_option("--tau", zipf_args.tau)->required();
  sim_zipf->add_option("--n-users", zipf_args.n_users)->required();
  sim_zipf->add_option("--days", zipf_args.days)->required();
  sim_zipf->add_option("--seed", zipf_args.seed)->default_val(0);
  sim_zipf->add_option("--out", zipf_args.out)->required();

  FitArgs fit_args{};
  auto* fit_cmd = app.add_subcommand("fit", "Fit hyperparameters");
  fit_cmd->add_option("--input", fit_args.input)->required();
  fit_cmd->add_option("--format", fit_args.format)
      ->check(CLI::IsMember({"long", "aggregate"}));
  fit_cmd->add_option("--method", fit_args.method)
      ->check(CLI::IsMember({"mle", "regression"}));
  fit_cmd->add_option("--pilot-days", fit_args.pilot_days)->required();
  fit_cmd->add_option("--config", fit_args.config_path);
  fit_cmd->add_option("--out", fit_args.out)->required();

  PredictArgs predict_args{};
  auto* predict_cmd = app.add_subcommand("predict", "Forecast future activity");
  predict_cmd->add_option("--input", predict_args.input)->required();
  predict_cmd->add_option("--format", predict_args.format)
      ->check(CLI::IsMember({"long", "aggregate"}));
  predict_cmd->add_option("--params", predict_args.params_path)->required();
  predict_cmd->add_option("--pilot-days", predict_args.pilot_days)->required();
  predict_cmd->add_option("--horizon", predict_args.horizon)->required();
  predict_cmd->add_option("--freq-max", predict_args.freq_max)->default_val(10);
  predict_cmd->add_option("--level", predict_args.level)->default_val(0.95);
  predict_cmd->add_option("--seed", predict_args.seed)->default_val(0);
  predict_cmd->add_option("--out", predict_args.out)->required();

  EvaluateArgs eval_args{};
  auto* eval_cmd = app.add_subcommand("evaluate", "Benchmark methods");
  eval_cmd->add_option("--inputs", eval_args.inputs)->required();
  eval_cmd->add_option("--pilot-days", eval_args.pilot_days)->required();
  eval_cmd->add_option("--horizon", eval_args.horizon)->required();
  eval_cmd->add_option("--methods", eval_args.methods)
      ->required()
      ->delimiter(',');
  eval_cmd->add_option("--seed", eval_args.seed)->default_val(0);
  eval_cmd->add_option("--out", eval_args.out)->required();
  eval_cmd->add_option("--timings", eval_args.timings);

  SpectrumArgs spectrum_args{};
  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "Emit the presence frequency spectrum");
  spectrum_cmd->add_option("--input", spectrum_args.input)->required();
  spectrum_cmd->add_option("--pilot-days", spectrum_args.pilot_days)
      ->required();
  spectrum_cmd->add_option("--out", spectrum_args.out)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim_model->parsed()) return do_simulate_model(model_args);
    if (sim_zipf->parsed()) return do_simulate_zipf(zipf_args);
    if (fit_cmd->parsed()) return do_fit(fit_args);
    if (predict_cmd->parsed()) return do_predict(predict_args);
    if (eval_cmd->parsed()) return do_evaluate(eval_args);
    if (spectrum_cmd->parsed()) return do_spectrum(spectrum_args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace abh
