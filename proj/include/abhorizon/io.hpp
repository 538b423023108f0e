// Apache License, Version 2.0, refer to LICENSE.txt
//
// File formats: long CSV (day,user,count), aggregate CSV (day,new_users),
// JSON for hyperparameters, fit configuration, and forecasts. All output is
// UTF-8 with LF newlines and round-trip-exact number formatting.

#ifndef ABHORIZON_IO_HPP
#define ABHORIZON_IO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "abhorizon/evalbench.hpp"
#include "abhorizon/fit.hpp"
#include "abhorizon/nbp.hpp"
#include "abhorizon/trigger_data.hpp"

namespace abh {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& message)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + message) {
  }
};

/// Long format, header exactly `day,user,count`. Duplicate cells are summed;
/// zero counts are dropped with a warning on stderr. The day span is the
/// maximum day present.
TriggerData parse_long_csv(const std::string& path);

/// Aggregate format, header exactly `day,new_users`; returns the cumulative
/// arrival curve. Missing days count zero arrivals; rows may be unordered.
std::vector<std::int64_t> parse_aggregate_csv(const std::string& path);

/// Canonical long CSV: rows sorted by day then user id.
void write_long_csv(const std::string& path, const TriggerData& data);

void write_spectrum_csv(const std::string& path, const FreqSpectrum& spectrum);

std::string hyperparams_to_json(const HyperParams& params);
HyperParams hyperparams_from_json_file(const std::string& path);
void write_fit_json(const std::string& path, const FitResult& fit,
                    const std::string& method);

FitConfig fit_config_from_json_file(const std::string& path);
std::string fit_config_to_json(const FitConfig& config);

std::string forecast_to_json(const ForecastReport& report,
                             const HyperParams& params);
void write_forecast_json(const std::string& path, const ForecastReport& report,
                         const HyperParams& params);

/// results.csv schema:
/// dataset,method,pilot_days,horizon,observed_new,predicted_new,v,
/// observed_total,predicted_total,v_tilde,error
/// Optional fields are left empty. Per-cell timings, which are not
/// reproducible, go to a separate file on request.
void write_reports_csv(const std::string& path,
                       const std::vector<AccuracyReport>& reports);
void write_timings_csv(const std::string& path,
                       const std::vector<AccuracyReport>& reports);

}  // namespace abh

#endif  // ABHORIZON_IO_HPP
