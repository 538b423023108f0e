// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace abh {

namespace {

using nlohmann::json;

// Shortest representation that parses back to the same double.
std::string fmt_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF newlines everywhere
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::int64_t parse_int(const std::string& text, const std::string& path,
                       int line, const std::string& what) {
  std::int64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(path, line, "bad " + what + " value '" + text + "'");
  }
  return value;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

TriggerData parse_long_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "day,user,count") {
    throw ParseError(path, 1, "expected header 'day,user,count'");
  }
  struct Row {
    int day;
    std::string user;
    std::int64_t count;
  };
  std::vector<Row> rows;
  int max_day = 0;
  std::int64_t zero_rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != 3) {
      throw ParseError(path, line_no, "expected 3 fields, got " +
                                          std::to_string(fields.size()));
    }
    const std::int64_t day = parse_int(fields[0], path, line_no, "day");
    if (day < 1) throw ParseError(path, line_no, "day must be >= 1");
    if (fields[1].empty()) throw ParseError(path, line_no, "empty user id");
    const std::int64_t count = parse_int(fields[2], path, line_no, "count");
    if (count < 0) throw ParseError(path, line_no, "negative count");
    if (count == 0) {
      ++zero_rows;
      continue;
    }
    max_day = std::max<int>(max_day, static_cast<int>(day));
    rows.push_back({static_cast<int>(day), fields[1], count});
  }
  if (zero_rows > 0) {
    std::cerr << "warning: " << path << ": dropped " << zero_rows
              << " zero-count row(s)\n";
  }
  TriggerData::Builder builder(max_day);
  for (const Row& row : rows) builder.add(row.day, row.user, row.count);
  return std::move(builder).build();
}

std::vector<std::int64_t> parse_aggregate_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "day,new_users") {
    throw ParseError(path, 1, "expected header 'day,new_users'");
  }
  std::map<int, std::int64_t> by_day;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != 2) {
      throw ParseError(path, line_no, "expected 2 fields, got " +
                                          std::to_string(fields.size()));
    }
    const std::int64_t day = parse_int(fields[0], path, line_no, "day");
    if (day < 1) throw ParseError(path, line_no, "day must be >= 1");
    const std::int64_t count = parse_int(fields[1], path, line_no, "new_users");
    if (count < 0) throw ParseError(path, line_no, "negative new_users");
    by_day[static_cast<int>(day)] += count;
  }
  std::vector<std::int64_t> cumulative;
  if (by_day.empty()) return cumulative;
  cumulative.assign(by_day.rbegin()->first, 0);
  for (const auto& [day, count] : by_day) cumulative[day - 1] = count;
  for (std::size_t d = 1; d < cumulative.size(); ++d) {
    cumulative[d] += cumulative[d - 1];
  }
  return cumulative;
}

void write_long_csv(const std::string& path, const TriggerData& data) {
  struct Row {
    int day;
    const std::string* user;
    std::int64_t count;
  };
  std::vector<Row> rows;
  for (int n = 0; n < data.num_users(); ++n) {
    for (const DayCount& entry : data.user_entries(n)) {
      rows.push_back({entry.day, &data.roster()[n], entry.count});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.day != b.day ? a.day < b.day : *a.user < *b.user;
  });
  std::ofstream out = open_output(path);
  out << "day,user,count\n";
  for (const Row& row : rows) {
    out << row.day << ',' << *row.user << ',' << row.count << '\n';
  }
}

void write_spectrum_csv(const std::string& path, const FreqSpectrum& spectrum) {
  std::ofstream out = open_output(path);
  out << "k,phi\n";
  for (const auto& [k, phi] : spectrum.phi) {
    out << k << ',' << phi << '\n';
  }
}

namespace {

json params_json(const HyperParams& params) {
  return json{{"beta", params.beta},
              {"sigma", params.sigma},
              {"c", params.c},
              {"r", params.r}};
}

HyperParams params_from_json(const json& j) {
  HyperParams params{j.at("beta").get<double>(), j.at("sigma").get<double>(),
                     j.at("c").get<double>(), j.at("r").get<double>()};
  params.validate();
  return params;
}

}  // namespace

std::string hyperparams_to_json(const HyperParams& params) {
  return params_json(params).dump(2) + "\n";
}

HyperParams hyperparams_from_json_file(const std::string& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    in >> j;
    return params_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
}

void write_fit_json(const std::string& path, const FitResult& fit,
                    const std::string& method) {
  json j = params_json(fit.params);
  j["objective"] = fit.objective;
  j["converged"] = fit.converged;
  j["method"] = method;
  if (fit.degenerate) j["degenerate"] = true;
  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
}

FitConfig fit_config_from_json_file(const std::string& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  FitConfig config;
  try {
    if (j.contains("bounds")) {
      const json& b = j.at("bounds");
      const auto read_box = [&](const char* name, Box fallback) {
        if (!b.contains(name)) return fallback;
        const json& pair = b.at(name);
        return Box{pair.at(0).get<double>(), pair.at(1).get<double>()};
      };
      config.bounds[0] = read_box("beta", config.bounds[0]);
      config.bounds[1] = read_box("sigma", config.bounds[1]);
      config.bounds[2] = read_box("c", config.bounds[2]);
      config.bounds[3] = read_box("r", config.bounds[3]);
    }
    config.de_population = j.value("de_population", config.de_population);
    config.de_max_iters = j.value("de_max_iters", config.de_max_iters);
    config.de_tolerance = j.value("de_tolerance", config.de_tolerance);
    config.seed = j.value("seed", config.seed);
    config.regression_d0 = j.value("regression_d0", config.regression_d0);
    if (j.contains("method")) {
      const std::string method = j.at("method").get<std::string>();
      if (method == "mle") {
        config.method = FitMethod::kMle;
      } else if (method == "regression") {
        config.method = FitMethod::kRegression;
      } else {
        throw ParseError(path, 0, "unknown method '" + method + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  config.validate();
  return config;
}

std::string fit_config_to_json(const FitConfig& config) {
  json j;
  j["bounds"] = {{"beta", {config.bounds[0].lo, config.bounds[0].hi}},
                 {"sigma", {config.bounds[1].lo, config.bounds[1].hi}},
                 {"c", {config.bounds[2].lo, config.bounds[2].hi}},
                 {"r", {config.bounds[3].lo, config.bounds[3].hi}}};
  j["de_population"] = config.de_population;
  j["de_max_iters"] = config.de_max_iters;
  j["de_tolerance"] = config.de_tolerance;
  j["seed"] = config.seed;
  j["method"] = config.method == FitMethod::kMle ? "mle" : "regression";
  j["regression_d0"] = config.regression_d0;
  return j.dump(2) + "\n";
}

namespace {

json interval_json(const Interval& interval) {
  return json{{"mean", interval.mean}, {"lo", interval.lo},
              {"hi", interval.hi}};
}

}  // namespace

std::string forecast_to_json(const ForecastReport& report,
                             const HyperParams& params) {
  json j;
  j["schema_version"] = 1;
  j["pilot_days"] = report.pilot_days;
  j["horizon"] = report.horizon;
  j["params"] = params_json(params);
  j["new_users"] = interval_json(report.new_users);
  json freq = json::array();
  for (const FreqForecast& f : report.new_by_freq) {
    json entry = interval_json(f.interval);
    entry["j"] = f.j;
    freq.push_back(std::move(entry));
  }
  j["new_by_freq"] = std::move(freq);
  j["old_sum"] = report.old_sum ? interval_json(*report.old_sum) : json();
  j["total"] = report.total ? interval_json(*report.total) : json();
  j["level"] = report.level;
  j["seed"] = report.seed;
  return j.dump(2) + "\n";
}

void write_forecast_json(const std::string& path, const ForecastReport& report,
                         const HyperParams& params) {
  std::ofstream out = open_output(path);
  out << forecast_to_json(report, params);
}

namespace {

std::string csv_safe(std::string text) {
  for (char& ch : text) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return text;
}

std::string opt_field(const std::optional<double>& value) {
  return value ? fmt_double(*value) : std::string();
}

}  // namespace

void write_reports_csv(const std::string& path,
                       const std::vector<AccuracyReport>& reports) {
  std::ofstream out = open_output(path);
  out << "dataset,method,pilot_days,horizon,observed_new,predicted_new,v,"
         "observed_total,predicted_total,v_tilde,error\n";
  for (const AccuracyReport& r : reports) {
    out << csv_safe(r.dataset) << ',' << method_name(r.method) << ','
        << r.pilot_days << ',' << r.horizon << ',' << fmt_double(r.observed_new)
        << ',' << fmt_double(r.predicted_new) << ',' << opt_field(r.v) << ','
        << opt_field(r.observed_total) << ',' << opt_field(r.predicted_total)
        << ',' << opt_field(r.v_tilde) << ',' << csv_safe(r.error) << '\n';
  }
}

void write_timings_csv(const std::string& path,
                       const std::vector<AccuracyReport>& reports) {
  std::ofstream out = open_output(path);
  out << "dataset,method,runtime_ms\n";
  for (const AccuracyReport& r : reports) {
    out << csv_safe(r.dataset) << ',' << method_name(r.method) << ','
        << fmt_double(r.runtime_ms) << '\n';
  }
}

}  // namespace abh
