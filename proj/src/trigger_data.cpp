// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/trigger_data.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace abh {

TriggerData::Builder::Builder(int days) : days_(days) {
  if (days < 0) throw std::out_of_range("TriggerData: days must be >= 0");
}

TriggerData::Builder& TriggerData::Builder::add(int day, std::string_view user,
                                                std::int64_t count) {
  if (day < 1 || day > days_) {
    throw std::out_of_range("TriggerData: day " + std::to_string(day) +
                            " outside 1.." + std::to_string(days_));
  }
  if (count < 0) {
    throw std::invalid_argument("TriggerData: negative count");
  }
  if (count == 0) {
    ++dropped_zeros_;
    return *this;
  }
  auto it = cells_.find(user);
  if (it == cells_.end()) {
    it = cells_.emplace(std::string(user), std::map<int, std::int64_t>{}).first;
  }
  it->second[day] += count;
  return *this;
}

TriggerData TriggerData::Builder::build() && {
  TriggerData out;
  out.days_ = days_;
  // Roster sorted by (first day, id): deterministic regardless of the order
  // rows were added.
  std::vector<std::pair<int, const std::string*>> order;
  order.reserve(cells_.size());
  for (const auto& [user, by_day] : cells_) {
    order.emplace_back(by_day.begin()->first, &user);
  }
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) {
              return a.first != b.first ? a.first < b.first
                                        : *a.second < *b.second;
            });
  out.roster_.reserve(order.size());
  out.entries_.reserve(order.size());
  for (const auto& [first_day, user] : order) {
    const auto& by_day = cells_.at(*user);
    std::vector<DayCount> entries;
    entries.reserve(by_day.size());
    for (const auto& [day, count] : by_day) entries.push_back({day, count});
    out.roster_.push_back(*user);
    out.entries_.push_back(std::move(entries));
  }
  return out;
}

namespace {

void check_pilot(const TriggerData& data, int pilot_days) {
  if (pilot_days < 1 || pilot_days > data.days()) {
    throw std::out_of_range("pilot_days " + std::to_string(pilot_days) +
                            " outside 1.." + std::to_string(data.days()));
  }
}

}  // namespace

SuffStats compute_suffstats(const TriggerData& data, int pilot_days) {
  check_pilot(data, pilot_days);
  SuffStats s;
  s.pilot_days = pilot_days;
  s.arrivals.assign(pilot_days, 0);
  std::map<std::int64_t, std::int64_t> count_hist;
  std::map<std::int64_t, std::int64_t> total_hist;
  for (int n = 0; n < data.num_users(); ++n) {
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
    int first_day = 0;
    for (const auto& [day, count] : data.user_entries(n)) {
      if (day > pilot_days) break;
      if (first_day == 0) first_day = day;
      counts.push_back(count);
      total += count;
      ++count_hist[count];
    }
    if (total == 0) continue;  // user silent during the pilot
    ++s.num_users;
    s.totals.push_back(total);
    s.positive_counts.push_back(std::move(counts));
    ++total_hist[total];
    ++s.arrivals[first_day - 1];
  }
  // Accumulate first-trigger tallies into the cumulative arrival curve.
  for (int d = 1; d < pilot_days; ++d) s.arrivals[d] += s.arrivals[d - 1];
  s.count_hist.assign(count_hist.begin(), count_hist.end());
  s.total_hist.assign(total_hist.begin(), total_hist.end());
  return s;
}

SuffStats suffstats_from_arrivals(const std::vector<std::int64_t>& arrivals,
                                  int pilot_days) {
  if (pilot_days < 1 || static_cast<std::size_t>(pilot_days) > arrivals.size()) {
    throw std::out_of_range("pilot_days outside the arrival curve");
  }
  SuffStats s;
  s.pilot_days = pilot_days;
  s.arrivals.assign(arrivals.begin(), arrivals.begin() + pilot_days);
  for (std::size_t d = 0; d < s.arrivals.size(); ++d) {
    if (s.arrivals[d] < 0 || (d > 0 && s.arrivals[d] < s.arrivals[d - 1])) {
      throw std::invalid_argument("arrival curve must be nonnegative and "
                                  "nondecreasing");
    }
  }
  s.num_users = s.arrivals.back();
  return s;
}

std::int64_t FreqSpectrum::total_users() const {
  std::int64_t n = 0;
  for (const auto& [k, count] : phi) n += count;
  return n;
}

FreqSpectrum compute_spectrum(const TriggerData& data, int pilot_days) {
  check_pilot(data, pilot_days);
  FreqSpectrum spec;
  for (int n = 0; n < data.num_users(); ++n) {
    int present_days = 0;
    for (const auto& [day, count] : data.user_entries(n)) {
      if (day > pilot_days) break;
      ++present_days;
    }
    if (present_days > 0) ++spec.phi[present_days];
  }
  return spec;
}

HoldoutTruth holdout_truth(const TriggerData& data, int d0, int d1) {
  if (d0 < 0 || d1 < 0 || d0 + d1 > data.days()) {
    throw std::out_of_range("holdout window [" + std::to_string(d0) + ", " +
                            std::to_string(d0 + d1) + "] exceeds " +
                            std::to_string(data.days()) + " days");
  }
  HoldoutTruth truth;
  for (int n = 0; n < data.num_users(); ++n) {
    std::int64_t pilot_total = 0;
    std::int64_t window_total = 0;
    for (const auto& [day, count] : data.user_entries(n)) {
      if (day <= d0) {
        pilot_total += count;
      } else if (day <= d0 + d1) {
        window_total += count;
      }
    }
    if (window_total == 0) continue;
    truth.total += window_total;
    if (pilot_total > 0) {
      truth.old_sum += window_total;
    } else {
      ++truth.new_users;
      ++truth.new_by_freq[window_total];
    }
  }
  return truth;
}

}  // namespace abh
