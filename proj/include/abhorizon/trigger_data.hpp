// Apache License, Version 2.0, refer to LICENSE.txt
//
// Trigger data and the sufficient statistics everything downstream consumes.
// A dataset is a sparse day x user count matrix: only positive counts are
// stored. All types here are immutable once built.

#ifndef ABHORIZON_TRIGGER_DATA_HPP
#define ABHORIZON_TRIGGER_DATA_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace abh {

struct DayCount {
  int day;             // 1-based
  std::int64_t count;  // >= 1

  friend bool operator==(const DayCount&, const DayCount&) = default;
};

/// Sparse daily re-trigger counts for one experiment arm.
///
/// Users are opaque string ids; the roster orders them by first-trigger day
/// (ties broken by id), so roster order is insertion-order independent.
class TriggerData {
 public:
  class Builder {
   public:
    explicit Builder(int days);
    /// Adds a count for (day, user). Duplicate cells are summed; zero counts
    /// are dropped and tallied in dropped_zero_rows().
    Builder& add(int day, std::string_view user, std::int64_t count);
    std::int64_t dropped_zero_rows() const { return dropped_zeros_; }
    TriggerData build() &&;

   private:
    int days_;
    std::int64_t dropped_zeros_ = 0;
    std::map<std::string, std::map<int, std::int64_t>, std::less<>> cells_;
  };

  TriggerData() = default;

  int days() const { return days_; }
  int num_users() const { return static_cast<int>(roster_.size()); }
  const std::vector<std::string>& roster() const { return roster_; }
  /// Per-user (day, count) entries sorted by day; counts all >= 1.
  const std::vector<DayCount>& user_entries(int user_index) const {
    return entries_[user_index];
  }

 private:
  int days_ = 0;
  std::vector<std::string> roster_;
  std::vector<std::vector<DayCount>> entries_;
};

/// Pilot-window sufficient statistics: everything the model formulas read.
struct SuffStats {
  int pilot_days = 0;                                // D0
  std::int64_t num_users = 0;                        // N, users active in pilot
  std::vector<std::int64_t> totals;                  // per-user pilot totals m_n
  std::vector<std::vector<std::int64_t>> positive_counts;  // per-user day counts
  std::vector<std::int64_t> arrivals;  // cumulative distinct users, days 1..D0

  // Histograms of the two quantities the marginal likelihood sums over;
  // collapsing identical values makes its evaluation O(distinct) not O(N).
  std::vector<std::pair<std::int64_t, std::int64_t>> count_hist;  // value -> #cells
  std::vector<std::pair<std::int64_t, std::int64_t>> total_hist;  // m -> #users
};

SuffStats compute_suffstats(const TriggerData& data, int pilot_days);

/// Statistics for data sources that only expose daily first-trigger counts.
/// totals/positive_counts stay empty; re-trigger predictors are unavailable.
SuffStats suffstats_from_arrivals(const std::vector<std::int64_t>& arrivals,
                                  int pilot_days);

/// phi_k = number of users present (count > 0) on exactly k distinct pilot
/// days. Sum of phi equals the distinct-user count.
struct FreqSpectrum {
  std::map<int, std::int64_t> phi;

  std::int64_t total_users() const;
};

FreqSpectrum compute_spectrum(const TriggerData& data, int pilot_days);

/// Ground truth over the holdout window (D0, D0+D1]: U, U_j, S, T.
struct HoldoutTruth {
  std::int64_t new_users = 0;                 // users first seen in the window
  std::map<std::int64_t, std::int64_t> new_by_freq;  // window total j -> count
  std::int64_t old_sum = 0;                   // window activity of pilot users
  std::int64_t total = 0;                     // all window activity
};

HoldoutTruth holdout_truth(const TriggerData& data, int d0, int d1);

}  // namespace abh

#endif  // ABHORIZON_TRIGGER_DATA_HPP
