// Apache License, Version 2.0, refer to LICENSE.txt

#include "abhorizon/trigger_data.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "abhorizon/rng.hpp"

using abh::compute_spectrum;
using abh::compute_suffstats;
using abh::holdout_truth;
using abh::SuffStats;
using abh::TriggerData;

namespace {

TriggerData two_user_data() {
  TriggerData::Builder b(2);
  b.add(1, "u1", 2).add(2, "u1", 1).add(2, "u2", 3);
  return std::move(b).build();
}

}  // namespace

TEST_CASE("suffstats on the two-user example") {
  const TriggerData data = two_user_data();
  const SuffStats s = compute_suffstats(data, 2);
  CHECK(s.num_users == 2);
  CHECK(s.totals == std::vector<std::int64_t>{3, 3});
  CHECK(s.arrivals == std::vector<std::int64_t>{1, 2});
  CHECK(s.positive_counts[0] == std::vector<std::int64_t>{2, 1});
  CHECK(s.positive_counts[1] == std::vector<std::int64_t>{3});

  const SuffStats truncated = compute_suffstats(data, 1);
  CHECK(truncated.num_users == 1);
  CHECK(truncated.totals == std::vector<std::int64_t>{2});
  CHECK(truncated.arrivals == std::vector<std::int64_t>{1});

  CHECK_THROWS_AS(compute_suffstats(data, 0), std::out_of_range);
  CHECK_THROWS_AS(compute_suffstats(data, 3), std::out_of_range);
}

TEST_CASE("suffstats on empty data") {
  TriggerData::Builder b(1);
  const TriggerData data = std::move(b).build();
  const SuffStats s = compute_suffstats(data, 1);
  CHECK(s.num_users == 0);
  CHECK(s.totals.empty());
  CHECK(s.arrivals == std::vector<std::int64_t>{0});
}

TEST_CASE("suffstats invariants hold") {
  const TriggerData data = two_user_data();
  const SuffStats s = compute_suffstats(data, 2);
  CHECK(s.totals.size() == static_cast<std::size_t>(s.num_users));
  CHECK(s.positive_counts.size() == s.totals.size());
  for (std::size_t n = 0; n < s.totals.size(); ++n) {
    std::int64_t sum = 0;
    for (const std::int64_t c : s.positive_counts[n]) sum += c;
    CHECK(sum == s.totals[n]);
    CHECK(s.totals[n] >= 1);
  }
  CHECK(std::is_sorted(s.arrivals.begin(), s.arrivals.end()));
  CHECK(s.arrivals.back() == s.num_users);
}

TEST_CASE("builder sums duplicates and drops zeros") {
  TriggerData::Builder b(3);
  b.add(1, "a", 2).add(1, "a", 1).add(2, "b", 0);
  CHECK(b.dropped_zero_rows() == 1);
  const TriggerData data = std::move(b).build();
  CHECK(data.num_users() == 1);
  CHECK(data.user_entries(0).size() == 1);
  CHECK(data.user_entries(0)[0].count == 3);
  CHECK_THROWS_AS(TriggerData::Builder(2).add(3, "a", 1), std::out_of_range);
  CHECK_THROWS_AS(TriggerData::Builder(2).add(1, "a", -1),
                  std::invalid_argument);
}

TEST_CASE("roster order is insertion-order invariant") {
  struct Row {
    int day;
    const char* user;
    std::int64_t count;
  };
  std::vector<Row> rows = {{2, "x", 1}, {1, "b", 2}, {1, "a", 1}, {3, "y", 4}};
  const auto build = [&](const std::vector<Row>& ordered) {
    TriggerData::Builder b(3);
    for (const Row& row : ordered) b.add(row.day, row.user, row.count);
    return std::move(b).build();
  };
  const TriggerData reference = build(rows);
  CHECK(reference.roster() == std::vector<std::string>{"a", "b", "x", "y"});
  abh::SplitRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    for (std::size_t i = rows.size(); i > 1; --i) {
      std::swap(rows[i - 1], rows[rng.next_u64() % i]);
    }
    const TriggerData shuffled = build(rows);
    CHECK(shuffled.roster() == reference.roster());
    const SuffStats a = compute_suffstats(reference, 3);
    const SuffStats b = compute_suffstats(shuffled, 3);
    CHECK(a.totals == b.totals);
    CHECK(a.arrivals == b.arrivals);
  }
}

TEST_CASE("spectrum tallies presence days") {
  const TriggerData data = two_user_data();
  const auto spectrum = compute_spectrum(data, 2);
  CHECK(spectrum.phi.at(1) == 1);
  CHECK(spectrum.phi.at(2) == 1);
  CHECK(spectrum.total_users() == 2);

  TriggerData::Builder full(3);
  for (int d = 1; d <= 3; ++d) {
    full.add(d, "a", 1);
    full.add(d, "b", 2);
  }
  const auto saturated = compute_spectrum(std::move(full).build(), 3);
  CHECK(saturated.phi.size() == 1);
  CHECK(saturated.phi.at(3) == 2);

  const auto empty =
      compute_spectrum(std::move(TriggerData::Builder(1)).build(), 1);
  CHECK(empty.phi.empty());
}

TEST_CASE("holdout truth on the spec windows") {
  TriggerData::Builder b(4);
  b.add(1, "u1", 1).add(3, "u2", 1).add(4, "u2", 1);
  const TriggerData data = std::move(b).build();
  const auto truth = holdout_truth(data, 2, 2);
  CHECK(truth.new_users == 1);
  CHECK(truth.new_by_freq.at(2) == 1);
  CHECK(truth.old_sum == 0);
  CHECK(truth.total == 2);

  const auto quiet = holdout_truth(two_user_data(), 2, 0);
  CHECK(quiet.new_users == 0);
  CHECK(quiet.total == 0);

  TriggerData::Builder c(3);
  c.add(1, "u1", 1).add(3, "u1", 3);
  const auto old_only = holdout_truth(std::move(c).build(), 2, 1);
  CHECK(old_only.new_users == 0);
  CHECK(old_only.old_sum == 3);
  CHECK(old_only.total == 3);

  CHECK_THROWS_AS(holdout_truth(data, 3, 2), std::out_of_range);
}

TEST_CASE("holdout decomposition holds on random instances") {
  abh::SplitRng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int days = 2 + static_cast<int>(rng.next_u64() % 6);
    TriggerData::Builder b(days);
    const int users = static_cast<int>(rng.next_u64() % 6);
    for (int u = 0; u < users; ++u) {
      for (int d = 1; d <= days; ++d) {
        if (rng.next_double() < 0.4) {
          b.add(d, "u" + std::to_string(u),
                1 + static_cast<std::int64_t>(rng.next_u64() % 3));
        }
      }
    }
    const TriggerData data = std::move(b).build();
    const int d0 = 1 + static_cast<int>(rng.next_u64() % (days - 1));
    const int d1 = static_cast<int>(rng.next_u64() % (days - d0 + 1));
    const auto truth = holdout_truth(data, d0, d1);
    std::int64_t freq_sum = 0;
    std::int64_t freq_users = 0;
    for (const auto& [j, users_at_j] : truth.new_by_freq) {
      freq_sum += j * users_at_j;
      freq_users += users_at_j;
    }
    CHECK(truth.total == freq_sum + truth.old_sum);
    CHECK(truth.new_users == freq_users);
  }
}
