#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace credkit::panel {

inline constexpr std::size_t kNumFeatures = 79;

// The five feature groups credit scoring companies disclose, in their
// conventional order. Features are anonymous f001..f079 with a fixed group
// assignment by index range: 1-21, 22-64, 65-70, 71-75, 76-79.
enum class FeatureGroup : std::uint8_t {
  payment_history = 0,
  amounts_owed = 1,
  length_of_history = 2,
  credit_mix = 3,
  new_credit = 4,
};

inline constexpr std::size_t kNumGroups = 5;
inline constexpr std::array<std::size_t, kNumGroups> kGroupSizes = {21, 43, 6, 5, 4};
inline constexpr std::array<std::size_t, kNumGroups> kGroupBegin = {0, 21, 64, 70, 75};

FeatureGroup feature_group(std::size_t feature_index);  // 0-based index into the 79
const char* group_label(FeatureGroup g);

enum class Race : std::uint8_t { white, black, hispanic, asian, aian, nhpi };
inline constexpr std::size_t kNumRaces = 6;
const char* race_token(Race r);
std::optional<Race> parse_race(std::string_view token);

// One consumer's credit-report snapshot at one quarter.
struct ConsumerQuarter {
  std::string consumer_id;
  std::int32_t quarter = 0;  // integer index, quarters since epoch
  std::uint8_t d_state = 0;  // 90+ DPD indicator this quarter
  std::int16_t credit_score = -1;  // 300..850, -1 = absent
  std::int16_t age = 0;
  float income_est = 0.0f;
  std::string zip;
  std::optional<Race> race;
  float true_pd = -1.0f;  // synthetic ground truth, -1 = absent
  std::uint32_t source_line = 0;  // CSV origin, 0 when in-memory
  std::array<float, kNumFeatures> features{};

  bool has_score() const { return credit_score >= 0; }
  bool has_true_pd() const { return true_pd >= 0.0f; }
};

struct Panel {
  std::vector<ConsumerQuarter> records;  // canonical order: (consumer_id, quarter)
  std::int32_t quarter_min = 0;
  std::int32_t quarter_max = -1;

  // Sorts into canonical order and recomputes the quarter range.
  void canonicalize();

  std::size_t size() const { return records.size(); }

  // [first, last) range of records for one consumer; empty if unknown.
  std::pair<std::size_t, std::size_t> consumer_range(std::string_view consumer_id) const;

  // Record index for (consumer_id, quarter), if present.
  std::optional<std::size_t> find(std::string_view consumer_id, std::int32_t quarter) const;
};

// 8-quarter default label anchored at quarter t: 0 iff every d_state over
// t..t+7 is zero, 1 otherwise. Undefined (nullopt) when any of the 8 quarters
// is missing for the consumer.
std::optional<int> label_default(const Panel& panel, std::string_view consumer_id, std::int32_t t);

// Records at `quarter` that can be labeled with the outcome over the
// subsequent 8 quarters (quarter+1 .. quarter+8). This is the pairing the
// prediction model trains on: features at t, default within the next 8
// quarters.
struct LabeledRows {
  std::vector<std::uint32_t> record_index;
  std::vector<int> label;
};
LabeledRows labeled_rows_at(const Panel& panel, std::int32_t quarter);

struct LabelObs {
  std::string consumer_id;
  std::int32_t quarter = 0;
  int y = 0;
};

// Empirical frequency and quarter-to-quarter transitions of the default
// label. Rows without a successor state are reported absent.
struct TransitionMatrix {
  std::array<std::array<double, 2>, 2> p{{{0.0, 0.0}, {0.0, 0.0}}};
  std::array<bool, 2> row_present{false, false};
  double default_freq = 0.0;
};

TransitionMatrix transition_matrix(std::span<const LabelObs> labels);

// Panel invariant violations, one entry per offending record/field.
struct Violation {
  std::size_t row = 0;  // CSV line when loaded, record index otherwise
  std::string column;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_panel(const Panel& panel);

}  // namespace credkit::panel
