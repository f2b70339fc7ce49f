// Period-switched Home/Work/POI Markov-chain mobility.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "opsim/core.hpp"
#include "opsim/rng.hpp"

namespace opsim {

inline constexpr int kMinutesPerDay = 24 * 60;

struct Period {
  int index = 0;         // 1-based period label
  int start_minute = 0;  // minute of day, inclusive
  int end_minute = 0;    // minute of day, exclusive; may wrap past midnight
  bool operator==(const Period&) const = default;
};

// Ordered periods that partition the 24-hour day.
class PeriodSchedule {
 public:
  // Throws InputError unless the periods cover every minute exactly once.
  explicit PeriodSchedule(std::vector<Period> periods);

  // 19:00-06:30, 06:30-09:30, 09:30-16:30, 16:30-19:00.
  static PeriodSchedule table_defaults();

  int period_at(int minute_of_day) const;
  const Period& period(int index) const;
  const std::vector<Period>& periods() const { return periods_; }
  std::size_t size() const { return periods_.size(); }

  bool operator==(const PeriodSchedule&) const = default;

 private:
  std::vector<Period> periods_;
  std::array<int, kMinutesPerDay> by_minute_{};
};

using Probabilities = std::array<double, 3>;
using Matrix3 = std::array<Probabilities, 3>;

struct ChainParams {
  Probabilities initial{};
  Matrix3 transition{};
  bool operator==(const ChainParams&) const = default;
};

class TransitionMatrixSet {
 public:
  explicit TransitionMatrixSet(PeriodSchedule schedule) : schedule_(std::move(schedule)) {}

  const PeriodSchedule& schedule() const { return schedule_; }

  void set(int period, ClassGroup group, ChainParams params);
  bool contains(int period, ClassGroup group) const;
  // Throws InputError for an unknown period or a missing entry.
  const ChainParams& get(int period, ClassGroup group) const;

  const std::map<std::pair<int, ClassGroup>, ChainParams>& entries() const { return entries_; }

  bool operator==(const TransitionMatrixSet&) const = default;

 private:
  PeriodSchedule schedule_;
  std::map<std::pair<int, ClassGroup>, ChainParams> entries_;
};

// Built-in default matrices. The Corrected variant replaces the {E,S}
// period-4 Work->POI entry 0.78 with 0.078.
TransitionMatrixSet table_defaults(MatrixVariant variant = MatrixVariant::AsPrinted);

struct NormalizedMatrices {
  TransitionMatrixSet matrices;
  std::vector<std::string> warnings;
};

// Divides every row and initial vector by its sum. Rows whose raw sum is off
// by more than 0.05 produce a warning. Negative entries, all-zero rows, or a
// {C,U,A} entry that leads into Work are rejected with InputError.
NormalizedMatrices normalize_matrix_set(const TransitionMatrixSet& raw);

// Inverse-CDF draw: first state whose cumulative probability exceeds u.
// Zero-probability states are never selected.
MobilityState sample_state(const Probabilities& probs, double u);

MobilityState initial_state(NodeClass cls, int period, const TransitionMatrixSet& matrices, double u);
MobilityState initial_state(NodeClass cls, int period, const TransitionMatrixSet& matrices,
                            RngStream& stream);

MobilityState step_state(MobilityState current, NodeClass cls, int period,
                         const TransitionMatrixSet& matrices, double u);
MobilityState step_state(MobilityState current, NodeClass cls, int period,
                         const TransitionMatrixSet& matrices, RngStream& stream);

struct Placement {
  Cell cell;
  std::optional<std::size_t> poi_index;
};

// Cell for a node entering new_state. Staying in Poi keeps the current POI;
// entering Poi from another state draws one uniformly.
Placement place_node(const NodeRecord& node, MobilityState new_state, std::span<const Cell> pois,
                     RngStream& stream);

nlohmann::json matrix_set_to_json(const TransitionMatrixSet& matrices);
TransitionMatrixSet matrix_set_from_json(const nlohmann::json& doc);

std::string format_clock(int minute_of_day);
// Parses "HH:MM" or "HHMM"; "24:00" is accepted and maps to 1440.
int parse_clock(std::string_view text);

}  // namespace opsim
