// Transition-matrix estimation from timestamped Home/Work/POI activity logs.
#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "opsim/core.hpp"
#include "opsim/mobility.hpp"

namespace opsim {

struct ActivityRecord {
  int start_minute = 0;  // absolute minutes from 00:00 of the individual's first day
  int end_minute = 0;
  MobilityState state = MobilityState::Home;
  std::size_t line = 0;  // source line, 0 when synthesized
};

struct IndividualLog {
  std::string id;
  ClassGroup group = ClassGroup::CUA;
  std::vector<ActivityRecord> records;  // contiguous, in time order
};

using ActivityLog = std::vector<IndividualLog>;

// Reads individual_id,group,start_hhmm,end_hhmm,state rows. Each individual's
// rows must be chronological and contiguous; a record whose end clock is not
// after its start wraps past midnight. Errors cite the offending line.
ActivityLog read_activity_csv(std::istream& in);
void write_activity_csv(std::ostream& out, const ActivityLog& log);

struct StateSequence {
  std::string individual;
  ClassGroup group = ClassGroup::CUA;
  long first_slot = 0;  // interval index counted from 00:00 of day one
  std::vector<MobilityState> states;
  bool operator==(const StateSequence&) const = default;
};

// One state per interval, taken at the interval's start. Intervals that start
// before the first record are skipped.
std::vector<StateSequence> discretize(const ActivityLog& log, int interval_minutes);

// Inverse of discretize for a single sequence; records are split at midnight.
IndividualLog synthesize_log(const StateSequence& sequence, int interval_minutes);

enum class Aggregation : std::uint8_t { PooledCounts, MatrixAverage };

struct EstimateResult {
  TransitionMatrixSet matrices;
  std::vector<std::string> warnings;
};

// Transitions are attributed to the period of their source interval. Initial
// vectors are state frequencies at each period's first interval.
EstimateResult estimate_matrices(std::span<const StateSequence> sequences,
                                 const PeriodSchedule& schedule, int interval_minutes,
                                 Aggregation aggregation = Aggregation::PooledCounts);

}  // namespace opsim
