#include "opsim/estimation.hpp"

#include <map>
#include <sstream>

namespace opsim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

int mod_day(long minute) {
  return static_cast<int>(((minute % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay);
}

constexpr std::size_t idx(MobilityState s) { return static_cast<std::size_t>(s); }

}  // namespace

ActivityLog read_activity_csv(std::istream& in) {
  ActivityLog log;
  std::map<std::string, std::size_t> by_id;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (!fields.empty() && fields[0] == "individual_id") continue;
    }
    if (fields.size() != 5)
      throw InputError(at_line(line_no) + "expected 5 fields, got " + std::to_string(fields.size()));

    ClassGroup group;
    MobilityState state;
    int start_clock, end_clock;
    try {
      group = parse_group(fields[1]);
      start_clock = parse_clock(fields[2]);
      end_clock = parse_clock(fields[3]);
      state = parse_state(fields[4]);
    } catch (const InputError& e) {
      throw InputError(at_line(line_no) + e.what());
    }
    if (start_clock == kMinutesPerDay) start_clock = 0;
    if (group == ClassGroup::CUA && state == MobilityState::Work)
      throw InputError(at_line(line_no) + "{C,U,A} individuals cannot be at Work");
    if (start_clock == end_clock) throw InputError(at_line(line_no) + "record has zero length");
    int duration = end_clock - start_clock;
    if (duration <= 0) duration += kMinutesPerDay;

    auto [it, inserted] = by_id.try_emplace(fields[0], log.size());
    if (inserted) log.push_back({fields[0], group, {}});
    IndividualLog& person = log[it->second];
    if (person.group != group)
      throw InputError(at_line(line_no) + "individual '" + person.id + "' changes group");

    int start = start_clock;
    if (!person.records.empty()) {
      const int prev_end = person.records.back().end_minute;
      const int prev_clock = mod_day(prev_end);
      if (start_clock != prev_clock) {
        const int forward = mod_day(start_clock - prev_clock);
        if (forward < kMinutesPerDay / 2) {
          throw InputError(at_line(line_no) + "coverage gap " + format_clock(prev_clock) + "-" +
                           format_clock(start_clock) + " for individual '" + person.id + "'");
        }
        throw InputError(at_line(line_no) + "record starting " + format_clock(start_clock) +
                         " overlaps the previous record ending " + format_clock(prev_clock) +
                         " for individual '" + person.id + "'");
      }
      start = prev_end;
    }
    person.records.push_back({start, start + duration, state, line_no});
  }
  return log;
}

void write_activity_csv(std::ostream& out, const ActivityLog& log) {
  out << "individual_id,group,start_hhmm,end_hhmm,state\n";
  for (const auto& person : log) {
    for (const auto& r : person.records) {
      const int end_clock = mod_day(r.end_minute) == 0 ? kMinutesPerDay : mod_day(r.end_minute);
      const char* state = r.state == MobilityState::Home   ? "home"
                          : r.state == MobilityState::Work ? "work"
                                                           : "poi";
      out << person.id << ',' << to_string(person.group) << ',' << format_clock(mod_day(r.start_minute))
          << ',' << format_clock(end_clock) << ',' << state << '\n';
    }
  }
}

std::vector<StateSequence> discretize(const ActivityLog& log, int interval_minutes) {
  if (interval_minutes <= 0 || kMinutesPerDay % interval_minutes != 0)
    throw InputError("interval of " + std::to_string(interval_minutes) +
                     " minutes does not divide 24 hours");
  std::vector<StateSequence> out;
  for (const auto& person : log) {
    StateSequence seq{person.id, person.group, 0, {}};
    if (person.records.empty()) {
      out.push_back(std::move(seq));
      continue;
    }
    for (std::size_t i = 1; i < person.records.size(); ++i) {
      const auto& prev = person.records[i - 1];
      const auto& cur = person.records[i];
      if (cur.start_minute != prev.end_minute) {
        throw InputError(at_line(cur.line) + "coverage gap or overlap " +
                         format_clock(mod_day(prev.end_minute)) + "-" +
                         format_clock(mod_day(cur.start_minute)) + " for individual '" + person.id + "'");
      }
    }
    const long begin = person.records.front().start_minute;
    const long end = person.records.back().end_minute;
    seq.first_slot = (begin + interval_minutes - 1) / interval_minutes;
    std::size_t r = 0;
    for (long slot = seq.first_slot; slot * interval_minutes < end; ++slot) {
      const long t = slot * interval_minutes;
      while (person.records[r].end_minute <= t) ++r;
      seq.states.push_back(person.records[r].state);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

IndividualLog synthesize_log(const StateSequence& sequence, int interval_minutes) {
  IndividualLog log{sequence.individual, sequence.group, {}};
  for (std::size_t i = 0; i < sequence.states.size(); ++i) {
    const long slot = sequence.first_slot + static_cast<long>(i);
    const int start = static_cast<int>(slot * interval_minutes);
    const bool at_midnight = mod_day(start) == 0;
    if (!log.records.empty() && log.records.back().state == sequence.states[i] && !at_midnight) {
      log.records.back().end_minute = start + interval_minutes;
    } else {
      log.records.push_back({start, start + interval_minutes, sequence.states[i], 0});
    }
  }
  return log;
}

EstimateResult estimate_matrices(std::span<const StateSequence> sequences,
                                 const PeriodSchedule& schedule, int interval_minutes,
                                 Aggregation aggregation) {
  if (interval_minutes <= 0 || kMinutesPerDay % interval_minutes != 0)
    throw InputError("interval does not divide 24 hours");

  using Counts = std::array<std::array<double, 3>, 3>;
  struct Tally {
    Counts pooled{};
    std::array<double, 3> averaged_sum[3]{};
    std::array<int, 3> averaged_n{};
    std::array<double, 3> initial{};
    std::array<double, 3> occupancy{};
  };
  std::map<std::pair<int, ClassGroup>, Tally> cells;
  bool group_seen[2] = {false, false};

  auto period_of_slot = [&](long slot) { return schedule.period_at(mod_day(slot * interval_minutes)); };

  for (const auto& seq : sequences) {
    group_seen[static_cast<int>(seq.group)] = true;
    std::map<int, Counts> own;
    for (std::size_t i = 0; i < seq.states.size(); ++i) {
      const long slot = seq.first_slot + static_cast<long>(i);
      const int period = period_of_slot(slot);
      Tally& cell = cells[{period, seq.group}];
      const auto s = idx(seq.states[i]);
      cell.occupancy[s] += 1;
      const int since_start = mod_day(slot * interval_minutes - schedule.period(period).start_minute);
      if (since_start < interval_minutes) cell.initial[s] += 1;
      if (i + 1 < seq.states.size()) {
        const auto next = idx(seq.states[i + 1]);
        cell.pooled[s][next] += 1;
        own[period][s][next] += 1;
      }
    }
    for (const auto& [period, counts] : own) {
      Tally& cell = cells[{period, seq.group}];
      for (std::size_t r = 0; r < 3; ++r) {
        double total = counts[r][0] + counts[r][1] + counts[r][2];
        if (total == 0) continue;
        for (std::size_t c = 0; c < 3; ++c) cell.averaged_sum[r][c] += counts[r][c] / total;
        cell.averaged_n[r] += 1;
      }
    }
  }

  EstimateResult result{TransitionMatrixSet(schedule), {}};
  for (const ClassGroup group : {ClassGroup::CUA, ClassGroup::ES}) {
    if (!group_seen[static_cast<int>(group)]) {
      result.warnings.push_back("no individuals in group " + std::string(to_string(group)) +
                                "; its matrices are omitted");
      continue;
    }
    for (const auto& period : schedule.periods()) {
      const std::string label =
          "period " + std::to_string(period.index) + " group " + std::string(to_string(group));
      const auto it = cells.find({period.index, group});
      if (it == cells.end()) {
        result.warnings.push_back(label + ": no observations; entry omitted");
        continue;
      }
      const Tally& cell = it->second;
      ChainParams params;
      static const char* kRowNames[3] = {"Home", "Work", "POI"};
      for (std::size_t r = 0; r < 3; ++r) {
        std::array<double, 3> row{};
        double total = 0;
        if (aggregation == Aggregation::PooledCounts) {
          row = cell.pooled[r];
          total = row[0] + row[1] + row[2];
        } else if (cell.averaged_n[r] > 0) {
          for (std::size_t c = 0; c < 3; ++c) row[c] = cell.averaged_sum[r][c] / cell.averaged_n[r];
          total = row[0] + row[1] + row[2];
        }
        if (total == 0) {
          result.warnings.push_back(label + " row " + kRowNames[r] +
                                    ": no observed transitions; identity row used");
          row = {0, 0, 0};
          row[r] = 1;
          total = 1;
        }
        for (std::size_t c = 0; c < 3; ++c) params.transition[r][c] = row[c] / total;
      }
      auto initial = cell.initial;
      double total = initial[0] + initial[1] + initial[2];
      if (total == 0) {
        result.warnings.push_back(label + ": nobody observed at period start; initial vector uses "
                                          "occupancy over the whole period");
        initial = cell.occupancy;
        total = initial[0] + initial[1] + initial[2];
      }
      for (std::size_t s = 0; s < 3; ++s) params.initial[s] = initial[s] / total;
      result.matrices.set(period.index, group, params);
    }
  }
  return result;
}

}  // namespace opsim
