#include "opsim/mobility.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace opsim {

namespace {

constexpr int kHome = static_cast<int>(MobilityState::Home);
constexpr int kWork = static_cast<int>(MobilityState::Work);
constexpr int kPoi = static_cast<int>(MobilityState::Poi);

int period_length(const Period& p) {
  const int len = ((p.end_minute - p.start_minute) % kMinutesPerDay + kMinutesPerDay) % kMinutesPerDay;
  return len == 0 ? kMinutesPerDay : len;
}

ClassGroup require_group(NodeClass cls) {
  const auto g = group_of(cls);
  if (!g) throw InputError("stationary node class has no mobility chain");
  return *g;
}

const char* kStateNames[3] = {"Home", "Work", "POI"};

}  // namespace

PeriodSchedule::PeriodSchedule(std::vector<Period> periods) : periods_(std::move(periods)) {
  if (periods_.empty()) throw InputError("period schedule is empty");
  by_minute_.fill(0);
  for (const auto& p : periods_) {
    if (p.index < 1) throw InputError("period indices start at 1");
    if (p.start_minute < 0 || p.start_minute >= kMinutesPerDay || p.end_minute < 0 ||
        p.end_minute > kMinutesPerDay)
      throw InputError("period " + std::to_string(p.index) + " has a clock time outside 00:00-24:00");
    const int len = period_length(p);
    for (int m = 0; m < len; ++m) {
      int& slot = by_minute_[static_cast<std::size_t>((p.start_minute + m) % kMinutesPerDay)];
      if (slot != 0)
        throw InputError("periods " + std::to_string(slot) + " and " + std::to_string(p.index) +
                         " overlap at " + format_clock((p.start_minute + m) % kMinutesPerDay));
      slot = p.index;
    }
  }
  for (int m = 0; m < kMinutesPerDay; ++m) {
    if (by_minute_[static_cast<std::size_t>(m)] == 0)
      throw InputError("period schedule leaves " + format_clock(m) + " uncovered");
  }
}

PeriodSchedule PeriodSchedule::table_defaults() {
  return PeriodSchedule({{1, 19 * 60, 6 * 60 + 30},
                         {2, 6 * 60 + 30, 9 * 60 + 30},
                         {3, 9 * 60 + 30, 16 * 60 + 30},
                         {4, 16 * 60 + 30, 19 * 60}});
}

int PeriodSchedule::period_at(int minute_of_day) const {
  const int m = ((minute_of_day % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay;
  return by_minute_[static_cast<std::size_t>(m)];
}

const Period& PeriodSchedule::period(int index) const {
  for (const auto& p : periods_) {
    if (p.index == index) return p;
  }
  throw InputError("unknown period index " + std::to_string(index));
}

void TransitionMatrixSet::set(int period, ClassGroup group, ChainParams params) {
  (void)schedule_.period(period);
  entries_[{period, group}] = params;
}

bool TransitionMatrixSet::contains(int period, ClassGroup group) const {
  return entries_.count({period, group}) != 0;
}

const ChainParams& TransitionMatrixSet::get(int period, ClassGroup group) const {
  const auto it = entries_.find({period, group});
  if (it == entries_.end()) {
    (void)schedule_.period(period);
    throw InputError("no transition matrix for period " + std::to_string(period) + ", group " +
                     std::string(to_string(group)));
  }
  return it->second;
}

TransitionMatrixSet table_defaults(MatrixVariant variant) {
  TransitionMatrixSet set(PeriodSchedule::table_defaults());
  using G = ClassGroup;
  set.set(1, G::CUA, {{0.85, 0, 0.015}, {{{0.94, 0, 0.064}, {0, 1, 0}, {0.37, 0, 0.63}}}});
  set.set(2, G::CUA, {{0.93, 0, 0.070}, {{{0.97, 0, 0.032}, {0, 1, 0}, {0.59, 0, 0.41}}}});
  set.set(3, G::CUA, {{0.76, 0, 0.24}, {{{0.89, 0, 0.11}, {0, 1, 0}, {0.36, 0, 0.64}}}});
  set.set(4, G::CUA, {{0.77, 0, 0.23}, {{{0.91, 0, 0.086}, {0, 1, 0}, {0.30, 0, 0.70}}}});

  set.set(1, G::ES,
          {{0.70, 0.079, 0.22}, {{{0.85, 0.019, 0.13}, {0.14, 0.81, 0.043}, {0.39, 0.32, 0.58}}}});
  set.set(2, G::ES,
          {{0.71, 0.16, 0.13}, {{{0.86, 0.079, 0.061}, {0.17, 0.61, 0.21}, {0.51, 0.18, 0.31}}}});
  set.set(3, G::ES,
          {{0.50, 0.33, 0.13}, {{{0.80, 0.083, 0.12}, {0.063, 0.90, 0.037}, {0.30, 0.057, 0.64}}}});
  const double work_to_poi = variant == MatrixVariant::Corrected ? 0.078 : 0.78;
  set.set(4, G::ES,
          {{0.48, 0.20, 0.32},
           {{{0.80, 0.027, 0.17}, {0.042, 0.88, work_to_poi}, {0.28, 0.058, 0.66}}}});
  return set;
}

NormalizedMatrices normalize_matrix_set(const TransitionMatrixSet& raw) {
  NormalizedMatrices out{TransitionMatrixSet(raw.schedule()), {}};

  auto normalize = [&](Probabilities v, const std::string& where) {
    double sum = 0;
    for (double x : v) {
      if (!(x >= 0) || !std::isfinite(x)) throw InputError(where + " has a negative or non-finite entry");
      sum += x;
    }
    if (!(sum > 0)) throw InputError(where + " is all zeros");
    if (std::abs(sum - 1.0) > 0.05) {
      std::ostringstream os;
      os << where << " sums to " << sum << "; renormalized";
      out.warnings.push_back(os.str());
    }
    for (double& x : v) x /= sum;
    return v;
  };

  for (const auto& [key, params] : raw.entries()) {
    const auto [period, group] = key;
    const std::string label =
        "period " + std::to_string(period) + " group " + std::string(to_string(group));
    if (group == ClassGroup::CUA &&
        (params.initial[kWork] != 0 || params.transition[kHome][kWork] != 0 ||
         params.transition[kPoi][kWork] != 0)) {
      throw InputError(label + " allows entering Work, which {C,U,A} nodes never do");
    }
    ChainParams norm;
    norm.initial = normalize(params.initial, label + " initial vector");
    for (int r = 0; r < 3; ++r) {
      norm.transition[static_cast<std::size_t>(r)] =
          normalize(params.transition[static_cast<std::size_t>(r)],
                    label + " row " + kStateNames[r]);
    }
    out.matrices.set(period, group, norm);
  }
  return out;
}

MobilityState sample_state(const Probabilities& probs, double u) {
  double cdf = 0;
  int last_positive = -1;
  for (int i = 0; i < 3; ++i) {
    const double p = probs[static_cast<std::size_t>(i)];
    if (p <= 0) continue;
    last_positive = i;
    cdf += p;
    if (u < cdf) return static_cast<MobilityState>(i);
  }
  if (last_positive < 0) throw InputError("cannot sample from an all-zero distribution");
  // u fell beyond a cumulative sum slightly below 1.
  return static_cast<MobilityState>(last_positive);
}

MobilityState initial_state(NodeClass cls, int period, const TransitionMatrixSet& matrices, double u) {
  if (is_stationary(cls)) return MobilityState::Stationary;
  return sample_state(matrices.get(period, require_group(cls)).initial, u);
}

MobilityState initial_state(NodeClass cls, int period, const TransitionMatrixSet& matrices,
                            RngStream& stream) {
  if (is_stationary(cls)) return MobilityState::Stationary;
  return initial_state(cls, period, matrices, stream.uniform());
}

MobilityState step_state(MobilityState current, NodeClass cls, int period,
                         const TransitionMatrixSet& matrices, double u) {
  if (is_stationary(cls)) return MobilityState::Stationary;
  if (current == MobilityState::Stationary) throw InputError("mobile node in stationary state");
  const auto& row = matrices.get(period, require_group(cls)).transition[static_cast<std::size_t>(current)];
  return sample_state(row, u);
}

MobilityState step_state(MobilityState current, NodeClass cls, int period,
                         const TransitionMatrixSet& matrices, RngStream& stream) {
  if (is_stationary(cls)) return MobilityState::Stationary;
  return step_state(current, cls, period, matrices, stream.uniform());
}

Placement place_node(const NodeRecord& node, MobilityState new_state, std::span<const Cell> pois,
                     RngStream& stream) {
  switch (new_state) {
    case MobilityState::Home:
    case MobilityState::Stationary:
      return {node.home_cell, std::nullopt};
    case MobilityState::Work:
      if (!node.work_cell)
        throw InputError("node " + std::to_string(node.id) + " (" + std::string(to_string(node.cls)) +
                         ") has no work location");
      return {*node.work_cell, std::nullopt};
    case MobilityState::Poi: {
      if (pois.empty()) throw InputError("POI state requested but no POIs exist");
      if (node.current_state == MobilityState::Poi && node.current_poi && *node.current_poi < pois.size())
        return {pois[*node.current_poi], node.current_poi};
      const std::size_t idx = stream.index(pois.size());
      return {pois[idx], idx};
    }
  }
  throw InputError("invalid mobility state");
}

std::string format_clock(int minute_of_day) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minute_of_day / 60, minute_of_day % 60);
  return buf;
}

int parse_clock(std::string_view text) {
  std::string digits;
  for (char ch : text) {
    if (ch == ':') continue;
    if (ch < '0' || ch > '9') throw InputError("malformed clock time '" + std::string(text) + "'");
    digits.push_back(ch);
  }
  if (digits.size() != 4) throw InputError("malformed clock time '" + std::string(text) + "'");
  const int hh = std::stoi(digits.substr(0, 2));
  const int mm = std::stoi(digits.substr(2, 2));
  if (mm >= 60 || hh > 24 || (hh == 24 && mm != 0))
    throw InputError("clock time '" + std::string(text) + "' out of range");
  return hh * 60 + mm;
}

nlohmann::json matrix_set_to_json(const TransitionMatrixSet& matrices) {
  nlohmann::json schedule = nlohmann::json::array();
  for (const auto& p : matrices.schedule().periods()) {
    schedule.push_back({{"period", p.index},
                        {"start", format_clock(p.start_minute)},
                        {"end", format_clock(p.end_minute)}});
  }
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [key, params] : matrices.entries()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : params.transition) rows.push_back(row);
    entries[std::to_string(key.first)][std::string(to_string(key.second))] = {
        {"initial", params.initial}, {"transition", rows}};
  }
  return {{"schedule", schedule}, {"matrices", entries}};
}

namespace {

Probabilities read_vector(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) throw InputError(where + " must be an array of 3 numbers");
  Probabilities out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw InputError(where + " must contain numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace

TransitionMatrixSet matrix_set_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("schedule") || !doc.contains("matrices"))
    throw InputError("matrix set JSON needs 'schedule' and 'matrices'");
  for (const auto& [key, _] : doc.items()) {
    if (key != "schedule" && key != "matrices") throw InputError("unknown matrix set key '" + key + "'");
  }
  std::vector<Period> periods;
  for (const auto& p : doc.at("schedule")) {
    if (!p.is_object() || !p.contains("period") || !p.contains("start") || !p.contains("end"))
      throw InputError("schedule entries need period, start and end");
    periods.push_back({p.at("period").get<int>(), parse_clock(p.at("start").get<std::string>()),
                       parse_clock(p.at("end").get<std::string>())});
  }
  for (auto& p : periods) {
    if (p.start_minute == kMinutesPerDay) p.start_minute = 0;
  }
  TransitionMatrixSet set{PeriodSchedule(std::move(periods))};
  for (const auto& [period_key, groups] : doc.at("matrices").items()) {
    int period = 0;
    try {
      period = std::stoi(period_key);
    } catch (const std::exception&) {
      throw InputError("matrix key '" + period_key + "' is not a period index");
    }
    for (const auto& [group_key, entry] : groups.items()) {
      const auto where = "matrices." + period_key + "." + group_key;
      if (!entry.is_object() || !entry.contains("initial") || !entry.contains("transition"))
        throw InputError(where + " needs 'initial' and 'transition'");
      ChainParams params;
      params.initial = read_vector(entry.at("initial"), where + ".initial");
      const auto& rows = entry.at("transition");
      if (!rows.is_array() || rows.size() != 3) throw InputError(where + ".transition must have 3 rows");
      for (std::size_t r = 0; r < 3; ++r)
        params.transition[r] = read_vector(rows[r], where + ".transition[" + std::to_string(r) + "]");
      set.set(period, parse_group(group_key), params);
    }
  }
  return set;
}

}  // namespace opsim
