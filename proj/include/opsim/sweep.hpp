// Seed x axis x mode parameter sweeps with deterministic merging.
#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opsim/core.hpp"
#include "opsim/metrics.hpp"
#include "opsim/mobility.hpp"

namespace opsim {

enum class SweepAxis : std::uint8_t { Patients, Participation };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view text);

// Patients: 2,4,..,10. Participation: 0.1,0.2,..,1.0.
std::vector<double> axis_values(SweepAxis axis);

// Applies one axis value to the base config. Caregivers track patients.
ScenarioConfig config_at(const ScenarioConfig& base, SweepAxis axis, double value,
                         std::uint64_t seed);

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 99;  // inclusive
  std::size_t count() const { return static_cast<std::size_t>(last - first + 1); }
};

// Parses "A..B" (inclusive) or a single seed.
SeedRange parse_seed_range(std::string_view text);

struct SweepRun {
  double axis_value = 0;
  std::uint64_t seed = 0;
  RoutingMode mode = RoutingMode::Hybrid;
  RunMetrics metrics;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::Participation;
  std::vector<RoutingMode> modes;
  SeedRange seeds;
  std::vector<SweepRun> runs;  // (axis value, seed, mode) order
};

// Every (axis value, seed) cell runs all modes on one shared trace. Cells are
// distributed over `threads` workers; output order never depends on them.
SweepTable run_sweep(const ScenarioConfig& base, SweepAxis axis, std::span<const RoutingMode> modes,
                     SeedRange seeds, const TransitionMatrixSet& raw_matrices, unsigned threads = 1);

struct SummaryRow {
  RoutingMode mode = RoutingMode::Hybrid;
  std::string axis_name;
  double axis_value = 0;
  MetricsReport report;
};

// One row per (axis value, mode). On the participation axis UPN rows are
// labelled "connectivity" with value participation * internet_ratio.
std::vector<SummaryRow> summarize_sweep(const SweepTable& table, const ScenarioConfig& base);

// mode,axis_name,axis_value,n_seeds,delivery_mean,delivery_sem,latency_mean_h,latency_sem_h,latency_max_h
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

// DTN-vs-Hybrid gaps per axis value, both absolute and relative.
nlohmann::json dtn_hybrid_gaps(std::span<const SummaryRow> rows);

nlohmann::json sweep_manifest(const SweepTable& table, const ScenarioConfig& base,
                              std::span<const SummaryRow> rows);

// Hash over the embedded default config and matrix tables.
std::string defaults_hash();

}  // namespace opsim
