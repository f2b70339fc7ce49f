// Single-run orchestration: population, mobility, contacts, routing.
#pragma once

#include <chrono>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "opsim/contact.hpp"
#include "opsim/core.hpp"
#include "opsim/metrics.hpp"
#include "opsim/mobility.hpp"
#include "opsim/rng.hpp"

namespace opsim {

// Mobility and contact history of one run, independent of routing mode.
struct Trace {
  std::vector<NodeRecord> nodes;  // population attributes; positions as of the last step
  int start_period = 0;
  int start_minute = 0;
  std::vector<std::vector<ContactEvent>> contacts;  // index = step, 0..duration_steps
};

// Called after every step's placement, before contacts are computed.
using StepObserver = std::function<void(int step, std::span<const NodeRecord> nodes)>;

// `raw_matrices` are normalized internally. The streams are consumed in place
// so callers can perturb one stream before the run.
Trace generate_trace(const ScenarioConfig& config, const TransitionMatrixSet& raw_matrices,
                     StreamSet& streams, const StepObserver& observer = {});
Trace generate_trace(const ScenarioConfig& config, const TransitionMatrixSet& raw_matrices);

struct RunResult {
  std::string config_digest;
  std::uint64_t seed = 0;
  RoutingMode mode = RoutingMode::Hybrid;
  int step_minutes = 0;
  int start_period = 0;
  std::vector<MessageOutcome> outcomes;
  std::vector<std::size_t> contacts_per_step;
  std::chrono::nanoseconds wall_clock{0};
};

// Routes all patient messages over an existing trace.
RunResult route_trace(const Trace& trace, const ScenarioConfig& config, RoutingMode mode);

// Built-in matrices chosen by config.matrix_variant.
RunResult run_scenario(const ScenarioConfig& config);
RunResult run_scenario(const ScenarioConfig& config, const TransitionMatrixSet& raw_matrices);

// All modes share one mobility/contact trace and one Internet-flag draw.
std::vector<RunResult> run_paired_modes(const ScenarioConfig& config,
                                        std::span<const RoutingMode> modes);
std::vector<RunResult> run_paired_modes(const ScenarioConfig& config,
                                        std::span<const RoutingMode> modes,
                                        const TransitionMatrixSet& raw_matrices);

// Runs fn(0..n-1) over up to `threads` workers. The first exception thrown by
// any task is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

// SHA-1 (git blob style) of the canonical config JSON.
std::string config_digest(const ScenarioConfig& config);

// message_id,origin,created_step,delivered,delivered_step,latency_minutes,mode,seed
void write_outcomes_csv(std::ostream& out, const RunResult& result);

}  // namespace opsim
