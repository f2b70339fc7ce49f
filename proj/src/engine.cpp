#include "opsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "opsim/io.hpp"
#include "opsim/population.hpp"
#include "opsim/routing.hpp"

namespace opsim {

namespace {

void move_node(NodeRecord& node, MobilityState state, std::span<const Cell> pois, RngStream& poi_stream) {
  const Placement p = place_node(node, state, pois, poi_stream);
  node.current_state = state;
  node.current_cell = p.cell;
  node.current_poi = p.poi_index;
}

}  // namespace

Trace generate_trace(const ScenarioConfig& config, const TransitionMatrixSet& raw_matrices,
                     StreamSet& streams, const StepObserver& observer) {
  require_valid(config);
  const auto matrices = normalize_matrix_set(raw_matrices).matrices;
  const auto& schedule = matrices.schedule();

  Trace trace;
  trace.nodes = build_population(config, streams);
  const auto pois = poi_cells(trace.nodes);

  const auto& start = schedule.periods()[streams.period_start.index(schedule.size())];
  trace.start_period = start.index;
  trace.start_minute = start.start_minute;

  for (auto& node : trace.nodes) {
    if (is_stationary(node.cls)) continue;
    const auto state = initial_state(node.cls, trace.start_period, matrices, streams.mobility);
    move_node(node, state, pois, streams.poi_choice);
  }

  trace.contacts.reserve(static_cast<std::size_t>(config.duration_steps) + 1);
  for (int step = 0; step <= config.duration_steps; ++step) {
    if (step > 0) {
      // The transition into `step` uses the period of the interval it leaves.
      const int period =
          schedule.period_at(trace.start_minute + (step - 1) * config.step_minutes);
      for (auto& node : trace.nodes) {
        if (is_stationary(node.cls)) continue;
        const auto state = step_state(node.current_state, node.cls, period, matrices, streams.mobility);
        move_node(node, state, pois, streams.poi_choice);
      }
    }
    if (observer) observer(step, trace.nodes);
    trace.contacts.push_back(contacts_at_step(trace.nodes, step, config.poi_relays));
  }
  return trace;
}

Trace generate_trace(const ScenarioConfig& config, const TransitionMatrixSet& raw_matrices) {
  StreamSet streams(config.seed);
  return generate_trace(config, raw_matrices, streams);
}

RunResult route_trace(const Trace& trace, const ScenarioConfig& config, RoutingMode mode) {
  const auto started = std::chrono::steady_clock::now();
  RunResult result;
  result.config_digest = config_digest(config);
  result.seed = config.seed;
  result.mode = mode;
  result.step_minutes = config.step_minutes;
  result.start_period = trace.start_period;

  std::vector<MessageRecord> messages;
  for (const auto& node : trace.nodes) {
    if (node.cls != NodeClass::Patient) continue;
    for (int j = 0; j < config.messages_per_patient; ++j) {
      messages.push_back(MessageRecord::create(static_cast<int>(messages.size()), node.id, 0,
                                               config.ttl_steps));
    }
  }

  const RelayRules rules{mode, config.caregiver_scope};
  for (std::size_t step = 0; step < trace.contacts.size(); ++step) {
    const auto& events = trace.contacts[step];
    result.contacts_per_step.push_back(events.size());
    route_step(messages, trace.nodes, events, rules, static_cast<int>(step));
  }

  result.outcomes.reserve(messages.size());
  for (const auto& m : messages) {
    result.outcomes.push_back({m.id, m.origin_patient, m.created_step, m.delivered(), m.delivered_step});
  }
  result.wall_clock = std::chrono::steady_clock::now() - started;
  return result;
}

RunResult run_scenario(const ScenarioConfig& config) {
  return run_scenario(config, table_defaults(config.matrix_variant));
}

RunResult run_scenario(const ScenarioConfig& config, const TransitionMatrixSet& raw_matrices) {
  const RoutingMode mode = config.mode;
  return run_paired_modes(config, std::span(&mode, 1), raw_matrices).front();
}

std::vector<RunResult> run_paired_modes(const ScenarioConfig& config,
                                        std::span<const RoutingMode> modes) {
  return run_paired_modes(config, modes, table_defaults(config.matrix_variant));
}

std::vector<RunResult> run_paired_modes(const ScenarioConfig& config,
                                        std::span<const RoutingMode> modes,
                                        const TransitionMatrixSet& raw_matrices) {
  const auto started = std::chrono::steady_clock::now();
  const Trace trace = generate_trace(config, raw_matrices);
  const auto trace_time = std::chrono::steady_clock::now() - started;
  std::vector<RunResult> out;
  out.reserve(modes.size());
  for (const RoutingMode mode : modes) {
    out.push_back(route_trace(trace, config, mode));
    out.back().wall_clock += trace_time;
  }
  return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
        return;
      }
    }
  };
  const auto workers = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

std::string config_digest(const ScenarioConfig& config) {
  return git_blob_hash(config_to_json(config).dump());
}

void write_outcomes_csv(std::ostream& out, const RunResult& result) {
  out << "message_id,origin,created_step,delivered,delivered_step,latency_minutes,mode,seed\n";
  for (const auto& o : result.outcomes) {
    out << o.message_id << ',' << o.origin << ',' << o.created_step << ',' << (o.delivered ? 1 : 0)
        << ',';
    if (o.delivered_step) out << *o.delivered_step;
    out << ',';
    if (const auto z = latency_minutes(o, result.step_minutes)) out << *z;
    out << ',' << to_string(result.mode) << ',' << result.seed << '\n';
  }
}

}  // namespace opsim
