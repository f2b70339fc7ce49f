// Delivery probability, latency statistics, and cross-seed aggregation.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "opsim/core.hpp"

namespace opsim {

struct MessageOutcome {
  int message_id = 0;
  NodeId origin = 0;
  int created_step = 0;
  bool delivered = false;
  std::optional<int> delivered_step;
  bool operator==(const MessageOutcome&) const = default;
};

// z_m in minutes, or nullopt for undelivered messages.
std::optional<std::int64_t> latency_minutes(const MessageOutcome& outcome, int step_minutes);

// |M_D| / |M|; nullopt when nothing was generated.
std::optional<double> delivery_probability(std::span<const MessageOutcome> outcomes);

struct LatencyStats {
  double mean_minutes = 0;
  double max_minutes = 0;
};

// Over delivered messages only; nullopt when none were delivered.
std::optional<LatencyStats> latency_stats(std::span<const MessageOutcome> outcomes, int step_minutes);

struct RunMetrics {
  std::size_t n_generated = 0;
  std::size_t n_delivered = 0;
  std::optional<double> delivery_probability;
  std::optional<double> mean_latency_minutes;
  std::optional<double> max_latency_minutes;
  bool operator==(const RunMetrics&) const = default;
};

RunMetrics summarize(std::span<const MessageOutcome> outcomes, int step_minutes);

struct MeanSem {
  double mean = 0;
  std::optional<double> sem;  // needs at least two samples
};

// Mean and standard error (sample sd / sqrt(n)). Values are summed in sorted
// order so the result does not depend on input order.
std::optional<MeanSem> mean_sem(std::span<const double> values);

struct MetricsReport {
  std::size_t n_seeds = 0;
  std::size_t n_generated = 0;
  std::size_t n_delivered = 0;
  std::vector<double> per_seed_delivery;
  std::vector<double> per_seed_latency_minutes;  // seeds with >= 1 delivery
  std::optional<MeanSem> delivery;
  std::optional<MeanSem> latency_minutes;
  std::optional<double> max_latency_minutes;
};

// Seeds with no delivery drop out of the latency statistics but still count
// towards delivery. Seeds that generated no message are skipped entirely.
MetricsReport aggregate_seeds(std::span<const RunMetrics> per_seed);

}  // namespace opsim
