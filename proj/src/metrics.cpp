#include "opsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace opsim {

std::optional<std::int64_t> latency_minutes(const MessageOutcome& outcome, int step_minutes) {
  if (!outcome.delivered || !outcome.delivered_step) return std::nullopt;
  return static_cast<std::int64_t>(*outcome.delivered_step - outcome.created_step) * step_minutes;
}

std::optional<double> delivery_probability(std::span<const MessageOutcome> outcomes) {
  if (outcomes.empty()) return std::nullopt;
  const auto delivered = std::count_if(outcomes.begin(), outcomes.end(),
                                       [](const MessageOutcome& o) { return o.delivered; });
  return static_cast<double>(delivered) / static_cast<double>(outcomes.size());
}

std::optional<LatencyStats> latency_stats(std::span<const MessageOutcome> outcomes, int step_minutes) {
  std::int64_t sum = 0;
  std::int64_t max = 0;
  std::size_t n = 0;
  for (const auto& o : outcomes) {
    const auto z = latency_minutes(o, step_minutes);
    if (!z) continue;
    sum += *z;
    max = std::max(max, *z);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return LatencyStats{static_cast<double>(sum) / static_cast<double>(n), static_cast<double>(max)};
}

RunMetrics summarize(std::span<const MessageOutcome> outcomes, int step_minutes) {
  RunMetrics m;
  m.n_generated = outcomes.size();
  m.n_delivered = static_cast<std::size_t>(std::count_if(
      outcomes.begin(), outcomes.end(), [](const MessageOutcome& o) { return o.delivered; }));
  m.delivery_probability = delivery_probability(outcomes);
  if (const auto lat = latency_stats(outcomes, step_minutes)) {
    m.mean_latency_minutes = lat->mean_minutes;
    m.max_latency_minutes = lat->max_minutes;
  }
  return m;
}

std::optional<MeanSem> mean_sem(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  // Offsets from the smallest value keep a constant sample exactly constant.
  const double lo = sorted.front();
  double offset = 0;
  for (double v : sorted) offset += v - lo;
  MeanSem out{lo + offset / n, std::nullopt};
  if (sorted.size() >= 2) {
    double ss = 0;
    for (double v : sorted) ss += (v - out.mean) * (v - out.mean);
    out.sem = std::sqrt(ss / (n - 1)) / std::sqrt(n);
  }
  return out;
}

MetricsReport aggregate_seeds(std::span<const RunMetrics> per_seed) {
  MetricsReport r;
  for (const auto& m : per_seed) {
    if (!m.delivery_probability) continue;
    ++r.n_seeds;
    r.n_generated += m.n_generated;
    r.n_delivered += m.n_delivered;
    r.per_seed_delivery.push_back(*m.delivery_probability);
    if (m.mean_latency_minutes) r.per_seed_latency_minutes.push_back(*m.mean_latency_minutes);
    if (m.max_latency_minutes)
      r.max_latency_minutes = std::max(r.max_latency_minutes.value_or(0.0), *m.max_latency_minutes);
  }
  r.delivery = mean_sem(r.per_seed_delivery);
  r.latency_minutes = mean_sem(r.per_seed_latency_minutes);
  return r;
}

}  // namespace opsim
