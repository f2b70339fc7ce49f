#include "opsim/sweep.hpp"

#include <algorithm>

#include "opsim/engine.hpp"
#include "opsim/io.hpp"

namespace opsim {

std::string_view to_string(SweepAxis axis) {
  return axis == SweepAxis::Patients ? "patients" : "participation";
}

SweepAxis parse_axis(std::string_view text) {
  if (text == "patients") return SweepAxis::Patients;
  if (text == "participation") return SweepAxis::Participation;
  throw ConfigError("unknown axis '" + std::string(text) + "' (expected patients or participation)");
}

std::vector<double> axis_values(SweepAxis axis) {
  std::vector<double> out;
  if (axis == SweepAxis::Patients) {
    for (int n = 2; n <= 10; n += 2) out.push_back(n);
  } else {
    for (int k = 1; k <= 10; ++k) out.push_back(k / 10.0);
  }
  return out;
}

ScenarioConfig config_at(const ScenarioConfig& base, SweepAxis axis, double value,
                         std::uint64_t seed) {
  ScenarioConfig c = base;
  c.seed = seed;
  if (axis == SweepAxis::Patients) {
    c.n_patients = static_cast<int>(value);
    c.n_caregivers = c.n_patients;
  } else {
    c.participation_ratio = value;
  }
  return c;
}

SeedRange parse_seed_range(std::string_view text) {
  auto parse = [&](std::string_view part) -> std::uint64_t {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string_view::npos)
      throw ConfigError("malformed seed range '" + std::string(text) + "' (expected A..B)");
    return std::stoull(std::string(part));
  };
  const auto dots = text.find("..");
  SeedRange r;
  if (dots == std::string_view::npos) {
    r.first = r.last = parse(text);
  } else {
    r.first = parse(text.substr(0, dots));
    r.last = parse(text.substr(dots + 2));
  }
  if (r.last < r.first) throw ConfigError("seed range '" + std::string(text) + "' is empty");
  return r;
}

SweepTable run_sweep(const ScenarioConfig& base, SweepAxis axis, std::span<const RoutingMode> modes,
                     SeedRange seeds, const TransitionMatrixSet& raw_matrices, unsigned threads) {
  SweepTable table;
  table.axis = axis;
  table.modes.assign(modes.begin(), modes.end());
  table.seeds = seeds;

  const auto values = axis_values(axis);
  for (double v : values) require_valid(config_at(base, axis, v, seeds.first));

  const std::size_t n_seeds = seeds.count();
  const std::size_t n_cells = values.size() * n_seeds;
  table.runs.resize(n_cells * modes.size());

  parallel_for(n_cells, threads, [&](std::size_t cell) {
    const double value = values[cell / n_seeds];
    const std::uint64_t seed = seeds.first + cell % n_seeds;
    const auto config = config_at(base, axis, value, seed);
    const auto results = run_paired_modes(config, modes, raw_matrices);
    for (std::size_t m = 0; m < results.size(); ++m) {
      table.runs[cell * modes.size() + m] = {
          value, seed, results[m].mode, summarize(results[m].outcomes, results[m].step_minutes)};
    }
  });
  return table;
}

std::vector<SummaryRow> summarize_sweep(const SweepTable& table, const ScenarioConfig& base) {
  std::vector<SummaryRow> rows;
  for (double value : axis_values(table.axis)) {
    for (const RoutingMode mode : table.modes) {
      std::vector<RunMetrics> per_seed;
      for (const auto& run : table.runs) {
        if (run.axis_value == value && run.mode == mode) per_seed.push_back(run.metrics);
      }
      SummaryRow row;
      row.mode = mode;
      row.axis_name = std::string(to_string(table.axis));
      row.axis_value = value;
      if (table.axis == SweepAxis::Participation && mode == RoutingMode::UPN) {
        row.axis_name = "connectivity";
        row.axis_value = value * base.internet_ratio;
      }
      row.report = aggregate_seeds(per_seed);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::string hours(std::optional<double> minutes) {
  return minutes ? format_double(*minutes / 60.0) : std::string();
}

}  // namespace

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "mode,axis_name,axis_value,n_seeds,delivery_mean,delivery_sem,latency_mean_h,latency_sem_h,"
         "latency_max_h\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << to_string(row.mode) << ',' << row.axis_name << ',' << format_double(row.axis_value) << ','
        << r.n_seeds << ',';
    out << (r.delivery ? format_double(r.delivery->mean) : "") << ',';
    out << (r.delivery && r.delivery->sem ? format_double(*r.delivery->sem) : "") << ',';
    out << hours(r.latency_minutes ? std::optional(r.latency_minutes->mean) : std::nullopt) << ',';
    out << hours(r.latency_minutes ? r.latency_minutes->sem : std::nullopt) << ',';
    out << hours(r.max_latency_minutes) << '\n';
  }
}

nlohmann::json dtn_hybrid_gaps(std::span<const SummaryRow> rows) {
  nlohmann::json points = nlohmann::json::array();
  double sum_abs = 0, sum_rel = 0, sum_lat_abs = 0, sum_lat_rel = 0;
  std::size_t n = 0, n_lat = 0;
  for (const auto& dtn : rows) {
    if (dtn.mode != RoutingMode::DTN) continue;
    const auto hybrid = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) {
      return r.mode == RoutingMode::Hybrid && r.axis_value == dtn.axis_value &&
             r.axis_name == dtn.axis_name;
    });
    if (hybrid == rows.end() || !dtn.report.delivery || !hybrid->report.delivery) continue;
    const double d = dtn.report.delivery->mean;
    const double h = hybrid->report.delivery->mean;
    nlohmann::json point = {{"axis_value", dtn.axis_value},
                            {"delivery_absolute", h - d},
                            {"delivery_relative", h > 0 ? (h - d) / h : 0.0}};
    sum_abs += h - d;
    sum_rel += h > 0 ? (h - d) / h : 0.0;
    ++n;
    if (dtn.report.latency_minutes && hybrid->report.latency_minutes) {
      const double ld = dtn.report.latency_minutes->mean / 60.0;
      const double lh = hybrid->report.latency_minutes->mean / 60.0;
      point["latency_absolute_h"] = ld - lh;
      point["latency_relative"] = ld > 0 ? (ld - lh) / ld : 0.0;
      sum_lat_abs += ld - lh;
      sum_lat_rel += ld > 0 ? (ld - lh) / ld : 0.0;
      ++n_lat;
    }
    points.push_back(point);
  }
  nlohmann::json out = {{"points", points}};
  if (n > 0) {
    out["mean_delivery_absolute"] = sum_abs / static_cast<double>(n);
    out["mean_delivery_relative"] = sum_rel / static_cast<double>(n);
  }
  if (n_lat > 0) {
    out["mean_latency_absolute_h"] = sum_lat_abs / static_cast<double>(n_lat);
    out["mean_latency_relative"] = sum_lat_rel / static_cast<double>(n_lat);
  }
  return out;
}

std::string defaults_hash() {
  const nlohmann::json defaults = {{"config", config_to_json(ScenarioConfig{})},
                                   {"matrices", matrix_set_to_json(table_defaults())}};
  return git_blob_hash(defaults.dump());
}

nlohmann::json sweep_manifest(const SweepTable& table, const ScenarioConfig& base,
                              std::span<const SummaryRow> rows) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto m : table.modes) modes.push_back(to_string(m));
  return {{"config_digest", config_digest(base)},
          {"defaults_hash", defaults_hash()},
          {"axis", to_string(table.axis)},
          {"axis_values", axis_values(table.axis)},
          {"modes", modes},
          {"seed_first", table.seeds.first},
          {"seed_last", table.seeds.last},
          {"runs", table.runs.size()},
          {"dtn_vs_hybrid", dtn_hybrid_gaps(rows)}};
}

}  // namespace opsim
