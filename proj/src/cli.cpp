#include "opsim/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "opsim/core.hpp"
#include "opsim/engine.hpp"
#include "opsim/estimation.hpp"
#include "opsim/io.hpp"
#include "opsim/mobility.hpp"
#include "opsim/sweep.hpp"

namespace opsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::string modes;
  std::string seeds;
  std::string axis;
  std::vector<std::string> overrides;
  std::string matrices_path;
  unsigned threads = 0;
  bool trace = false;
  std::string input_path;
  int interval = 30;
  std::string aggregate = "pooled";
  std::string variant = "as_printed";
};

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OPSIM_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
}

ScenarioConfig load_config(const Options& opt, std::ostream& err) {
  json doc = opt.config_path.empty() ? config_to_json(ScenarioConfig{}) : parse_json_file(opt.config_path);
  for (const auto& o : opt.overrides) apply_override(doc, o);
  ScenarioConfig config = config_from_json(doc);
  for (const auto& v : validate_config(config)) {
    if (v.severity == Violation::Severity::Warning) err << "warning: " << v.field << ": " << v.message << '\n';
  }
  require_valid(config);
  return config;
}

TransitionMatrixSet load_matrices(const Options& opt, const ScenarioConfig& config, std::ostream& err) {
  const auto defaults = table_defaults(config.matrix_variant);
  if (opt.matrices_path.empty()) return defaults;
  TransitionMatrixSet set = matrix_set_from_json(parse_json_file(opt.matrices_path));
  for (const auto& p : set.schedule().periods()) {
    for (const auto group : {ClassGroup::CUA, ClassGroup::ES}) {
      if (set.contains(p.index, group)) continue;
      if (set.schedule() != defaults.schedule())
        throw InputError("matrix set has no entry for period " + std::to_string(p.index) + ", group " +
                         std::string(to_string(group)));
      err << "warning: no matrix for period " << p.index << ", group " << to_string(group)
          << "; using the built-in default\n";
      set.set(p.index, group, defaults.get(p.index, group));
    }
  }
  for (const auto& w : normalize_matrix_set(set).warnings) err << "warning: " << w << '\n';
  return set;
}

std::vector<RoutingMode> parse_modes(const std::string& list) {
  std::vector<RoutingMode> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto m = parse_mode(item);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw ConfigError("mode list is empty");
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json run_metrics_json(const RunMetrics& m) {
  return {{"n_generated", m.n_generated},
          {"n_delivered", m.n_delivered},
          {"delivery_probability", optional_number(m.delivery_probability)},
          {"mean_latency_minutes", optional_number(m.mean_latency_minutes)},
          {"max_latency_minutes", optional_number(m.max_latency_minutes)}};
}

json report_json(const MetricsReport& r) {
  return {{"n_seeds", r.n_seeds},
          {"n_generated", r.n_generated},
          {"n_delivered", r.n_delivered},
          {"delivery_mean", r.delivery ? json(r.delivery->mean) : json(nullptr)},
          {"delivery_sem", r.delivery ? optional_number(r.delivery->sem) : json(nullptr)},
          {"latency_mean_minutes", r.latency_minutes ? json(r.latency_minutes->mean) : json(nullptr)},
          {"latency_sem_minutes", r.latency_minutes ? optional_number(r.latency_minutes->sem) : json(nullptr)},
          {"latency_max_minutes", optional_number(r.max_latency_minutes)}};
}

void write_json(const fs::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

fs::path prepare_out(const Options& opt) {
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_validate(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto config = load_config(opt, err);
  (void)load_matrices(opt, config, err);
  out << "ok " << config_digest(config) << '\n';
  return kExitOk;
}

int cmd_run(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto config = load_config(opt, err);
  const auto matrices = load_matrices(opt, config, err);
  const auto modes = opt.modes.empty() ? std::vector<RoutingMode>{config.mode} : parse_modes(opt.modes);
  const SeedRange seeds = opt.seeds.empty() ? SeedRange{config.seed, config.seed} : parse_seed_range(opt.seeds);
  const auto dir = prepare_out(opt);

  struct SeedOutput {
    std::vector<RunResult> results;
    std::string contacts;
  };
  std::vector<SeedOutput> per_seed(seeds.count());
  parallel_for(seeds.count(), resolve_threads(opt.threads), [&](std::size_t i) {
    ScenarioConfig c = config;
    c.seed = seeds.first + i;
    const Trace trace = generate_trace(c, matrices);
    for (const auto mode : modes) per_seed[i].results.push_back(route_trace(trace, c, mode));
    if (opt.trace) {
      std::ostringstream os;
      write_contacts_csv(os, trace.contacts);
      per_seed[i].contacts = os.str();
    }
  });

  json runs = json::array();
  json aggregate = json::object();
  for (std::size_t m = 0; m < modes.size(); ++m) {
    std::vector<RunMetrics> metrics;
    for (std::size_t i = 0; i < per_seed.size(); ++i) {
      const RunResult& r = per_seed[i].results[m];
      std::ostringstream csv;
      write_outcomes_csv(csv, r);
      const std::string name = "run_" + std::string(to_string(r.mode)) + "_s" + std::to_string(r.seed) + ".csv";
      write_file(dir / name, csv.str());
      metrics.push_back(summarize(r.outcomes, r.step_minutes));
      json entry = run_metrics_json(metrics.back());
      entry["mode"] = to_string(r.mode);
      entry["seed"] = r.seed;
      entry["start_period"] = r.start_period;
      entry["csv"] = name;
      runs.push_back(entry);
    }
    aggregate[std::string(to_string(modes[m]))] = report_json(aggregate_seeds(metrics));
  }
  if (opt.trace) {
    for (std::size_t i = 0; i < per_seed.size(); ++i)
      write_file(dir / ("contacts_s" + std::to_string(seeds.first + i) + ".csv"), per_seed[i].contacts);
  }
  write_json(dir / "metrics.json", {{"config_digest", config_digest(config)},
                                     {"defaults_hash", defaults_hash()},
                                     {"runs", runs},
                                     {"aggregate", aggregate}});
  out << "wrote " << runs.size() << " run(s) to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto config = load_config(opt, err);
  const auto matrices = load_matrices(opt, config, err);
  const SweepAxis axis = parse_axis(opt.axis);
  const auto modes = parse_modes(opt.modes.empty() ? "dtn,hybrid,upn" : opt.modes);
  const SeedRange seeds = opt.seeds.empty() ? SeedRange{} : parse_seed_range(opt.seeds);
  const auto dir = prepare_out(opt);

  const auto table = run_sweep(config, axis, modes, seeds, matrices, resolve_threads(opt.threads));
  const auto rows = summarize_sweep(table, config);
  const std::string axis_name(to_string(axis));

  std::ostringstream summary;
  write_summary_csv(summary, rows);
  write_file(dir / ("summary_" + axis_name + ".csv"), summary.str());

  std::ostringstream runs;
  runs << "axis_value,seed,mode,n_generated,n_delivered,delivery_probability,mean_latency_minutes,"
          "max_latency_minutes\n";
  auto opt_num = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : table.runs) {
    runs << format_double(r.axis_value) << ',' << r.seed << ',' << to_string(r.mode) << ','
         << r.metrics.n_generated << ',' << r.metrics.n_delivered << ','
         << opt_num(r.metrics.delivery_probability) << ',' << opt_num(r.metrics.mean_latency_minutes) << ','
         << opt_num(r.metrics.max_latency_minutes) << '\n';
  }
  write_file(dir / ("runs_" + axis_name + ".csv"), runs.str());
  write_json(dir / ("manifest_" + axis_name + ".json"), sweep_manifest(table, config, rows));
  out << "wrote " << rows.size() << " summary rows to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_estimate(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.input_path.empty()) throw ConfigError("--input is required");
  Aggregation aggregation = Aggregation::PooledCounts;
  if (opt.aggregate == "average") aggregation = Aggregation::MatrixAverage;
  else if (opt.aggregate != "pooled") throw ConfigError("--aggregate must be pooled or average");

  std::ifstream in(opt.input_path);
  if (!in) throw InputError("cannot open " + opt.input_path);
  const auto log = read_activity_csv(in);
  const auto sequences = discretize(log, opt.interval);
  const auto result =
      estimate_matrices(sequences, PeriodSchedule::table_defaults(), opt.interval, aggregation);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  for (const auto& w : normalize_matrix_set(result.matrices).warnings) err << "warning: " << w << '\n';

  const auto dir = prepare_out(opt);
  write_json(dir / "matrices.json", matrix_set_to_json(result.matrices));
  out << "estimated " << result.matrices.entries().size() << " matrices from " << log.size()
      << " individual(s)\n";
  return kExitOk;
}

int cmd_export_defaults(const Options& opt, std::ostream& out) {
  ScenarioConfig config;
  if (opt.variant == "corrected") config.matrix_variant = MatrixVariant::Corrected;
  else if (opt.variant != "as_printed") throw ConfigError("--variant must be as_printed or corrected");
  const auto dir = prepare_out(opt);
  write_json(dir / "config.json", config_to_json(config));
  write_json(dir / "matrices.json", matrix_set_to_json(table_defaults(config.matrix_variant)));
  out << "wrote config.json and matrices.json to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Rural patient-monitoring message dissemination simulator", "opsim"};
  app.require_subcommand(1);

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Scenario config JSON");
    sub->add_option("--set", opt.overrides, "Override KEY=VALUE (repeatable)")->allow_extra_args(false);
    sub->add_option("--matrices", opt.matrices_path, "Matrix set JSON");
  };
  auto add_run = [&](CLI::App* sub) {
    add_config(sub);
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--mode,--modes", opt.modes, "Comma-separated routing modes");
    sub->add_option("--seeds", opt.seeds, "Inclusive seed range A..B");
    sub->add_option("--threads", opt.threads, "Worker threads (default: OPSIM_THREADS or all cores)");
  };

  auto* validate = app.add_subcommand("validate", "Check a config and optional matrix set");
  add_config(validate);

  auto* run = app.add_subcommand("run", "Run one scenario per seed");
  add_run(run);
  run->add_flag("--trace", opt.trace, "Also write contacts_s<seed>.csv");

  auto* sweep = app.add_subcommand("sweep", "Sweep patients or participation");
  add_run(sweep);
  sweep->add_option("--axis", opt.axis, "patients or participation")->required();

  auto* estimate = app.add_subcommand("estimate", "Estimate matrices from an activity log");
  estimate->add_option("--input", opt.input_path, "Activity log CSV")->required();
  estimate->add_option("--out", opt.out_dir, "Output directory");
  estimate->add_option("--interval", opt.interval, "Sampling interval in minutes");
  estimate->add_option("--aggregate", opt.aggregate, "pooled or average");

  auto* export_defaults = app.add_subcommand("export-defaults", "Write the built-in config and matrices");
  export_defaults->add_option("--out", opt.out_dir, "Output directory");
  export_defaults->add_option("--variant", opt.variant, "as_printed or corrected");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*validate) return cmd_validate(opt, out, err);
    if (*run) return cmd_run(opt, out, err);
    if (*sweep) return cmd_sweep(opt, out, err);
    if (*estimate) return cmd_estimate(opt, out, err);
    return cmd_export_defaults(opt, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace opsim
