#include "opsim/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace opsim {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::string_view to_string(MatrixVariant v) {
  return v == MatrixVariant::AsPrinted ? "as_printed" : "corrected";
}

std::string_view to_string(CaregiverScope s) {
  return s == CaregiverScope::AnyMessage ? "any" : "own_patient";
}

}  // namespace

std::string_view to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Patient: return "patient";
    case NodeClass::Caregiver: return "caregiver";
    case NodeClass::ClinicalStaff: return "clinical_staff";
    case NodeClass::IntermediaryEmployed: return "intermediary_employed";
    case NodeClass::IntermediaryUnemployed: return "intermediary_unemployed";
    case NodeClass::Poi: return "poi";
    case NodeClass::Destination: return "destination";
  }
  return "?";
}

std::string_view to_string(MobilityState s) {
  switch (s) {
    case MobilityState::Home: return "home";
    case MobilityState::Work: return "work";
    case MobilityState::Poi: return "poi";
    case MobilityState::Stationary: return "stationary";
  }
  return "?";
}

std::string_view to_string(RoutingMode m) {
  switch (m) {
    case RoutingMode::DTN: return "dtn";
    case RoutingMode::Hybrid: return "hybrid";
    case RoutingMode::UPN: return "upn";
  }
  return "?";
}

std::string_view to_string(ClassGroup g) { return g == ClassGroup::CUA ? "CUA" : "ES"; }

RoutingMode parse_mode(std::string_view text) {
  const auto t = lower(text);
  if (t == "dtn") return RoutingMode::DTN;
  if (t == "hybrid") return RoutingMode::Hybrid;
  if (t == "upn") return RoutingMode::UPN;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected dtn, hybrid or upn)");
}

ClassGroup parse_group(std::string_view text) {
  const auto t = lower(text);
  if (t == "cua") return ClassGroup::CUA;
  if (t == "es") return ClassGroup::ES;
  throw InputError("unknown classification group '" + std::string(text) + "' (expected CUA or ES)");
}

MobilityState parse_state(std::string_view text) {
  const auto t = lower(text);
  if (t == "home") return MobilityState::Home;
  if (t == "work") return MobilityState::Work;
  if (t == "poi") return MobilityState::Poi;
  throw InputError("unknown state '" + std::string(text) + "' (expected home, work or poi)");
}

bool is_stationary(NodeClass c) { return c == NodeClass::Poi || c == NodeClass::Destination; }

std::optional<ClassGroup> group_of(NodeClass c) {
  switch (c) {
    case NodeClass::Patient:
    case NodeClass::Caregiver:
    case NodeClass::IntermediaryUnemployed:
      return ClassGroup::CUA;
    case NodeClass::ClinicalStaff:
    case NodeClass::IntermediaryEmployed:
      return ClassGroup::ES;
    default:
      return std::nullopt;
  }
}

ConnectivityState connectivity(const NodeRecord& node, RoutingMode mode) {
  if (node.cls == NodeClass::Destination) return ConnectivityState::InternetAvailable;
  if (mode == RoutingMode::DTN || !node.internet_capable) return ConnectivityState::D2DOnly;
  return ConnectivityState::InternetAvailable;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5 + 1e-9)); }

int intermediary_count(const ScenarioConfig& c) {
  return round_half_up(c.participation_ratio * c.adult_population);
}

int employed_count(const ScenarioConfig& c) {
  return round_half_up(c.employed_ratio * intermediary_count(c));
}

int internet_flag_count(const ScenarioConfig& c) {
  return round_half_up(c.internet_ratio * (intermediary_count(c) + c.n_clinical_staff));
}

int total_node_count(const ScenarioConfig& c) {
  return c.n_patients + c.n_caregivers + c.n_clinical_staff + intermediary_count(c) + c.n_pois +
         c.n_destinations;
}

std::vector<Violation> validate_config(const ScenarioConfig& c) {
  std::vector<Violation> out;
  auto error = [&](std::string field, std::string msg) {
    out.push_back({Violation::Severity::Error, std::move(field), std::move(msg)});
  };
  auto warning = [&](std::string field, std::string msg) {
    out.push_back({Violation::Severity::Warning, std::move(field), std::move(msg)});
  };

  if (c.grid.side_cells < 1) error("grid.side_cells", "grid side must be a positive cell count");
  if (!(c.grid.cell_size_ft > 0)) error("grid.cell_size_ft", "cell size must be positive");
  if (c.step_minutes < 1) error("step_minutes", "step size must be at least one minute");
  if (c.duration_steps < 0) error("duration_steps", "duration must be non-negative");
  if (c.ttl_steps < 0) error("ttl_steps", "ttl must be non-negative");
  if (c.n_patients < 0) error("n_patients", "count must be non-negative");
  if (c.n_caregivers < 0) error("n_caregivers", "count must be non-negative");
  if (c.n_clinical_staff < 0) error("n_clinical_staff", "count must be non-negative");
  if (c.n_destinations < 1) error("n_destinations", "at least one destination is required");
  if (c.n_pois < 1) error("n_pois", "at least one point of interest is required");
  if (c.messages_per_patient < 1) error("messages_per_patient", "must be at least 1");
  if (c.adult_population < 1) error("adult_population", "must be at least 1");
  if (!(c.participation_ratio > 0 && c.participation_ratio <= 1))
    error("participation_ratio", "must lie in (0, 1]");
  if (!(c.internet_ratio >= 0 && c.internet_ratio <= 1))
    error("internet_ratio", "must lie in [0, 1]");
  if (!(c.employed_ratio >= 0 && c.employed_ratio <= 1))
    error("employed_ratio", "must lie in [0, 1]");
  if (!(c.range_mean_cells >= 1)) error("range_mean_cells", "mean radio range must be >= 1 cell");
  if (!(c.range_sd_cells >= 0)) error("range_sd_cells", "range standard deviation must be >= 0");
  if (c.poi_relays && c.n_pois < 1) error("poi_relays", "POI relays need at least one POI");

  if (has_errors(out)) return out;

  const int n_i = intermediary_count(c);
  if (n_i < 1) error("participation_ratio", "derived intermediary count |I| must be >= 1");

  const auto ordering = [&](const char* field, int lhs, const char* lhs_name, int rhs,
                            const char* rhs_name) {
    if (lhs > rhs) {
      std::ostringstream os;
      os << "population ordering violated: " << lhs_name << "=" << lhs << " > " << rhs_name << "="
         << rhs;
      error(field, os.str());
    }
  };
  ordering("n_destinations", c.n_destinations, "|D|", c.n_clinical_staff, "|S|");
  if (c.n_patients == 0) {
    warning("n_patients", "no patients: scenario generates no messages");
  } else {
    ordering("n_clinical_staff", c.n_clinical_staff, "|S|", c.n_patients, "|A|");
    ordering("n_patients", c.n_patients, "|A|", c.n_caregivers, "|C|");
  }
  ordering("n_caregivers", c.n_caregivers, "|C|", n_i, "|I|");
  if (n_i <= 2 * c.n_caregivers && n_i >= c.n_caregivers) {
    std::ostringstream os;
    os << "|I|=" << n_i << " < 2|C|=" << 2 * c.n_caregivers
       << " (intermediaries should greatly outnumber caregivers)";
    warning("participation_ratio", os.str());
  }
  return out;
}

bool has_errors(const std::vector<Violation>& violations) {
  return std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
    return v.severity == Violation::Severity::Error;
  });
}

void require_valid(const ScenarioConfig& config) {
  const auto violations = validate_config(config);
  if (!has_errors(violations)) return;
  std::ostringstream os;
  os << "invalid scenario config:";
  for (const auto& v : violations) {
    if (v.severity == Violation::Severity::Error) os << "\n  " << v.field << ": " << v.message;
  }
  throw ConfigError(os.str());
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
  return {
      {"mode", to_string(c.mode)},
      {"seed", c.seed},
      {"duration_steps", c.duration_steps},
      {"step_minutes", c.step_minutes},
      {"grid", {{"side_cells", c.grid.side_cells}, {"cell_size_ft", c.grid.cell_size_ft}}},
      {"n_patients", c.n_patients},
      {"n_caregivers", c.n_caregivers},
      {"n_clinical_staff", c.n_clinical_staff},
      {"n_destinations", c.n_destinations},
      {"n_pois", c.n_pois},
      {"participation_ratio", c.participation_ratio},
      {"internet_ratio", c.internet_ratio},
      {"employed_ratio", c.employed_ratio},
      {"adult_population", c.adult_population},
      {"range_mean_cells", c.range_mean_cells},
      {"range_sd_cells", c.range_sd_cells},
      {"caregiver_colocated", c.caregiver_colocated},
      {"messages_per_patient", c.messages_per_patient},
      {"ttl_steps", c.ttl_steps},
      {"matrix_variant", to_string(c.matrix_variant)},
      {"poi_relays", c.poi_relays},
      {"caregiver_scope", to_string(c.caregiver_scope)},
  };
}

namespace {

template <typename T>
void read_number(const nlohmann::json& value, const std::string& key, T& out) {
  if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_integer())
      throw ConfigError("config key '" + key + "' must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (value.is_number_unsigned() || value.get<std::int64_t>() >= 0) {
        out = value.get<T>();
        return;
      }
      throw ConfigError("config key '" + key + "' must be non-negative");
    } else {
      out = value.get<T>();
    }
  } else {
    if (!value.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    out = value.get<T>();
  }
}

void read_bool(const nlohmann::json& value, const std::string& key, bool& out) {
  if (!value.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
  out = value.get<bool>();
}

std::string read_string(const nlohmann::json& value, const std::string& key) {
  if (!value.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return value.get<std::string>();
}

}  // namespace

ScenarioConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario config must be a JSON object");
  ScenarioConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "mode") c.mode = parse_mode(read_string(value, key));
    else if (key == "seed") read_number(value, key, c.seed);
    else if (key == "duration_steps") read_number(value, key, c.duration_steps);
    else if (key == "step_minutes") read_number(value, key, c.step_minutes);
    else if (key == "grid") {
      if (!value.is_object()) throw ConfigError("config key 'grid' must be an object");
      for (const auto& [gkey, gvalue] : value.items()) {
        if (gkey == "side_cells") read_number(gvalue, "grid.side_cells", c.grid.side_cells);
        else if (gkey == "cell_size_ft") read_number(gvalue, "grid.cell_size_ft", c.grid.cell_size_ft);
        else throw ConfigError("unknown config key 'grid." + gkey + "'");
      }
    }
    else if (key == "n_patients") read_number(value, key, c.n_patients);
    else if (key == "n_caregivers") read_number(value, key, c.n_caregivers);
    else if (key == "n_clinical_staff") read_number(value, key, c.n_clinical_staff);
    else if (key == "n_destinations") read_number(value, key, c.n_destinations);
    else if (key == "n_pois") read_number(value, key, c.n_pois);
    else if (key == "participation_ratio") read_number(value, key, c.participation_ratio);
    else if (key == "internet_ratio") read_number(value, key, c.internet_ratio);
    else if (key == "employed_ratio") read_number(value, key, c.employed_ratio);
    else if (key == "adult_population") read_number(value, key, c.adult_population);
    else if (key == "range_mean_cells") read_number(value, key, c.range_mean_cells);
    else if (key == "range_sd_cells") read_number(value, key, c.range_sd_cells);
    else if (key == "caregiver_colocated") read_bool(value, key, c.caregiver_colocated);
    else if (key == "messages_per_patient") read_number(value, key, c.messages_per_patient);
    else if (key == "ttl_steps") read_number(value, key, c.ttl_steps);
    else if (key == "matrix_variant") {
      const auto v = read_string(value, key);
      if (v == "as_printed") c.matrix_variant = MatrixVariant::AsPrinted;
      else if (v == "corrected") c.matrix_variant = MatrixVariant::Corrected;
      else throw ConfigError("matrix_variant must be 'as_printed' or 'corrected'");
    }
    else if (key == "poi_relays") read_bool(value, key, c.poi_relays);
    else if (key == "caregiver_scope") {
      const auto v = read_string(value, key);
      if (v == "any") c.caregiver_scope = CaregiverScope::AnyMessage;
      else if (v == "own_patient") c.caregiver_scope = CaregiverScope::OwnPatient;
      else throw ConfigError("caregiver_scope must be 'any' or 'own_patient'");
    }
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

void apply_override(nlohmann::json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override '" + std::string(assignment) + "' must have the form KEY=VALUE");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));

  // Validate the path against a full default document so partial files still
  // accept overrides for keys they omit.
  const auto reference = config_to_json(ScenarioConfig{});
  const nlohmann::json::json_pointer pointer("/" + [&] {
    std::string p = key;
    std::replace(p.begin(), p.end(), '.', '/');
    return p;
  }());
  if (!reference.contains(pointer) || reference.at(pointer).is_object())
    throw ConfigError("unknown override key '" + key + "'");

  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  doc[pointer] = std::move(value);
}

}  // namespace opsim
