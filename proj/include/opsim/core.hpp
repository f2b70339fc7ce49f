// Domain types and scenario configuration shared by every simulator module.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace opsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NodeId = std::uint32_t;

enum class NodeClass : std::uint8_t {
  Patient,
  Caregiver,
  ClinicalStaff,
  IntermediaryEmployed,
  IntermediaryUnemployed,
  Poi,
  Destination,
};

enum class ConnectivityState : std::uint8_t { InternetAvailable, D2DOnly };

// Home/Work/Poi double as row indices into transition matrices.
enum class MobilityState : std::uint8_t { Home = 0, Work = 1, Poi = 2, Stationary = 3 };

enum class RoutingMode : std::uint8_t { DTN, Hybrid, UPN };

// Mobility classification group. {C,U,A} never work; {E,S} commute.
enum class ClassGroup : std::uint8_t { CUA, ES };

enum class CaregiverScope : std::uint8_t { AnyMessage, OwnPatient };

enum class MatrixVariant : std::uint8_t { AsPrinted, Corrected };

std::string_view to_string(NodeClass c);
std::string_view to_string(MobilityState s);
std::string_view to_string(RoutingMode m);
std::string_view to_string(ClassGroup g);

RoutingMode parse_mode(std::string_view text);
ClassGroup parse_group(std::string_view text);
MobilityState parse_state(std::string_view text);

bool is_stationary(NodeClass c);
std::optional<ClassGroup> group_of(NodeClass c);

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

struct GridSpec {
  int side_cells = 820;
  double cell_size_ft = 10.0;

  bool contains(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < side_cells && c.y < side_cells;
  }
  bool operator==(const GridSpec&) const = default;
};

struct NodeRecord {
  NodeId id = 0;
  NodeClass cls = NodeClass::IntermediaryUnemployed;
  Cell home_cell;
  std::optional<Cell> work_cell;
  bool internet_capable = false;
  double radio_range_cells = 1.0;
  MobilityState current_state = MobilityState::Home;
  Cell current_cell;
  std::optional<NodeId> linked_patient;
  // Index into the POI list while current_state == Poi.
  std::optional<std::size_t> current_poi;

  bool operator==(const NodeRecord&) const = default;
};

// Connectivity seen by the routing layer. DTN hides every Internet flag except
// the destination's, whose receipt always counts as delivery.
ConnectivityState connectivity(const NodeRecord& node, RoutingMode mode);

struct ScenarioConfig {
  RoutingMode mode = RoutingMode::Hybrid;
  std::uint64_t seed = 0;
  int duration_steps = 48;
  int step_minutes = 30;
  GridSpec grid;
  int n_patients = 10;
  int n_caregivers = 10;
  int n_clinical_staff = 2;
  int n_destinations = 1;
  int n_pois = 25;
  double participation_ratio = 0.3;
  double internet_ratio = 0.2;
  double employed_ratio = 0.935;
  int adult_population = 400;
  double range_mean_cells = 60.0;
  double range_sd_cells = 20.0;
  bool caregiver_colocated = true;
  int messages_per_patient = 1;
  // Routing and model extensions.
  int ttl_steps = 48;
  MatrixVariant matrix_variant = MatrixVariant::AsPrinted;
  bool poi_relays = false;
  CaregiverScope caregiver_scope = CaregiverScope::AnyMessage;

  bool operator==(const ScenarioConfig&) const = default;
};

// floor(x + 0.5), with a small guard against representation error at .5.
int round_half_up(double x);

int intermediary_count(const ScenarioConfig& c);
int employed_count(const ScenarioConfig& c);
int internet_flag_count(const ScenarioConfig& c);
int total_node_count(const ScenarioConfig& c);

struct Violation {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string field;
  std::string message;
};

std::vector<Violation> validate_config(const ScenarioConfig& config);
bool has_errors(const std::vector<Violation>& violations);

// Throws ConfigError listing every error-severity violation.
void require_valid(const ScenarioConfig& config);

nlohmann::json config_to_json(const ScenarioConfig& config);
// Missing keys keep their defaults; unknown keys and wrong types are rejected.
ScenarioConfig config_from_json(const nlohmann::json& doc);

// Applies a dotted "key=value" override (e.g. grid.side_cells=100) to a config
// document. The value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

}  // namespace opsim
