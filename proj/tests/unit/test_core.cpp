#include <doctest.h>

#include <algorithm>

#include "opsim/core.hpp"

using namespace opsim;

namespace {

bool has_message(const std::vector<Violation>& vs, Violation::Severity sev, const std::string& needle) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) {
    return v.severity == sev && v.message.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("default scenario validates cleanly") {
  const auto vs = validate_config(ScenarioConfig{});
  CHECK_FALSE(has_errors(vs));
  CHECK(intermediary_count(ScenarioConfig{}) == 120);
}

TEST_CASE("destination count above staff count is an ordering error") {
  ScenarioConfig c;
  c.n_destinations = 2;
  c.n_clinical_staff = 1;
  const auto vs = validate_config(c);
  CHECK(has_errors(vs));
  CHECK(has_message(vs, Violation::Severity::Error, "ordering violated"));
  CHECK_THROWS_AS(require_valid(c), ConfigError);
}

TEST_CASE("small intermediary pool only warns") {
  ScenarioConfig c;
  c.participation_ratio = 0.05;
  const auto vs = validate_config(c);
  CHECK_FALSE(has_errors(vs));
  const int n_i = static_cast<int>(0.05 * 400 + 0.5);
  CHECK(intermediary_count(c) == n_i);
  CHECK(has_message(vs, Violation::Severity::Warning, "|I|=" + std::to_string(n_i)));
}

TEST_CASE("negative grid names the field") {
  ScenarioConfig c;
  c.grid.side_cells = -3;
  const auto vs = validate_config(c);
  REQUIRE(has_errors(vs));
  CHECK(std::any_of(vs.begin(), vs.end(), [](const Violation& v) { return v.field == "grid.side_cells"; }));
}

TEST_CASE("zero patients is accepted with a warning") {
  ScenarioConfig c;
  c.n_patients = 0;
  c.n_caregivers = 0;
  CHECK_FALSE(has_errors(validate_config(c)));
}

TEST_CASE("internet flag count rounds half up") {
  ScenarioConfig c;
  CHECK(internet_flag_count(c) == 24);  // 0.2 x (120 + 2) = 24.4
  c.participation_ratio = 0.3;
  c.internet_ratio = 0.5;
  c.n_clinical_staff = 1;
  CHECK(internet_flag_count(c) == 61);  // 0.5 x 121 = 60.5
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(2.4999) == 2);
}

TEST_CASE("connectivity by mode") {
  NodeRecord dest;
  dest.cls = NodeClass::Destination;
  dest.internet_capable = true;
  NodeRecord relay;
  relay.cls = NodeClass::IntermediaryEmployed;
  relay.internet_capable = true;
  CHECK(connectivity(dest, RoutingMode::DTN) == ConnectivityState::InternetAvailable);
  CHECK(connectivity(relay, RoutingMode::DTN) == ConnectivityState::D2DOnly);
  CHECK(connectivity(relay, RoutingMode::Hybrid) == ConnectivityState::InternetAvailable);
  CHECK(connectivity(relay, RoutingMode::UPN) == ConnectivityState::InternetAvailable);
  relay.internet_capable = false;
  CHECK(connectivity(relay, RoutingMode::Hybrid) == ConnectivityState::D2DOnly);
}

TEST_CASE("config JSON round trip and strictness") {
  ScenarioConfig c;
  c.mode = RoutingMode::UPN;
  c.seed = 17;
  c.grid.side_cells = 300;
  c.caregiver_scope = CaregiverScope::OwnPatient;
  c.matrix_variant = MatrixVariant::Corrected;
  CHECK(config_from_json(config_to_json(c)) == c);

  auto doc = config_to_json(c);
  doc["bogus"] = 1;
  CHECK_THROWS_AS(config_from_json(doc), ConfigError);

  CHECK(config_from_json(nlohmann::json::object()) == ScenarioConfig{});
  CHECK_THROWS(config_from_json({{"n_patients", "ten"}}));
}

TEST_CASE("overrides use dotted keys and reject unknown ones") {
  auto doc = config_to_json(ScenarioConfig{});
  apply_override(doc, "grid.side_cells=100");
  apply_override(doc, "mode=dtn");
  apply_override(doc, "participation_ratio=0.5");
  const auto c = config_from_json(doc);
  CHECK(c.grid.side_cells == 100);
  CHECK(c.mode == RoutingMode::DTN);
  CHECK(c.participation_ratio == 0.5);
  CHECK_THROWS_AS(apply_override(doc, "grid.depth=3"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
}

TEST_CASE("mode parsing is case-insensitive") {
  CHECK(parse_mode("DTN") == RoutingMode::DTN);
  CHECK(parse_mode("Hybrid") == RoutingMode::Hybrid);
  CHECK(parse_mode("upn") == RoutingMode::UPN);
  CHECK_THROWS(parse_mode("mesh"));
}
