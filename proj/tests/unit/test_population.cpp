#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "opsim/population.hpp"
#include "oracles.hpp"

using namespace opsim;

namespace {

std::vector<NodeRecord> build(const ScenarioConfig& c) {
  StreamSet streams(c.seed);
  return build_population(c, streams);
}

}  // namespace

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(5, StreamId::Mobility), b(5, StreamId::Mobility), c(5, StreamId::Flags), d(6, StreamId::Mobility);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  RngStream e(5, StreamId::Mobility);
  CHECK(e.uniform() != c.uniform());
  RngStream f(5, StreamId::Mobility);
  CHECK(f.uniform() != d.uniform());
}

TEST_CASE("index draw is floor(u * n)") {
  RngStream a(11, StreamId::PoiChoice), b(11, StreamId::PoiChoice);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(b.index(25) == static_cast<std::size_t>(std::floor(u * 25)));
  }
}

TEST_CASE("class counts match derived cardinalities") {
  oracle::Gen gen(101);
  for (int trial = 0; trial < 40; ++trial) {
    ScenarioConfig c;
    c.seed = gen.raw();
    c.n_patients = gen.integer(0, 12);
    c.n_caregivers = std::max(c.n_patients, gen.integer(0, 15));
    c.n_clinical_staff = gen.integer(std::min(c.n_patients, 3), std::min(c.n_patients, 3) + 2);
    c.n_destinations = gen.integer(1, std::max(1, c.n_clinical_staff));
    c.n_pois = gen.integer(1, 40);
    c.participation_ratio = gen.real(0.1, 1.0);
    c.internet_ratio = gen.real(0.0, 1.0);
    c.employed_ratio = gen.real(0.0, 1.0);
    if (has_errors(validate_config(c))) continue;
    const auto nodes = build(c);
    CAPTURE(trial);
    REQUIRE(nodes.size() == static_cast<std::size_t>(total_node_count(c)));

    std::map<NodeClass, int> count;
    int flagged = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      CHECK(n.id == i);
      ++count[n.cls];
      if (n.cls == NodeClass::Destination) CHECK(n.internet_capable);
      else if (n.internet_capable) {
        CHECK((n.cls == NodeClass::ClinicalStaff || n.cls == NodeClass::IntermediaryEmployed ||
               n.cls == NodeClass::IntermediaryUnemployed));
        ++flagged;
      }
      CHECK(n.radio_range_cells >= 1.0);
      CHECK(c.grid.contains(n.home_cell));
    }
    const int n_i = static_cast<int>(std::floor(c.participation_ratio * c.adult_population + 0.5));
    const int n_e = static_cast<int>(std::floor(c.employed_ratio * n_i + 0.5));
    CHECK(count[NodeClass::Patient] == c.n_patients);
    CHECK(count[NodeClass::Caregiver] == c.n_caregivers);
    CHECK(count[NodeClass::ClinicalStaff] == c.n_clinical_staff);
    CHECK(count[NodeClass::Destination] == c.n_destinations);
    CHECK(count[NodeClass::Poi] == c.n_pois);
    CHECK(count[NodeClass::IntermediaryEmployed] == n_e);
    CHECK(count[NodeClass::IntermediaryUnemployed] == n_i - n_e);
    CHECK(flagged == internet_flag_count(c));
  }
}

TEST_CASE("population is deterministic per seed") {
  ScenarioConfig c;
  c.seed = 42;
  CHECK(build(c) == build(c));
  ScenarioConfig d = c;
  d.seed = 43;
  CHECK_FALSE(build(c) == build(d));
}

TEST_CASE("work assignments and stationary placement") {
  ScenarioConfig c;
  c.seed = 9;
  const auto nodes = build(c);
  const auto pois = poi_cells(nodes);
  REQUIRE(pois.size() == 25);
  std::vector<Cell> stationary;
  std::vector<Cell> dests;
  for (const auto& n : nodes) {
    if (n.cls == NodeClass::Destination || n.cls == NodeClass::Poi) stationary.push_back(n.home_cell);
    if (n.cls == NodeClass::Destination) dests.push_back(n.home_cell);
  }
  std::sort(stationary.begin(), stationary.end());
  CHECK(std::adjacent_find(stationary.begin(), stationary.end()) == stationary.end());
  for (const auto& n : nodes) {
    if (n.cls == NodeClass::IntermediaryEmployed) {
      REQUIRE(n.work_cell);
      CHECK(std::find(pois.begin(), pois.end(), *n.work_cell) != pois.end());
    } else if (n.cls == NodeClass::ClinicalStaff) {
      REQUIRE(n.work_cell);
      CHECK(std::find(dests.begin(), dests.end(), *n.work_cell) != dests.end());
    } else {
      CHECK_FALSE(n.work_cell);
    }
  }
}

TEST_CASE("caregivers share their patient's home when colocated") {
  ScenarioConfig c;
  c.seed = 3;
  auto nodes = build(c);
  int caregivers = 0;
  for (const auto& n : nodes) {
    if (n.cls != NodeClass::Caregiver) continue;
    ++caregivers;
    REQUIRE(n.linked_patient);
    CHECK(nodes[*n.linked_patient].cls == NodeClass::Patient);
    CHECK(n.home_cell == nodes[*n.linked_patient].home_cell);
  }
  CHECK(caregivers == 10);

  c.caregiver_colocated = false;
  nodes = build(c);
  int shared = 0;
  for (const auto& n : nodes) {
    if (n.cls == NodeClass::Caregiver && n.home_cell == nodes[*n.linked_patient].home_cell) ++shared;
  }
  CHECK(shared < 10);
}

TEST_CASE("flag count for 120 intermediaries at r = 0.2") {
  ScenarioConfig c;
  CHECK(intermediary_count(c) == 120);
  const auto nodes = build(c);
  const auto flagged = std::count_if(nodes.begin(), nodes.end(), [](const NodeRecord& n) {
    return n.internet_capable && n.cls != NodeClass::Destination;
  });
  CHECK(flagged == 24);
}

TEST_CASE("radio ranges follow N(60, 20) truncated at 1") {
  RngStream s(77, StreamId::Ranges);
  const int n = 10000;
  int inside = 0;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double r = sample_radio_range(60, 20, s);
    CHECK(r >= 1.0);
    sum += r;
    if (r >= 40 && r <= 80) ++inside;
  }
  // One-sigma mass of a normal is 0.6827; 4 binomial sd at n = 1e4 is ~0.019.
  CHECK(std::abs(inside / double(n) - 0.6827) < 0.02);
  CHECK(std::abs(sum / n - 60.0) < 0.02 * 60.0);
}

TEST_CASE("grid too small for stationary nodes is rejected") {
  ScenarioConfig c;
  c.grid.side_cells = 4;  // 16 cells for 26 stationary nodes
  StreamSet streams(0);
  CHECK_THROWS_AS(build_population(c, streams), ConfigError);
}
