#include "opsim/population.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace opsim {

namespace {

Cell random_cell(const GridSpec& grid, RngStream& stream) {
  const auto side = static_cast<std::size_t>(grid.side_cells);
  const int x = static_cast<int>(stream.index(side));
  const int y = static_cast<int>(stream.index(side));
  return {x, y};
}

std::vector<Cell> distinct_cells(const GridSpec& grid, std::size_t count, RngStream& stream) {
  const auto side = static_cast<std::size_t>(grid.side_cells);
  const std::size_t total = side * side;
  if (count > total) {
    throw ConfigError("grid of " + std::to_string(total) + " cells is too small to place " +
                      std::to_string(count) + " stationary nodes in distinct cells");
  }
  std::vector<Cell> out;
  out.reserve(count);
  if (count * 2 <= total) {
    std::set<Cell> used;
    while (out.size() < count) {
      const Cell c = random_cell(grid, stream);
      if (used.insert(c).second) out.push_back(c);
    }
    return out;
  }
  // Dense case: partial Fisher-Yates over every cell index.
  std::vector<std::size_t> cells(total);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + stream.index(total - i);
    std::swap(cells[i], cells[j]);
    out.push_back({static_cast<int>(cells[i] % side), static_cast<int>(cells[i] / side)});
  }
  return out;
}

}  // namespace

double sample_radio_range(double mean, double sd, RngStream& stream) {
  for (;;) {
    const double r = stream.normal(mean, sd);
    if (r >= 1.0) return r;
  }
}

std::vector<NodeRecord> build_population(const ScenarioConfig& config, StreamSet& streams) {
  require_valid(config);

  const auto n_dest = static_cast<std::size_t>(config.n_destinations);
  const auto n_poi = static_cast<std::size_t>(config.n_pois);
  const int n_int = intermediary_count(config);
  const int n_emp = employed_count(config);

  const auto stationary = distinct_cells(config.grid, n_dest + n_poi, streams.placement);

  std::vector<NodeRecord> nodes;
  nodes.reserve(static_cast<std::size_t>(total_node_count(config)));
  auto add = [&](NodeClass cls) -> NodeRecord& {
    NodeRecord& n = nodes.emplace_back();
    n.id = static_cast<NodeId>(nodes.size() - 1);
    n.cls = cls;
    return n;
  };

  for (std::size_t i = 0; i < n_dest + n_poi; ++i) {
    NodeRecord& n = add(i < n_dest ? NodeClass::Destination : NodeClass::Poi);
    n.home_cell = stationary[i];
    n.current_cell = stationary[i];
    n.current_state = MobilityState::Stationary;
    n.internet_capable = n.cls == NodeClass::Destination;
  }

  for (int i = 0; i < config.n_clinical_staff; ++i) {
    NodeRecord& n = add(NodeClass::ClinicalStaff);
    n.home_cell = random_cell(config.grid, streams.placement);
    n.work_cell = stationary[static_cast<std::size_t>(i) % n_dest];
  }

  const auto first_patient = static_cast<NodeId>(nodes.size());
  for (int i = 0; i < config.n_patients; ++i) {
    add(NodeClass::Patient).home_cell = random_cell(config.grid, streams.placement);
  }

  for (int i = 0; i < config.n_caregivers; ++i) {
    NodeRecord& n = add(NodeClass::Caregiver);
    if (config.n_patients > 0) {
      n.linked_patient = first_patient + static_cast<NodeId>(i % config.n_patients);
    }
    if (config.caregiver_colocated && n.linked_patient) {
      n.home_cell = nodes[*n.linked_patient].home_cell;
    } else {
      n.home_cell = random_cell(config.grid, streams.placement);
    }
  }

  for (int i = 0; i < n_int; ++i) {
    NodeRecord& n =
        add(i < n_emp ? NodeClass::IntermediaryEmployed : NodeClass::IntermediaryUnemployed);
    n.home_cell = random_cell(config.grid, streams.placement);
    if (n.cls == NodeClass::IntermediaryEmployed) {
      n.work_cell = stationary[n_dest + streams.roles.index(n_poi)];
    }
  }

  for (auto& n : nodes) {
    if (!is_stationary(n.cls)) {
      n.current_cell = n.home_cell;
      n.current_state = MobilityState::Home;
    }
  }

  // Exactly round(r * (|I| + |S|)) Internet-capable nodes, chosen uniformly.
  std::vector<NodeId> eligible;
  for (const auto& n : nodes) {
    if (n.cls == NodeClass::ClinicalStaff || n.cls == NodeClass::IntermediaryEmployed ||
        n.cls == NodeClass::IntermediaryUnemployed) {
      eligible.push_back(n.id);
    }
  }
  const auto flagged = std::min(eligible.size(), static_cast<std::size_t>(internet_flag_count(config)));
  for (std::size_t i = 0; i < flagged; ++i) {
    const std::size_t j = i + streams.flags.index(eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
    nodes[eligible[i]].internet_capable = true;
  }

  for (auto& n : nodes) {
    n.radio_range_cells =
        sample_radio_range(config.range_mean_cells, config.range_sd_cells, streams.ranges);
  }
  return nodes;
}

std::vector<Cell> poi_cells(std::span<const NodeRecord> nodes) {
  std::vector<Cell> out;
  for (const auto& n : nodes) {
    if (n.cls == NodeClass::Poi) out.push_back(n.home_cell);
  }
  return out;
}

}  // namespace opsim
