#pragma once

#include <span>
#include <vector>

#include "opsim/core.hpp"
#include "opsim/rng.hpp"

namespace opsim {

// Draws one radio range from N(mean, sd) truncated below at one cell.
double sample_radio_range(double mean, double sd, RngStream& stream);

// Builds the node list for one run. Ids are dense and assigned in class order:
// destinations, POIs, clinical staff, patients, caregivers, employed then
// unemployed intermediaries. Stationary nodes occupy distinct cells.
std::vector<NodeRecord> build_population(const ScenarioConfig& config, StreamSet& streams);

// Cells of the POI nodes, indexed in id order.
std::vector<Cell> poi_cells(std::span<const NodeRecord> nodes);

}  // namespace opsim
