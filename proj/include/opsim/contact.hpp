// D2D contact detection under a circular-range model.
#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "opsim/core.hpp"

namespace opsim {

struct ContactEvent {
  int step = 0;
  NodeId node_a = 0;  // always < node_b
  NodeId node_b = 0;
  bool operator==(const ContactEvent&) const = default;
  bool involves(NodeId n) const { return node_a == n || node_b == n; }
  NodeId other(NodeId n) const { return node_a == n ? node_b : node_a; }
};

// Both radios must reach: distance between cell centers <= min(range_a, range_b).
bool in_contact(Cell a, Cell b, double range_a, double range_b);

struct RadioPosition {
  NodeId id;
  Cell cell;
  double range;
};

// Grid-bucketed all-pairs search. Output is sorted by (node_a, node_b).
std::vector<ContactEvent> find_contacts(std::span<const RadioPosition> radios, int step);

// Contacts among placed nodes. POIs are pure locations and are skipped unless
// include_pois is set.
std::vector<ContactEvent> contacts_at_step(std::span<const NodeRecord> nodes, int step,
                                           bool include_pois = false);

void write_contacts_csv(std::ostream& out, std::span<const std::vector<ContactEvent>> per_step);

}  // namespace opsim
