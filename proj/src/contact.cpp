#include "opsim/contact.hpp"

#include <algorithm>
#include <cmath>

namespace opsim {

bool in_contact(Cell a, Cell b, double range_a, double range_b) {
  const double dx = static_cast<double>(a.x) - b.x;
  const double dy = static_cast<double>(a.y) - b.y;
  const double r = std::min(range_a, range_b);
  return dx * dx + dy * dy <= r * r;
}

std::vector<ContactEvent> find_contacts(std::span<const RadioPosition> radios, int step) {
  std::vector<ContactEvent> out;
  if (radios.size() < 2) return out;

  int min_x = radios[0].cell.x, max_x = min_x, min_y = radios[0].cell.y, max_y = min_y;
  double max_range = 0;
  for (const auto& r : radios) {
    min_x = std::min(min_x, r.cell.x);
    max_x = std::max(max_x, r.cell.x);
    min_y = std::min(min_y, r.cell.y);
    max_y = std::max(max_y, r.cell.y);
    max_range = std::max(max_range, r.range);
  }

  // A pair can only connect within max_range, so buckets of that width need
  // just the 3x3 neighbourhood.
  const int bucket = std::max(1, static_cast<int>(std::ceil(max_range)));
  const int cols = (max_x - min_x) / bucket + 1;
  const int rows = (max_y - min_y) / bucket + 1;
  std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(cols) * rows);
  auto bucket_of = [&](Cell c) {
    return std::pair{(c.x - min_x) / bucket, (c.y - min_y) / bucket};
  };
  for (std::size_t i = 0; i < radios.size(); ++i) {
    const auto [bx, by] = bucket_of(radios[i].cell);
    buckets[static_cast<std::size_t>(by) * cols + bx].push_back(i);
  }

  for (std::size_t i = 0; i < radios.size(); ++i) {
    const auto& a = radios[i];
    const auto [bx, by] = bucket_of(a.cell);
    for (int ny = std::max(0, by - 1); ny <= std::min(rows - 1, by + 1); ++ny) {
      for (int nx = std::max(0, bx - 1); nx <= std::min(cols - 1, bx + 1); ++nx) {
        for (std::size_t j : buckets[static_cast<std::size_t>(ny) * cols + nx]) {
          if (j <= i) continue;
          const auto& b = radios[j];
          if (a.id == b.id || !in_contact(a.cell, b.cell, a.range, b.range)) continue;
          out.push_back({step, std::min(a.id, b.id), std::max(a.id, b.id)});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ContactEvent& l, const ContactEvent& r) {
    return std::pair{l.node_a, l.node_b} < std::pair{r.node_a, r.node_b};
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ContactEvent> contacts_at_step(std::span<const NodeRecord> nodes, int step,
                                           bool include_pois) {
  std::vector<RadioPosition> radios;
  radios.reserve(nodes.size());
  for (const auto& n : nodes) {
    if (n.cls == NodeClass::Poi && !include_pois) continue;
    radios.push_back({n.id, n.current_cell, n.radio_range_cells});
  }
  return find_contacts(radios, step);
}

void write_contacts_csv(std::ostream& out, std::span<const std::vector<ContactEvent>> per_step) {
  out << "step,node_a,node_b\n";
  for (const auto& events : per_step) {
    for (const auto& e : events) out << e.step << ',' << e.node_a << ',' << e.node_b << '\n';
  }
}

}  // namespace opsim
