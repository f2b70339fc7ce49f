// Named, independent random streams derived from one master seed.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace opsim {

enum class StreamId : std::uint32_t {
  Placement = 1,
  Ranges = 2,
  Flags = 3,
  Mobility = 4,
  PeriodStart = 5,
  PoiChoice = 6,
  Roles = 7,
};

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamId id);

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // floor(uniform() * n); n must be positive.
  std::size_t index(std::size_t n);
  double normal(double mean, double sd);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

struct StreamSet {
  explicit StreamSet(std::uint64_t master_seed)
      : placement(master_seed, StreamId::Placement),
        ranges(master_seed, StreamId::Ranges),
        flags(master_seed, StreamId::Flags),
        mobility(master_seed, StreamId::Mobility),
        period_start(master_seed, StreamId::PeriodStart),
        poi_choice(master_seed, StreamId::PoiChoice),
        roles(master_seed, StreamId::Roles) {}

  RngStream placement;
  RngStream ranges;
  RngStream flags;
  RngStream mobility;
  RngStream period_start;
  RngStream poi_choice;
  RngStream roles;
};

}  // namespace opsim
