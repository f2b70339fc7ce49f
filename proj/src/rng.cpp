#include "opsim/rng.hpp"

#include <algorithm>

namespace opsim {

RngStream::RngStream(std::uint64_t master_seed, StreamId id) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(id), 0x6f70736du};
  engine_.seed(seq);
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t RngStream::index(std::size_t n) {
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

double RngStream::normal(double mean, double sd) {
  return normal_(engine_, std::normal_distribution<double>::param_type(mean, sd));
}

}  // namespace opsim
