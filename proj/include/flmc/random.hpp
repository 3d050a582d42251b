#pragma once

#include <cstdint>
#include <random>

namespace flmc {

/// Named substreams derived from one master seed.
enum class StreamId : std::uint32_t {
  data = 1,
  init = 2,
  quantizer = 3,
  channel_noise = 4,
  privacy_mc = 5,
};

/// A seeded random stream. Substreams of one experiment are keyed by
/// (master seed, replication index, stream id) and are statistically
/// independent of each other.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  RandomStream(std::uint64_t master_seed, std::uint64_t replication, StreamId id) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(replication),
                      static_cast<std::uint32_t>(replication >> 32),
                      static_cast<std::uint32_t>(id)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 bits of resolution; consumes exactly one engine draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal draw.
  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace flmc
