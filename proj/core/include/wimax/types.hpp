#pragma once

#include <cstdint>
#include <stdexcept>

namespace wimax {

using Cid = std::uint16_t;
using Sfid = std::uint32_t;
using PacketId = std::uint64_t;

/// Station index: 0 is the base station, 1..N are subscriber stations.
using StationId = std::uint16_t;
inline constexpr StationId kBaseStation = 0;

enum class Direction : std::uint8_t { downlink, uplink };

inline const char* to_string(Direction d) { return d == Direction::downlink ? "downlink" : "uplink"; }

/// Scenario or configuration problem detected before (or instead of) running.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A runtime invariant failed while simulating: a bug, not bad input.
class InvariantViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace wimax
