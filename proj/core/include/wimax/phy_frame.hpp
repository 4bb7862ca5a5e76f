#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wimax/rational.hpp"
#include "wimax/sim_kernel.hpp"
#include "wimax/types.hpp"

namespace wimax {

enum class Modulation : std::uint8_t { qam64, qam16 };

constexpr std::uint32_t bits_per_symbol(Modulation m) { return m == Modulation::qam64 ? 6 : 4; }
const char* to_string(Modulation m);
std::optional<Modulation> parse_modulation(std::string_view text);

struct PhyProfile {
  Modulation modulation = Modulation::qam64;
  Rational coding_rate{3, 4};
  /// Share of raw symbol capacity left after pilots, guards and preambles.
  Rational efficiency_factor{4, 5};
};

/// Geometry of the fixed-length TDD frame: DL subframe, TTG, UL subframe, RTG.
struct FrameConfig {
  SimTime frame_duration = SimTime::micros(12500);
  SimTime ttg = SimTime::micros(106);
  SimTime rtg = SimTime::micros(60);
  Rational dl_fraction{1, 2};
  std::uint64_t channel_bandwidth_hz = 20000000;
  PhyProfile phy;
};

/// Throws ConfigError if the frame cannot be laid out.
void validate(const FrameConfig& cfg);

/// floor(bandwidth x bits/symbol x coding x efficiency), bits per second.
std::uint64_t effective_bit_rate(const FrameConfig& cfg);

SimTime usable_duration(const FrameConfig& cfg);
SimTime dl_subframe_duration(const FrameConfig& cfg);
SimTime ul_subframe_duration(const FrameConfig& cfg);

std::uint64_t subframe_capacity_bytes(const FrameConfig& cfg, Direction direction);

/// Air time for `bytes` at the effective rate, rounded up to whole microseconds.
SimTime air_time(const FrameConfig& cfg, std::uint64_t bytes);

struct FrameBoundaries {
  SimTime frame_start;
  SimTime dl_start;
  SimTime ul_start;
  SimTime frame_end;

  SimTime dl_end(const FrameConfig& cfg) const { return ul_start - cfg.ttg; }
  SimTime ul_end(const FrameConfig& cfg) const { return frame_end - cfg.rtg; }
};

FrameBoundaries frame_boundaries(const FrameConfig& cfg, std::uint64_t frame_index);

enum class GrantKind : std::uint8_t { data_grant, unicast_poll, contention_window };
const char* to_string(GrantKind kind);

struct MapIE {
  Cid cid = 0;
  StationId ss_id = 0;
  std::uint64_t offset_bytes = 0;
  std::uint64_t grant_bytes = 0;
  GrantKind grant_kind = GrantKind::data_grant;

  std::uint64_t end() const { return offset_bytes + grant_bytes; }
};

struct UlMap {
  std::uint64_t frame_index = 0;
  std::vector<MapIE> ies;
  std::uint64_t contention_offset = 0;
  std::uint64_t contention_bytes = 0;

  std::uint64_t granted_bytes() const;
};

/// One downlink burst: consecutive packets of one connection.
struct DlBurst {
  Cid cid = 0;
  StationId ss_id = 0;
  std::uint64_t offset_bytes = 0;
  std::uint64_t bytes = 0;
  std::vector<PacketId> packet_ids;
};

struct DlSchedule {
  std::uint64_t frame_index = 0;
  std::uint64_t map_overhead_bytes = 0;
  std::vector<DlBurst> bursts;

  std::uint64_t used_bytes() const;
};

struct MapViolation {
  enum class Kind { overlap, out_of_range, over_capacity };
  Kind kind;
  std::string detail;
};

const char* to_string(MapViolation::Kind kind);

/// Returns the first violated constraint, or nullopt when the map is legal.
std::optional<MapViolation> validate_map(const UlMap& map, const FrameConfig& cfg);

} // namespace wimax
