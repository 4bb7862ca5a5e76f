#include "wimax/phy_frame.hpp"

#include <algorithm>
#include <numeric>

namespace wimax {

const char* to_string(Modulation m) { return m == Modulation::qam64 ? "qam64" : "qam16"; }

std::optional<Modulation> parse_modulation(std::string_view text) {
  if (text == "qam64" || text == "64qam" || text == "QAM64") return Modulation::qam64;
  if (text == "qam16" || text == "16qam" || text == "QAM16") return Modulation::qam16;
  return std::nullopt;
}

void validate(const FrameConfig& cfg) {
  if (cfg.frame_duration <= SimTime{}) {
    throw ConfigError("frame_duration must be positive");
  }
  if (cfg.ttg < SimTime{} || cfg.rtg < SimTime{}) {
    throw ConfigError("ttg and rtg must be non-negative");
  }
  if (cfg.ttg + cfg.rtg >= cfg.frame_duration) {
    throw ConfigError("ttg + rtg must be shorter than the frame (" + to_string(cfg.ttg + cfg.rtg) +
                      " >= " + to_string(cfg.frame_duration) + ")");
  }
  if (cfg.dl_fraction <= Rational(0) || cfg.dl_fraction >= Rational(1)) {
    throw ConfigError("dl_fraction must lie strictly between 0 and 1, got " + cfg.dl_fraction.str());
  }
  if (cfg.channel_bandwidth_hz == 0) {
    throw ConfigError("channel_bandwidth_hz must be positive");
  }
  if (cfg.phy.coding_rate <= Rational(0) || cfg.phy.coding_rate > Rational(1)) {
    throw ConfigError("coding_rate must lie in (0, 1]");
  }
  if (cfg.phy.efficiency_factor <= Rational(0) || cfg.phy.efficiency_factor > Rational(1)) {
    throw ConfigError("efficiency_factor must lie in (0, 1]");
  }
  if (dl_subframe_duration(cfg) < SimTime::micros(1) || ul_subframe_duration(cfg) < SimTime::micros(1)) {
    throw ConfigError("both subframes must last at least 1us");
  }
  if (effective_bit_rate(cfg) == 0) {
    throw ConfigError("effective bit rate rounds down to zero");
  }
}

std::uint64_t effective_bit_rate(const FrameConfig& cfg) {
  const Rational factor = cfg.phy.coding_rate * cfg.phy.efficiency_factor *
                          Rational(static_cast<std::int64_t>(bits_per_symbol(cfg.phy.modulation)));
  return static_cast<std::uint64_t>(factor.floor_mul(static_cast<std::int64_t>(cfg.channel_bandwidth_hz)));
}

SimTime usable_duration(const FrameConfig& cfg) { return cfg.frame_duration - cfg.ttg - cfg.rtg; }

SimTime dl_subframe_duration(const FrameConfig& cfg) {
  return SimTime::micros(cfg.dl_fraction.floor_mul(usable_duration(cfg).us()));
}

SimTime ul_subframe_duration(const FrameConfig& cfg) { return usable_duration(cfg) - dl_subframe_duration(cfg); }

std::uint64_t subframe_capacity_bytes(const FrameConfig& cfg, Direction direction) {
  const SimTime d = direction == Direction::downlink ? dl_subframe_duration(cfg) : ul_subframe_duration(cfg);
  const auto bits = static_cast<unsigned __int128>(effective_bit_rate(cfg)) * static_cast<std::uint64_t>(d.us());
  return static_cast<std::uint64_t>(bits / 8000000u);
}

SimTime air_time(const FrameConfig& cfg, std::uint64_t bytes) {
  const auto num = static_cast<unsigned __int128>(bytes) * 8000000u;
  const std::uint64_t rate = effective_bit_rate(cfg);
  return SimTime::micros(static_cast<std::int64_t>((num + rate - 1) / rate));
}

FrameBoundaries frame_boundaries(const FrameConfig& cfg, std::uint64_t frame_index) {
  FrameBoundaries b;
  b.frame_start = cfg.frame_duration * static_cast<std::int64_t>(frame_index);
  b.dl_start = b.frame_start;
  b.ul_start = b.dl_start + dl_subframe_duration(cfg) + cfg.ttg;
  b.frame_end = b.frame_start + cfg.frame_duration;
  return b;
}

const char* to_string(GrantKind kind) {
  switch (kind) {
  case GrantKind::data_grant: return "data-grant";
  case GrantKind::unicast_poll: return "unicast-poll";
  case GrantKind::contention_window: return "contention-window";
  }
  return "unknown";
}

std::uint64_t UlMap::granted_bytes() const {
  return std::accumulate(ies.begin(), ies.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const MapIE& ie) { return acc + ie.grant_bytes; });
}

std::uint64_t DlSchedule::used_bytes() const {
  return std::accumulate(bursts.begin(), bursts.end(), map_overhead_bytes,
                         [](std::uint64_t acc, const DlBurst& b) { return acc + b.bytes; });
}

const char* to_string(MapViolation::Kind kind) {
  switch (kind) {
  case MapViolation::Kind::overlap: return "overlap";
  case MapViolation::Kind::out_of_range: return "out-of-range";
  case MapViolation::Kind::over_capacity: return "over-capacity";
  }
  return "unknown";
}

std::optional<MapViolation> validate_map(const UlMap& map, const FrameConfig& cfg) {
  struct Range {
    std::uint64_t begin;
    std::uint64_t end;
    std::size_t index; // ies.size() stands for the contention region
  };
  std::vector<Range> ranges;
  ranges.reserve(map.ies.size() + 1);
  for (std::size_t i = 0; i < map.ies.size(); ++i) {
    if (map.ies[i].grant_bytes > 0) {
      ranges.push_back({map.ies[i].offset_bytes, map.ies[i].end(), i});
    }
  }
  if (map.contention_bytes > 0) {
    ranges.push_back({map.contention_offset, map.contention_offset + map.contention_bytes, map.ies.size()});
  }
  auto name = [&](std::size_t index) {
    return index == map.ies.size() ? std::string("contention region") : "IE #" + std::to_string(index);
  };

  std::sort(ranges.begin(), ranges.end(), [](const Range& a, const Range& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.index < b.index;
  });
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].begin < ranges[i - 1].end) {
      return MapViolation{MapViolation::Kind::overlap,
                          name(ranges[i - 1].index) + " and " + name(ranges[i].index) + " overlap at byte " +
                              std::to_string(ranges[i].begin)};
    }
  }

  const std::uint64_t capacity = subframe_capacity_bytes(cfg, Direction::uplink);
  for (const auto& r : ranges) {
    if (r.end > capacity) {
      return MapViolation{MapViolation::Kind::out_of_range,
                          name(r.index) + " ends at byte " + std::to_string(r.end) + " beyond capacity " +
                              std::to_string(capacity)};
    }
  }

  const std::uint64_t total = map.granted_bytes() + map.contention_bytes;
  if (total > capacity) {
    return MapViolation{MapViolation::Kind::over_capacity,
                        "map allocates " + std::to_string(total) + " bytes, capacity " + std::to_string(capacity)};
  }
  return std::nullopt;
}

} // namespace wimax
