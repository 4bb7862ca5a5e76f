#include <doctest.h>

#include "wimax/phy_frame.hpp"

using namespace wimax;

namespace {

// 8 Mb/s: QAM16 (4 bits) x 1/2 x 1 over 4 MHz, i.e. one byte per microsecond.
FrameConfig byte_per_us(std::int64_t frame_us, std::int64_t gap_us) {
  FrameConfig cfg;
  cfg.frame_duration = SimTime::micros(frame_us);
  cfg.ttg = SimTime::micros(gap_us);
  cfg.rtg = SimTime::micros(gap_us);
  cfg.channel_bandwidth_hz = 4000000;
  cfg.phy.modulation = Modulation::qam16;
  cfg.phy.coding_rate = Rational(1, 2);
  cfg.phy.efficiency_factor = Rational(1, 1);
  return cfg;
}

} // namespace

TEST_SUITE("phy_frame") {

TEST_CASE("8 Mb/s over a 5000 us uplink subframe carries 5000 bytes") {
  // usable 10000 us split in half
  const auto cfg = byte_per_us(10200, 100);
  CHECK(effective_bit_rate(cfg) == 8000000);
  CHECK(ul_subframe_duration(cfg) == SimTime::micros(5000));
  CHECK(subframe_capacity_bytes(cfg, Direction::uplink) == 5000);
}

TEST_CASE("default frame gives 55503 bytes each way") {
  // Independent hand computation: 20 MHz x 6 bits x 3/4 x 4/5 = 72 Mb/s;
  // usable 12500 - 106 - 60 = 12334 us, half is 6167 us.
  const std::uint64_t rate = 20000000ULL * 6 * 3 / 4 * 4 / 5;
  const std::uint64_t half_us = (12500 - 106 - 60) / 2;
  const std::uint64_t expected = rate * half_us / 8 / 1000000;
  CHECK(rate == 72000000);
  CHECK(expected == 55503);

  const FrameConfig cfg;
  CHECK(effective_bit_rate(cfg) == rate);
  CHECK(subframe_capacity_bytes(cfg, Direction::downlink) == expected);
  CHECK(subframe_capacity_bytes(cfg, Direction::uplink) == expected);
}

TEST_CASE("gaps of frame minus 2 us leave two 1 us subframes") {
  FrameConfig cfg;
  cfg.ttg = SimTime::micros(6000);
  cfg.rtg = SimTime::micros(12500 - 2 - 6000);
  CHECK_NOTHROW(validate(cfg));
  CHECK(dl_subframe_duration(cfg) == SimTime::micros(1));
  CHECK(ul_subframe_duration(cfg) == SimTime::micros(1));
  CHECK(subframe_capacity_bytes(cfg, Direction::uplink) == 9); // 72 bits
}

TEST_CASE("gaps filling the frame are rejected") {
  FrameConfig cfg;
  cfg.ttg = SimTime::micros(6250);
  cfg.rtg = SimTime::micros(6250);
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("frame 0 spans [0, 12500) and frame 80 starts at one second") {
  const FrameConfig cfg;
  const auto f0 = frame_boundaries(cfg, 0);
  CHECK(f0.frame_start == SimTime{});
  CHECK(f0.frame_end == SimTime::micros(12500));
  CHECK(frame_boundaries(cfg, 80).frame_start == SimTime::micros(1000000));
}

TEST_CASE("frames tile and subframes add up to the frame") {
  const FrameConfig cfg;
  for (std::uint64_t n = 0; n < 500; ++n) {
    const auto b = frame_boundaries(cfg, n);
    REQUIRE(b.frame_start < b.ul_start);
    REQUIRE(b.dl_start <= b.dl_end(cfg));
    REQUIRE(b.dl_end(cfg) < b.ul_start);
    REQUIRE(b.ul_start < b.ul_end(cfg));
    REQUIRE(b.ul_end(cfg) < b.frame_end);
    REQUIRE(b.frame_end == frame_boundaries(cfg, n + 1).frame_start);
    REQUIRE((b.dl_end(cfg) - b.dl_start) + cfg.ttg + (b.ul_end(cfg) - b.ul_start) + cfg.rtg ==
            cfg.frame_duration);
  }
}

TEST_CASE("air time rounds up to whole microseconds") {
  const FrameConfig cfg; // 9 bytes per microsecond
  CHECK(air_time(cfg, 0) == SimTime{});
  CHECK(air_time(cfg, 9) == SimTime::micros(1));
  CHECK(air_time(cfg, 10) == SimTime::micros(2));
  CHECK(air_time(cfg, 55503) <= ul_subframe_duration(cfg));
}

TEST_CASE("validate_map") {
  const auto cfg = byte_per_us(10200, 100);

  SUBCASE("empty map is legal") { CHECK_FALSE(validate_map(UlMap{}, cfg)); }

  SUBCASE("overlap at byte 100") {
    UlMap m;
    m.ies.push_back({1, 1, 0, 101, GrantKind::data_grant});
    m.ies.push_back({2, 2, 100, 50, GrantKind::data_grant});
    const auto v = validate_map(m, cfg);
    REQUIRE(v);
    CHECK(v->kind == MapViolation::Kind::overlap);
  }

  SUBCASE("grants filling capacity exactly are legal") {
    UlMap m;
    m.ies.push_back({1, 1, 0, 3000, GrantKind::data_grant});
    m.ies.push_back({2, 2, 3000, 1968, GrantKind::data_grant});
    m.contention_offset = 4968;
    m.contention_bytes = 32;
    CHECK_FALSE(validate_map(m, cfg));
  }

  SUBCASE("one byte over capacity") {
    UlMap m;
    m.ies.push_back({1, 1, 0, 5001, GrantKind::data_grant});
    const auto v = validate_map(m, cfg);
    REQUIRE(v);
    CHECK(v->kind != MapViolation::Kind::overlap);
  }

  SUBCASE("contention region overlapping a grant") {
    UlMap m;
    m.ies.push_back({1, 1, 0, 100, GrantKind::data_grant});
    m.contention_offset = 50;
    m.contention_bytes = 16;
    const auto v = validate_map(m, cfg);
    REQUIRE(v);
    CHECK(v->kind == MapViolation::Kind::overlap);
  }
}

}
