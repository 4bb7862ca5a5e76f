#include <doctest.h>

#include <set>

#include "wimax/service_flow.hpp"

using namespace wimax;

namespace {

ServiceFlow flow_of(SchedulingClass cls, Sfid sfid) {
  ServiceFlow f;
  f.sfid = sfid;
  f.cls = cls;
  if (cls == SchedulingClass::ugs || cls == SchedulingClass::ertps) {
    f.min_reserved_rate_bps = 64000;
    f.max_sustained_rate_bps = 64000;
  }
  return f;
}

MacSdu sdu(PacketId id, std::uint32_t size) {
  MacSdu s;
  s.id = id;
  s.size_bytes = size;
  return s;
}

} // namespace

TEST_SUITE("service_flow") {

TEST_CASE("exactly five scheduling classes, with their request modes") {
  CHECK(kAllSchedulingClasses.size() == 5);
  std::set<std::string> names;
  for (auto c : kAllSchedulingClasses) {
    names.insert(to_string(c));
    CHECK(parse_scheduling_class(to_string(c)) == c);
  }
  CHECK(names.size() == 5);
  CHECK(requires_request(SchedulingClass::ugs) == RequestMode::unsolicited);
  CHECK(requires_request(SchedulingClass::ertps) == RequestMode::unsolicited);
  CHECK(requires_request(SchedulingClass::rtps) == RequestMode::poll);
  CHECK(requires_request(SchedulingClass::nrtps) == RequestMode::poll);
  CHECK(requires_request(SchedulingClass::be) == RequestMode::contention);
  CHECK(parse_scheduling_class("rtPS") == SchedulingClass::rtps);
  CHECK_FALSE(parse_scheduling_class("gold"));
}

TEST_CASE("default class pairing of traffic kinds") {
  CHECK(default_class(TrafficType::voice) == SchedulingClass::ugs);
  CHECK(default_class(TrafficType::video) == SchedulingClass::rtps);
  CHECK(default_class(TrafficType::voip_silence) == SchedulingClass::ertps);
  CHECK(default_class(TrafficType::ftp) == SchedulingClass::nrtps);
  CHECK(default_class(TrafficType::http) == SchedulingClass::be);
}

TEST_CASE("flow parameter constraints") {
  auto ugs = flow_of(SchedulingClass::ugs, 1);
  CHECK_NOTHROW(validate(ugs));
  ugs.max_sustained_rate_bps = 128000;
  CHECK_THROWS_AS(validate(ugs), ConfigError);

  auto be = flow_of(SchedulingClass::be, 2);
  be.min_reserved_rate_bps = 2000;
  be.max_sustained_rate_bps = 1000;
  CHECK_THROWS_AS(validate(be), ConfigError);
  be.weight = 0;
  be.min_reserved_rate_bps = 0;
  CHECK_THROWS_AS(validate(be), ConfigError);
}

TEST_CASE("classify routes by (src, dst, traffic type)") {
  FlowTable t;
  const Cid voice = t.add(flow_of(SchedulingClass::ugs, 1), {5, 1, TrafficType::voice, Direction::uplink});
  const Cid voip = t.add(flow_of(SchedulingClass::ertps, 2), {5, 1, TrafficType::voip_silence, Direction::uplink});
  CHECK(voice != voip);
  CHECK(t.classify({5, 1, TrafficType::voice, Direction::uplink}) == voice);
  CHECK(t.classify({5, 1, TrafficType::voip_silence, Direction::uplink}) == voip);
  CHECK(t.unclassified_drops() == 0);

  CHECK_FALSE(t.classify({3, 4, TrafficType::http, Direction::uplink}));
  CHECK(t.unclassified_drops() == 1);
}

TEST_CASE("cids are sequential and unique; duplicates are refused") {
  FlowTable t;
  CHECK(t.add(flow_of(SchedulingClass::be, 1), {1, 2, TrafficType::http, Direction::uplink}) == 1);
  CHECK(t.add(flow_of(SchedulingClass::be, 2), {2, 3, TrafficType::http, Direction::uplink}) == 2);
  CHECK_THROWS_AS(t.add(flow_of(SchedulingClass::be, 3), {1, 2, TrafficType::http, Direction::uplink}), ConfigError);
  CHECK_THROWS_AS(t.add(flow_of(SchedulingClass::be, 2), {4, 5, TrafficType::http, Direction::uplink}), ConfigError);
}

TEST_CASE("connection queue is FIFO, drop-tail and conserves") {
  Connection c(ConnectionInfo{7, 1, Direction::uplink, 1, 2, TrafficType::ftp, SchedulingClass::nrtps, 1}, 3);
  for (PacketId id = 1; id <= 5; ++id) {
    c.enqueue(sdu(id, 100 * static_cast<std::uint32_t>(id)));
    CHECK(c.enqueued() == c.dequeued() + c.size() + c.dropped());
  }
  CHECK(c.size() == 3);
  CHECK(c.dropped() == 2);
  CHECK(c.dropped_bytes() == 400 + 500);
  CHECK(c.backlog_bytes() == 600);
  CHECK(c.pop_front().id == 1);
  CHECK(c.pop_front().id == 2);
  CHECK(c.enqueued() == c.dequeued() + c.size() + c.dropped());
  CHECK(c.backlog_bytes() == 300);
}

}
