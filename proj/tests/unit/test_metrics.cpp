#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "wimax/metrics.hpp"

using namespace wimax;

namespace {

MacSdu delivered(PacketId id, SimTime created, SimTime at, std::uint32_t size = 100) {
  MacSdu s;
  s.id = id;
  s.flow_cid = 1;
  s.src = 1;
  s.dst = 2;
  s.size_bytes = size;
  s.created_at = created;
  s.bs_received_at = created + SimTime::micros((at - created).us() / 2);
  s.delivered_at = at;
  return s;
}

MetricsCollector collector(SimTime duration = SimTime::seconds(2)) {
  return MetricsCollector(SimTime::seconds(1), duration, 2, {1});
}

MetricSeries find(const std::vector<MetricSeries>& all, MetricName m, const Scope& s) {
  for (const auto& x : all) {
    if (x.name == m && x.scope == s) {
      return x;
    }
  }
  FAIL("no series " << to_string(m) << " on " << s.name());
  return {};
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("an SDU created at 0 and delivered at 0.025 s has delay 0.025") {
  auto m = collector();
  m.record_delivery(delivered(1, SimTime{}, SimTime::micros(25000)));
  const auto s = m.series();
  const auto d = find(s, MetricName::delay_s, Scope::flow(1));
  REQUIRE(d.samples.size() == 1);
  CHECK(d.samples[0].value == doctest::Approx(0.025));
  CHECK(m.delay_stats(Scope::ss(2)).mean_s == doctest::Approx(0.025));
  CHECK(m.delay_stats(Scope::ss(2)).variance_s2 == doctest::Approx(0.0));
}

TEST_CASE("100 bytes every 12.5 ms is 64000 b/s") {
  auto m = collector();
  for (PacketId i = 0; i < 80; ++i) {
    const auto t = SimTime::micros(12500 * static_cast<std::int64_t>(i));
    m.record_delivery(delivered(i + 1, t, t + SimTime::micros(100)));
  }
  const auto s = m.series();
  const auto th = find(s, MetricName::throughput_bps, Scope::flow(1));
  REQUIRE(th.samples.size() == 2);
  CHECK(th.samples[0].value == doctest::Approx(64000.0));
  CHECK(th.samples[1].value == doctest::Approx(0.0));
  CHECK(m.total_bits(Scope::bs(), MetricName::throughput_bps) == 64000);
}

TEST_CASE("a bucket with no deliveries has no delay row") {
  auto m = collector();
  m.record_delivery(delivered(1, SimTime::millis(1100), SimTime::millis(1200)));
  const auto s = m.series();
  const auto d = find(s, MetricName::delay_s, Scope::cell());
  REQUIRE(d.samples.size() == 1);
  CHECK(d.samples[0].bucket_start == SimTime::seconds(1));
}

TEST_CASE("delivering the same SDU twice is an invariant violation") {
  auto m = collector();
  const auto sdu = delivered(5, SimTime{}, SimTime::millis(10));
  m.record_delivery(sdu);
  CHECK_THROWS_AS(m.record_delivery(sdu), InvariantViolation);
}

TEST_CASE("load counts offered bits at creation") {
  auto m = collector();
  auto s = delivered(1, SimTime::millis(500), SimTime::millis(600), 1500);
  m.record_offered(s);
  m.record_bs_reception(s);
  CHECK(m.total_bits(Scope::ss(1), MetricName::load_bps) == 12000);
  CHECK(m.total_bits(Scope::flow(1), MetricName::load_bps) == 12000);
  CHECK(m.total_bits(Scope::bs(), MetricName::load_bps) == 12000);
  CHECK(m.total_bits(Scope::bs(), MetricName::iface_recv_bps) == 12000);
  CHECK(m.counters().generated_packets == 1);
  CHECK(m.delay_stats(Scope::bs()).mean_s == doctest::Approx(0.05));
}

TEST_CASE("samples outside the run are rejected") {
  auto m = collector();
  CHECK_THROWS_AS(m.record_delivery(delivered(1, SimTime{}, SimTime::seconds(2))), InvariantViolation);
}

TEST_CASE("csv: header first, summary rows only for an empty run") {
  auto m = collector();
  std::ostringstream out;
  emit_csv(out, {"x", "wfq", "dwrr", 3}, m.series(), m.summary());
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  in.seekg(0);
  const auto rows = read_csv(in);
  bool any_delay = false;
  for (const auto& r : rows) {
    if (r.metric == "delay_s") {
      any_delay = true;
    }
    if (r.is_summary()) {
      CHECK(r.bucket_start_s == -1.0);
    }
  }
  CHECK_FALSE(any_delay);
  CHECK(out.str().find(",-1.000000,0.000000\n") != std::string::npos);
}

TEST_CASE("csv is byte-identical for identical inputs and reads back") {
  const auto render = [] {
    auto m = collector();
    for (PacketId i = 1; i <= 30; ++i) {
      const auto t = SimTime::millis(static_cast<std::int64_t>(i) * 50);
      auto s = delivered(i, t, t + SimTime::micros(1234 * static_cast<std::int64_t>(i)), 77);
      m.record_offered(s);
      m.record_bs_reception(s);
      m.record_delivery(s);
    }
    std::ostringstream out;
    emit_csv(out, {"demo", "wfq", "wfq", 9}, m.series(), m.summary());
    return out.str();
  };
  const auto a = render();
  CHECK(a == render());
  std::istringstream in(a);
  const auto rows = read_csv(in);
  CHECK(rows.size() + 1 == static_cast<std::size_t>(std::count(a.begin(), a.end(), '\n')));
  for (const auto& r : rows) {
    CHECK(r.labels.scenario == "demo");
    CHECK(r.labels.seed == 9);
  }
}

TEST_CASE("read_csv reports the offending line") {
  std::istringstream in(std::string(kCsvHeader) + "\nx,wfq,wfq,1,bs,delay_s,0.0\n");
  try {
    read_csv(in);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("scope names round-trip") {
  for (const auto& s : {Scope::cell(), Scope::bs(), Scope::ss(3), Scope::flow(12)}) {
    CHECK(Scope::parse(s.name()) == s);
  }
  CHECK_FALSE(Scope::parse("ssx"));
}

}
