#include <benchmark/benchmark.h>

#include "wimax/scenario.hpp"
#include "wimax/station.hpp"

using namespace wimax;

namespace {

// One frame's worth of selection from permanently backlogged queues.
void BM_Select(benchmark::State& state, SchedulerKind kind) {
  const auto queues = static_cast<std::uint32_t>(state.range(0));
  auto s = make_scheduler(kind);
  for (std::uint32_t i = 0; i < queues; ++i) {
    s->add_queue({static_cast<Cid>(i + 1), i % 4 + 1, (i % 4 + 1) * 1500});
  }
  PacketId id = 1;
  std::uint32_t size = 64;
  std::uint64_t packets = 0;
  for (auto _ : state) {
    state.PauseTiming();
    for (std::uint32_t i = 0; i < queues; ++i) {
      while (s->queue(static_cast<Cid>(i + 1)).backlog_bytes < 60000) {
        size = size * 1103515245u % 1455 + 64;
        s->enqueue(static_cast<Cid>(i + 1), id++, size, SimTime{});
      }
    }
    state.ResumeTiming();
    const auto out = s->select(55503);
    for (const auto& d : out) {
      packets += d.packet_ids.size();
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["packets/s"] = benchmark::Counter(static_cast<double>(packets), benchmark::Counter::kIsRate);
}

BENCHMARK_CAPTURE(BM_Select, wfq, SchedulerKind::wfq)->Arg(2)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Select, dwrr, SchedulerKind::dwrr)->Arg(2)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Select, wrr, SchedulerKind::wrr)->Arg(2)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Select, fifo, SchedulerKind::fifo)->Arg(2)->Arg(8)->Arg(64);

// Ten simulated seconds of the built-in cell.
void BM_CellRun(benchmark::State& state, SchedulerKind kind) {
  auto s = load_scenario("paper-pmp");
  s.scheduler_bs = s.scheduler_ss = kind;
  set_duration(s, SimTime::seconds(10));
  for (auto _ : state) {
    Cell cell(s);
    cell.run();
    benchmark::DoNotOptimize(cell.metrics().counters().delivered_packets);
  }
  state.counters["frames/s"] = benchmark::Counter(800.0 * static_cast<double>(state.iterations()),
                                                  benchmark::Counter::kIsRate);
}

BENCHMARK_CAPTURE(BM_CellRun, wfq, SchedulerKind::wfq)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CellRun, dwrr, SchedulerKind::dwrr)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
