#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "wimax/service_flow.hpp"
#include "wimax/sim_kernel.hpp"

namespace wimax {

enum class MetricName : std::uint8_t { delay_s, throughput_bps, load_bps, iface_sent_bps, iface_recv_bps };

const char* to_string(MetricName m);
std::optional<MetricName> parse_metric_name(std::string_view text);

struct Scope {
  enum class Kind : std::uint8_t { cell, bs, ss, flow };
  Kind kind = Kind::cell;
  std::uint32_t index = 0; // SS id or flow CID

  static Scope cell() { return {Kind::cell, 0}; }
  static Scope bs() { return {Kind::bs, 0}; }
  static Scope ss(StationId id) { return {Kind::ss, id}; }
  static Scope flow(Cid cid) { return {Kind::flow, cid}; }

  /// "cell", "bs", "ss3", "flow5"
  std::string name() const;
  static std::optional<Scope> parse(std::string_view text);

  auto operator<=>(const Scope&) const = default;
};

struct MetricSample {
  SimTime bucket_start;
  double value = 0.0;
};

struct MetricSeries {
  MetricName name = MetricName::delay_s;
  Scope scope;
  SimTime bucket_width;
  std::vector<MetricSample> samples;
};

struct SummaryEntry {
  Scope scope;
  std::string metric; // a MetricName or one of the counter names
  double value = 0.0;
};

/// Run-wide means (delay packet-weighted, rates bit-weighted) plus counters.
struct RunSummary {
  std::vector<SummaryEntry> entries;

  std::optional<double> find(const Scope& scope, std::string_view metric) const;
};

/// Counters that are not time series; recorded on the cell scope.
struct RunCounters {
  std::uint64_t generated_packets = 0;
  std::uint64_t delivered_packets = 0;
  std::uint64_t dropped_packets = 0;
  std::uint64_t dropped_bytes = 0;
  std::uint64_t unclassified_drops = 0;
  std::uint64_t unused_grant_bytes = 0;
  std::uint64_t collisions = 0;
  std::uint64_t protocol_errors = 0;
  std::uint64_t bandwidth_requests = 0;
};

struct DelayStats {
  std::uint64_t count = 0;
  double mean_s = 0.0;
  double variance_s2 = 0.0;
};

/// Per-run collector. Buckets tile [0, duration) with the configured width.
///
/// Scopes: cell-wide, the BS, each SS and each uplink flow (by CID).
///  - delay: end-to-end MAC SDU delay at the destination; on the BS scope the
///    uplink-hop delay (creation to reception at the BS).
///  - throughput: delivered bits; on the BS scope bits the BS delivered.
///  - load: offered bits at creation; on the BS scope bits entering the relay.
///  - iface_recv / iface_sent (BS only): bits handed from the MAC up to the
///    relay, and from the relay down into downlink queues.
class MetricsCollector {
public:
  MetricsCollector(SimTime bucket_width, SimTime duration, StationId ss_count, std::vector<Cid> flow_cids);

  void record_offered(const MacSdu& sdu);
  void record_bs_reception(const MacSdu& sdu);
  void record_relay_enqueued(const MacSdu& sdu, SimTime at);
  /// Throws InvariantViolation on a second delivery of the same SDU id.
  void record_delivery(const MacSdu& sdu);

  RunCounters& counters() { return counters_; }
  const RunCounters& counters() const { return counters_; }

  std::vector<MetricSeries> series() const;
  RunSummary summary() const;
  DelayStats delay_stats(const Scope& scope) const;
  /// Total bits recorded for a rate metric.
  std::uint64_t total_bits(const Scope& scope, MetricName metric) const;

  SimTime bucket_width() const { return bucket_width_; }
  SimTime duration() const { return duration_; }

private:
  struct DelayAcc {
    std::vector<std::int64_t> sum_us;
    std::vector<std::uint64_t> count;
    long double total_s = 0;
    long double total_sq_s2 = 0;
    std::uint64_t total_count = 0;
    std::int64_t total_us = 0;
  };
  struct BitsAcc {
    std::vector<std::uint64_t> bits;
    std::uint64_t total = 0;
  };

  std::size_t bucket_of(SimTime t) const;
  void add_delay(const Scope& scope, SimTime at, SimTime delay);
  void add_bits(const Scope& scope, MetricName metric, SimTime at, std::uint64_t bits);

  SimTime bucket_width_;
  SimTime duration_;
  std::size_t buckets_;
  std::map<Scope, DelayAcc> delay_;
  std::map<std::pair<Scope, MetricName>, BitsAcc> bits_;
  std::unordered_set<PacketId> delivered_ids_;
  RunCounters counters_;
};

struct RunLabels {
  std::string scenario;
  std::string scheduler_bs;
  std::string scheduler_ss;
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kCsvHeader = "scenario,scheduler_bs,scheduler_ss,seed,scope,metric,bucket_start_s,value";

/// Writes the header, one row per sample, then summary rows (bucket_start_s
/// of -1). Values use fixed 6-decimal notation.
void emit_csv(std::ostream& out, const RunLabels& labels, const std::vector<MetricSeries>& series,
              const RunSummary& summary);

struct CsvRow {
  RunLabels labels;
  std::string scope;
  std::string metric;
  double bucket_start_s = 0.0;
  double value = 0.0;

  bool is_summary() const { return bucket_start_s < 0.0; }
};

/// Parses CSV produced by emit_csv (several runs may be concatenated; repeated
/// header lines are skipped). Throws std::runtime_error with a line number on
/// malformed input.
std::vector<CsvRow> read_csv(std::istream& in);

} // namespace wimax
