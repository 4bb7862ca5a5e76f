#include "wimax/metrics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wimax {
namespace {

constexpr MetricName kRateMetrics[] = {MetricName::throughput_bps, MetricName::load_bps,
                                       MetricName::iface_sent_bps, MetricName::iface_recv_bps};

bool scope_has(const Scope& scope, MetricName m) {
  if (m == MetricName::iface_sent_bps || m == MetricName::iface_recv_bps) {
    return scope.kind == Scope::Kind::bs;
  }
  return true;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

} // namespace

const char* to_string(MetricName m) {
  switch (m) {
  case MetricName::delay_s: return "delay_s";
  case MetricName::throughput_bps: return "throughput_bps";
  case MetricName::load_bps: return "load_bps";
  case MetricName::iface_sent_bps: return "iface_sent_bps";
  case MetricName::iface_recv_bps: return "iface_recv_bps";
  }
  return "unknown";
}

std::optional<MetricName> parse_metric_name(std::string_view text) {
  for (auto m : {MetricName::delay_s, MetricName::throughput_bps, MetricName::load_bps, MetricName::iface_sent_bps,
                 MetricName::iface_recv_bps}) {
    if (text == to_string(m)) {
      return m;
    }
  }
  return std::nullopt;
}

std::string Scope::name() const {
  switch (kind) {
  case Kind::cell: return "cell";
  case Kind::bs: return "bs";
  case Kind::ss: return "ss" + std::to_string(index);
  case Kind::flow: return "flow" + std::to_string(index);
  }
  return "unknown";
}

std::optional<Scope> Scope::parse(std::string_view text) {
  if (text == "cell") {
    return cell();
  }
  if (text == "bs") {
    return bs();
  }
  auto numbered = [&](std::string_view prefix, Kind k) -> std::optional<Scope> {
    if (text.substr(0, prefix.size()) != prefix) {
      return std::nullopt;
    }
    auto n = parse_number<std::uint32_t>(text.substr(prefix.size()));
    if (!n) {
      return std::nullopt;
    }
    return Scope{k, *n};
  };
  if (auto s = numbered("ss", Kind::ss)) {
    return s;
  }
  return numbered("flow", Kind::flow);
}

std::optional<double> RunSummary::find(const Scope& scope, std::string_view metric) const {
  for (const auto& e : entries) {
    if (e.scope == scope && e.metric == metric) {
      return e.value;
    }
  }
  return std::nullopt;
}

MetricsCollector::MetricsCollector(SimTime bucket_width, SimTime duration, StationId ss_count,
                                   std::vector<Cid> flow_cids)
    : bucket_width_(bucket_width), duration_(duration) {
  if (bucket_width <= SimTime{}) {
    throw std::invalid_argument("metrics bucket width must be positive");
  }
  buckets_ = static_cast<std::size_t>((duration.us() + bucket_width.us() - 1) / bucket_width.us());
  std::vector<Scope> scopes{Scope::cell(), Scope::bs()};
  for (StationId i = 1; i <= ss_count; ++i) {
    scopes.push_back(Scope::ss(i));
  }
  for (Cid c : flow_cids) {
    scopes.push_back(Scope::flow(c));
  }
  for (const auto& s : scopes) {
    auto& d = delay_[s];
    d.sum_us.assign(buckets_, 0);
    d.count.assign(buckets_, 0);
    for (auto m : kRateMetrics) {
      if (scope_has(s, m)) {
        bits_[{s, m}].bits.assign(buckets_, 0);
      }
    }
  }
}

std::size_t MetricsCollector::bucket_of(SimTime t) const {
  if (t < SimTime{} || t >= duration_) {
    throw InvariantViolation("metric sample at " + to_string(t) + " lies outside the run");
  }
  return static_cast<std::size_t>(t.us() / bucket_width_.us());
}

void MetricsCollector::add_delay(const Scope& scope, SimTime at, SimTime delay) {
  auto it = delay_.find(scope);
  if (it == delay_.end()) {
    throw InvariantViolation("metrics: unknown scope " + scope.name());
  }
  if (delay < SimTime{}) {
    throw InvariantViolation("metrics: negative delay on " + scope.name());
  }
  auto& d = it->second;
  const auto b = bucket_of(at);
  d.sum_us[b] += delay.us();
  ++d.count[b];
  const long double s = delay.to_seconds();
  d.total_s += s;
  d.total_sq_s2 += s * s;
  d.total_us += delay.us();
  ++d.total_count;
}

void MetricsCollector::add_bits(const Scope& scope, MetricName metric, SimTime at, std::uint64_t bits) {
  auto it = bits_.find({scope, metric});
  if (it == bits_.end()) {
    throw InvariantViolation(std::string("metrics: no ") + to_string(metric) + " on " + scope.name());
  }
  it->second.bits[bucket_of(at)] += bits;
  it->second.total += bits;
}

void MetricsCollector::record_offered(const MacSdu& sdu) {
  const std::uint64_t bits = sdu.size_bytes * 8ULL;
  add_bits(Scope::cell(), MetricName::load_bps, sdu.created_at, bits);
  add_bits(Scope::ss(sdu.src), MetricName::load_bps, sdu.created_at, bits);
  add_bits(Scope::flow(sdu.flow_cid), MetricName::load_bps, sdu.created_at, bits);
  ++counters_.generated_packets;
}

void MetricsCollector::record_bs_reception(const MacSdu& sdu) {
  if (!sdu.bs_received_at) {
    throw InvariantViolation("metrics: BS reception without timestamp");
  }
  const SimTime at = *sdu.bs_received_at;
  add_delay(Scope::bs(), at, at - sdu.created_at);
  add_bits(Scope::bs(), MetricName::load_bps, at, sdu.size_bytes * 8ULL);
  add_bits(Scope::bs(), MetricName::iface_recv_bps, at, sdu.size_bytes * 8ULL);
}

void MetricsCollector::record_relay_enqueued(const MacSdu& sdu, SimTime at) {
  add_bits(Scope::bs(), MetricName::iface_sent_bps, at, sdu.size_bytes * 8ULL);
}

void MetricsCollector::record_delivery(const MacSdu& sdu) {
  if (!sdu.delivered_at) {
    throw InvariantViolation("metrics: delivery without timestamp");
  }
  if (!delivered_ids_.insert(sdu.id).second) {
    throw InvariantViolation("SDU " + std::to_string(sdu.id) + " delivered twice");
  }
  const SimTime at = *sdu.delivered_at;
  const SimTime delay = at - sdu.created_at;
  const std::uint64_t bits = sdu.size_bytes * 8ULL;
  for (const auto& s : {Scope::cell(), Scope::ss(sdu.dst), Scope::flow(sdu.flow_cid)}) {
    if (s.kind == Scope::Kind::ss && sdu.dst == kBaseStation) {
      continue;
    }
    add_delay(s, at, delay);
    add_bits(s, MetricName::throughput_bps, at, bits);
  }
  add_bits(Scope::bs(), MetricName::throughput_bps, at, bits);
  ++counters_.delivered_packets;
}

DelayStats MetricsCollector::delay_stats(const Scope& scope) const {
  DelayStats out;
  auto it = delay_.find(scope);
  if (it == delay_.end() || it->second.total_count == 0) {
    return out;
  }
  const auto& d = it->second;
  out.count = d.total_count;
  const long double n = static_cast<long double>(d.total_count);
  const long double mean = d.total_s / n;
  out.mean_s = static_cast<double>(mean);
  out.variance_s2 = static_cast<double>(std::max<long double>(0, d.total_sq_s2 / n - mean * mean));
  return out;
}

std::uint64_t MetricsCollector::total_bits(const Scope& scope, MetricName metric) const {
  auto it = bits_.find({scope, metric});
  return it == bits_.end() ? 0 : it->second.total;
}

std::vector<MetricSeries> MetricsCollector::series() const {
  std::vector<MetricSeries> out;
  const double width_s = bucket_width_.to_seconds();
  for (const auto& [scope, d] : delay_) {
    MetricSeries s{MetricName::delay_s, scope, bucket_width_, {}};
    for (std::size_t b = 0; b < buckets_; ++b) {
      if (d.count[b] > 0) {
        s.samples.push_back({bucket_width_ * static_cast<std::int64_t>(b),
                             static_cast<double>(d.sum_us[b]) / 1e6 / static_cast<double>(d.count[b])});
      }
    }
    out.push_back(std::move(s));
    for (auto m : kRateMetrics) {
      auto it = bits_.find({scope, m});
      if (it == bits_.end()) {
        continue;
      }
      MetricSeries r{m, scope, bucket_width_, {}};
      for (std::size_t b = 0; b < buckets_; ++b) {
        // The last bucket may be short when the duration is not a multiple.
        const auto start = bucket_width_ * static_cast<std::int64_t>(b);
        const double span = std::min(width_s, (duration_ - start).to_seconds());
        r.samples.push_back({start, static_cast<double>(it->second.bits[b]) / span});
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

RunSummary MetricsCollector::summary() const {
  RunSummary out;
  const double duration_s = duration_.to_seconds();
  for (const auto& [scope, d] : delay_) {
    if (d.total_count > 0) {
      out.entries.push_back({scope, "delay_s", delay_stats(scope).mean_s});
    }
    for (auto m : kRateMetrics) {
      auto it = bits_.find({scope, m});
      if (it != bits_.end()) {
        out.entries.push_back({scope, to_string(m), static_cast<double>(it->second.total) / duration_s});
      }
    }
  }
  const auto c = Scope::cell();
  const auto add = [&](const char* name, std::uint64_t v) {
    out.entries.push_back({c, name, static_cast<double>(v)});
  };
  add("generated_packets", counters_.generated_packets);
  add("delivered_packets", counters_.delivered_packets);
  add("dropped_packets", counters_.dropped_packets);
  add("dropped_bytes", counters_.dropped_bytes);
  add("unclassified_drops", counters_.unclassified_drops);
  add("unused_grant_bytes", counters_.unused_grant_bytes);
  add("collisions", counters_.collisions);
  add("protocol_errors", counters_.protocol_errors);
  add("bandwidth_requests", counters_.bandwidth_requests);
  return out;
}

void emit_csv(std::ostream& out, const RunLabels& labels, const std::vector<MetricSeries>& series,
              const RunSummary& summary) {
  const std::string prefix = labels.scenario + "," + labels.scheduler_bs + "," + labels.scheduler_ss + "," +
                             std::to_string(labels.seed) + ",";
  out << kCsvHeader << '\n';
  for (const auto& s : series) {
    const std::string head = prefix + s.scope.name() + "," + to_string(s.name) + ",";
    for (const auto& sample : s.samples) {
      out << head << format_value(sample.bucket_start.to_seconds()) << ',' << format_value(sample.value) << '\n';
    }
  }
  for (const auto& e : summary.entries) {
    out << prefix << e.scope.name() << ',' << e.metric << ",-1.000000," << format_value(e.value) << '\n';
  }
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line == kCsvHeader) {
      saw_header = true;
      continue;
    }
    const auto fail = [&](const std::string& what) {
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": " + what);
    };
    if (!saw_header) {
      fail("missing header");
    }
    const auto f = split_fields(line);
    if (f.size() != 8) {
      fail("expected 8 fields, found " + std::to_string(f.size()));
    }
    CsvRow r;
    r.labels.scenario = f[0];
    r.labels.scheduler_bs = f[1];
    r.labels.scheduler_ss = f[2];
    const auto seed = parse_number<std::uint64_t>(f[3]);
    const auto start = parse_number<double>(f[6]);
    const auto value = parse_number<double>(f[7]);
    if (!seed || !start || !value) {
      fail("malformed number");
    }
    if (!Scope::parse(f[4])) {
      fail("unknown scope '" + std::string(f[4]) + "'");
    }
    r.labels.seed = *seed;
    r.scope = f[4];
    r.metric = f[5];
    r.bucket_start_s = *start;
    r.value = *value;
    rows.push_back(std::move(r));
  }
  return rows;
}

} // namespace wimax
