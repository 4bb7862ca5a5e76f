#include "wimax/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace wimax {
namespace {

constexpr std::int64_t kMaxDurationUs = std::int64_t{1} << 50;

// --- validation --------------------------------------------------------------

std::string flow_label(const FlowSpec& f, std::size_t index) {
  return "flow " + std::to_string(index + 1) + (f.name.empty() ? "" : " (" + f.name + ")");
}

// --- YAML reading ------------------------------------------------------------

class Reader {
public:
  Reader(const YAML::Node& node, std::string path, const std::string& source)
      : node_(node), path_(std::move(path)), source_(source) {
    if (!node_.IsMap()) {
      fail(node_, "expected a mapping");
    }
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& what) const {
    const auto mark = at.Mark();
    std::string where = source_;
    if (mark.line >= 0) {
      where += ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
    }
    throw ConfigError(where + ": " + (path_.empty() ? "" : path_ + ": ") + what);
  }

  std::optional<YAML::Node> child(const std::string& key) {
    seen_.insert(key);
    auto n = node_[key];
    if (!n.IsDefined() || n.IsNull()) {
      return std::nullopt;
    }
    return n;
  }

  std::optional<std::string> str(const std::string& key) {
    auto n = child(key);
    if (!n) {
      return std::nullopt;
    }
    if (!n->IsScalar()) {
      fail(*n, key + ": expected a scalar");
    }
    return n->Scalar();
  }

  template <typename T>
  std::optional<T> integer(const std::string& key, T min = std::numeric_limits<T>::min(),
                           T max = std::numeric_limits<T>::max()) {
    auto s = str(key);
    if (!s) {
      return std::nullopt;
    }
    std::string_view text = *s;
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(node_[key], key + ": '" + *s + "' is not an integer in range");
    }
    if (v < min || v > max) {
      fail(node_[key], key + ": " + *s + " outside [" + std::to_string(min) + ", " + std::to_string(max) + "]");
    }
    return v;
  }

  std::optional<double> real(const std::string& key) {
    auto s = str(key);
    if (!s) {
      return std::nullopt;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
    if (ec != std::errc() || ptr != s->data() + s->size() || !std::isfinite(v)) {
      fail(node_[key], key + ": '" + *s + "' is not a number");
    }
    return v;
  }

  std::optional<bool> boolean(const std::string& key) {
    auto s = str(key);
    if (!s) {
      return std::nullopt;
    }
    if (*s == "true") {
      return true;
    }
    if (*s == "false") {
      return false;
    }
    fail(node_[key], key + ": expected true or false, got '" + *s + "'");
  }

  std::optional<Rational> rational(const std::string& key) {
    auto s = str(key);
    if (!s) {
      return std::nullopt;
    }
    auto r = Rational::parse(*s);
    if (!r) {
      fail(node_[key], key + ": '" + *s + "' is not a fraction like 3/4");
    }
    return r;
  }

  std::optional<SimTime> micros(const std::string& key) {
    auto v = integer<std::int64_t>(key, 0, kMaxDurationUs);
    if (!v) {
      return std::nullopt;
    }
    return SimTime::micros(*v);
  }

  template <typename E, typename Parse>
  std::optional<E> enumeration(const std::string& key, Parse parse) {
    auto s = str(key);
    if (!s) {
      return std::nullopt;
    }
    auto v = parse(*s);
    if (!v) {
      fail(node_[key], key + ": unknown value '" + *s + "'");
    }
    return v;
  }

  /// Rejects every key that was never asked for.
  void finish() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.contains(key)) {
        fail(kv.first, "unknown key '" + key + "'");
      }
    }
  }

  const std::string& path() const { return path_; }
  const YAML::Node& node() const { return node_; }

private:
  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
};

void read_generator_params(Reader& r, TrafficType kind, GeneratorParams& p) {
  if (auto v = r.integer<std::uint32_t>("mtu_bytes", 1)) {
    p.mtu_bytes = *v;
  }
  switch (kind) {
  case TrafficType::voip_silence:
    if (auto v = r.real("mean_talk_s")) {
      p.mean_talk_s = *v;
    }
    if (auto v = r.real("mean_silence_s")) {
      p.mean_silence_s = *v;
    }
    [[fallthrough]];
  case TrafficType::voice:
    if (auto v = r.integer<std::uint32_t>("packet_bytes", 1)) {
      p.voice_packet_bytes = *v;
    }
    if (auto v = r.micros("interval_us")) {
      p.voice_interval = *v;
    }
    break;
  case TrafficType::video:
    if (auto v = r.micros("frame_interval_us")) {
      p.video_frame_interval = *v;
    }
    if (auto v = r.real("mean_frame_bytes")) {
      p.video_mean_frame_bytes = *v;
    }
    if (auto v = r.integer<std::uint32_t>("max_frame_bytes", 1)) {
      p.video_max_frame_bytes = *v;
    }
    if (auto v = r.real("sigma")) {
      p.video_sigma = *v;
    }
    break;
  case TrafficType::ftp:
    if (auto v = r.integer<std::uint32_t>("packet_bytes", 1)) {
      p.ftp_packet_bytes = *v;
    }
    if (auto v = r.integer<std::uint64_t>("rate_bps", 1)) {
      p.ftp_rate_bps = *v;
    }
    break;
  case TrafficType::http:
    if (auto v = r.real("mean_interarrival_s")) {
      p.http_mean_interarrival_s = *v;
    }
    if (auto v = r.real("mean_page_bytes")) {
      p.http_mean_page_bytes = *v;
    }
    if (auto v = r.integer<std::uint32_t>("max_page_bytes", 1)) {
      p.http_max_page_bytes = *v;
    }
    if (auto v = r.real("pareto_shape")) {
      p.http_pareto_shape = *v;
    }
    break;
  }
  r.finish();
}

FlowSpec read_flow(const YAML::Node& node, std::size_t index, const std::string& source) {
  Reader r(node, "flows[" + std::to_string(index) + "]", source);
  FlowSpec f;
  f.name = r.str("name").value_or("");
  const auto kind = r.enumeration<TrafficType>("kind", parse_traffic_type);
  if (!kind) {
    r.fail(node, "missing required key 'kind'");
  }
  f.generator.kind = *kind;
  f.generator.cls = r.enumeration<SchedulingClass>("class", parse_scheduling_class).value_or(default_class(*kind));
  const auto src = r.integer<StationId>("src");
  const auto dst = r.integer<StationId>("dst");
  if (!src || !dst) {
    r.fail(node, "flows need both 'src' and 'dst'");
  }
  f.generator.src = *src;
  f.generator.dst = *dst;
  f.weight = r.integer<std::uint32_t>("weight", 1).value_or(1);
  f.quantum_bytes = r.integer<std::uint32_t>("quantum_bytes", 1);
  f.min_reserved_rate_bps = r.integer<std::uint64_t>("min_reserved_rate_bps");
  f.max_sustained_rate_bps = r.integer<std::uint64_t>("max_sustained_rate_bps");
  f.max_latency_us = r.integer<std::int64_t>("max_latency_us", 1);
  if (auto v = r.micros("grant_interval_us")) {
    f.grant_interval = *v;
  }
  f.generator.start = r.micros("start_us").value_or(SimTime{});
  if (auto stop = r.micros("stop_us")) {
    f.generator.stop = *stop;
    f.stop_explicit = true;
  }
  if (auto params = r.child("params")) {
    Reader pr(*params, r.path() + ".params", source);
    read_generator_params(pr, *kind, f.generator.params);
  }
  r.finish();
  return f;
}

std::string fmt_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  std::string s(buf, ptr);
  if (s.find_first_of(".e") == std::string::npos) {
    s += ".0";
  }
  return s;
}

FlowSpec paper_flow(std::string name, TrafficType kind, StationId src, StationId dst, std::uint32_t weight) {
  FlowSpec f;
  f.name = std::move(name);
  f.generator.kind = kind;
  f.generator.cls = default_class(kind);
  f.generator.src = src;
  f.generator.dst = dst;
  f.weight = weight;
  return f;
}

} // namespace

ServiceFlow resolve_service_flow(const FlowSpec& spec, Direction direction) {
  ServiceFlow flow;
  flow.direction = direction;
  flow.cls = spec.generator.cls;
  flow.weight = spec.weight;
  flow.grant_interval = spec.grant_interval;
  flow.max_latency_us = spec.max_latency_us;
  flow.sdu_size = max_sdu_size(spec.generator);

  // Unsolicited classes reserve the source's peak (talk-spurt) rate.
  std::uint64_t reserved = 0;
  const auto& p = spec.generator.params;
  switch (flow.cls) {
  case SchedulingClass::ugs:
  case SchedulingClass::ertps:
    if (spec.generator.kind == TrafficType::voice || spec.generator.kind == TrafficType::voip_silence) {
      reserved = static_cast<std::uint64_t>(
          std::llround(p.voice_packet_bytes * 8.0 / p.voice_interval.to_seconds()));
    } else {
      reserved = static_cast<std::uint64_t>(std::ceil(nominal_rate_bps(spec.generator)));
    }
    break;
  default: break;
  }
  flow.min_reserved_rate_bps = spec.min_reserved_rate_bps.value_or(reserved);
  flow.max_sustained_rate_bps =
      spec.max_sustained_rate_bps.value_or(flow.cls == SchedulingClass::ugs || flow.cls == SchedulingClass::ertps
                                               ? flow.min_reserved_rate_bps
                                               : 0);
  return flow;
}

std::uint32_t base_quantum(const Scenario& scenario) {
  if (scenario.base_quantum_bytes) {
    return *scenario.base_quantum_bytes;
  }
  std::uint32_t q = 1;
  for (const auto& f : scenario.flows) {
    q = std::max(q, max_sdu_size(f.generator));
  }
  return q;
}

std::uint32_t quantum_of(const Scenario& scenario, const FlowSpec& spec) {
  if (spec.quantum_bytes) {
    return *spec.quantum_bytes;
  }
  const std::uint64_t q = static_cast<std::uint64_t>(spec.weight) * base_quantum(scenario);
  if (q > UINT32_MAX) {
    throw ConfigError("quantum of " + spec.name + " overflows");
  }
  return static_cast<std::uint32_t>(q);
}

void set_duration(Scenario& scenario, SimTime duration) {
  scenario.duration = duration;
  for (auto& f : scenario.flows) {
    if (!f.stop_explicit) {
      f.generator.stop = duration;
    }
  }
}

void apply_strict_paper(Scenario& scenario) {
  scenario.bwreq.piggyback = false;
  scenario.bwreq.nrtps_contention = false;
}

void validate(const Scenario& s) {
  validate(s.frame);
  validate(s.bwreq);
  if (s.stations.subscriber_count == 0) {
    throw ConfigError("stations.subscribers must be >= 1");
  }
  if (s.stations.queue_capacity_packets == 0) {
    throw ConfigError("stations.queue_capacity_packets must be >= 1");
  }
  if (s.stations.map_overhead < Rational() || s.stations.map_overhead >= Rational(1)) {
    throw ConfigError("frame.map_overhead must lie in [0, 1)");
  }
  const SimTime frame = s.frame.frame_duration;
  if (s.duration < frame * 10) {
    throw ConfigError("run duration " + to_string(s.duration) + " is below the minimum of 10 frames (" +
                      to_string(frame * 10) + ")");
  }
  if (s.duration.us() % frame.us() != 0) {
    throw ConfigError("run duration must be a whole number of frames");
  }
  if (s.bucket_width <= SimTime{}) {
    throw ConfigError("run.bucket_width_us must be positive");
  }
  if (s.flows.empty()) {
    throw ConfigError("scenario defines no flows");
  }
  if (s.base_quantum_bytes && *s.base_quantum_bytes == 0) {
    throw ConfigError("schedulers.base_quantum_bytes must be >= 1");
  }

  GrantLedger probe(s.scheduler_bs, s.bwreq);
  FlowTable table;
  for (std::size_t i = 0; i < s.flows.size(); ++i) {
    const auto& f = s.flows[i];
    const std::string who = flow_label(f, i) + ": ";
    const auto& g = f.generator;
    for (StationId id : {g.src, g.dst}) {
      if (id > s.stations.subscriber_count) {
        throw ConfigError(who + "station " + std::to_string(id) + " does not exist (subscribers: 1.." +
                          std::to_string(s.stations.subscriber_count) + ", base station: 0)");
      }
    }
    if (g.src == kBaseStation) {
      throw ConfigError(who + "flows must originate at a subscriber station");
    }
    try {
      validate(g);
      auto flow = resolve_service_flow(f, Direction::uplink);
      flow.sfid = static_cast<Sfid>(i + 1);
      validate(flow);
      if (requires_request(flow.cls) == RequestMode::unsolicited && flow.grant_interval.us() % frame.us() != 0) {
        throw ConfigError("grant_interval_us must be a multiple of the frame duration");
      }
      const Cid cid = table.add(flow, FlowKey{g.src, g.dst, g.kind, Direction::uplink});
      probe.register_connection(table.connection(cid), flow, quantum_of(s, f));
    } catch (const ConfigError& e) {
      throw ConfigError(who + e.what());
    }
    if (g.stop > s.duration) {
      throw ConfigError(who + "stop_us lies beyond the end of the run");
    }
  }
  const auto peak = probe.peak_unsolicited_bytes_per_frame();
  const auto cap = subframe_capacity_bytes(s.frame, Direction::uplink);
  if (peak > cap) {
    throw OversubscribedUgsError("unsolicited grants need up to " + std::to_string(peak) +
                                 " bytes per frame, uplink capacity is " + std::to_string(cap));
  }
}

Scenario build_paper_scenario() {
  Scenario s;
  s.name = std::string(kPaperScenarioName);
  s.flows.push_back(paper_flow("ftp", TrafficType::ftp, 1, 2, 2));
  // Pushes the uplink past capacity; the other sources stay at their defaults.
  s.flows[0].generator.params.ftp_rate_bps = 40000000;
  s.flows.push_back(paper_flow("video", TrafficType::video, 2, 3, 3));
  s.flows.push_back(paper_flow("http", TrafficType::http, 3, 4, 1));
  s.flows.push_back(paper_flow("voip", TrafficType::voip_silence, 4, 5, 4));
  s.flows.push_back(paper_flow("voice", TrafficType::voice, 4, 1, 4));
  set_duration(s, s.duration);
  return s;
}

Scenario build_paper_scenario_literal() {
  Scenario s = build_paper_scenario();
  s.name = std::string(kPaperLiteralScenarioName);
  s.flows[3].generator.dst = 1;
  return s;
}

Scenario parse_scenario(std::string_view text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": " + e.msg);
  }
  if (!root.IsDefined() || root.IsNull()) {
    throw ConfigError(source_name + ": empty scenario file");
  }
  Scenario s;
  Reader top(root, "", source_name);
  s.name = top.str("name").value_or("custom");

  if (auto node = top.child("frame")) {
    Reader r(*node, "frame", source_name);
    if (auto v = r.micros("duration_us")) {
      s.frame.frame_duration = *v;
    }
    if (auto v = r.micros("ttg_us")) {
      s.frame.ttg = *v;
    }
    if (auto v = r.micros("rtg_us")) {
      s.frame.rtg = *v;
    }
    if (auto v = r.rational("dl_fraction")) {
      s.frame.dl_fraction = *v;
    }
    if (auto v = r.integer<std::uint64_t>("channel_bandwidth_hz", 1)) {
      s.frame.channel_bandwidth_hz = *v;
    }
    if (auto v = r.enumeration<Modulation>("modulation", parse_modulation)) {
      s.frame.phy.modulation = *v;
    }
    if (auto v = r.rational("coding_rate")) {
      s.frame.phy.coding_rate = *v;
    }
    if (auto v = r.rational("efficiency")) {
      s.frame.phy.efficiency_factor = *v;
    }
    if (auto v = r.rational("map_overhead")) {
      s.stations.map_overhead = *v;
    }
    r.finish();
  }
  if (auto node = top.child("stations")) {
    Reader r(*node, "stations", source_name);
    if (auto v = r.integer<StationId>("subscribers", 1, 4096)) {
      s.stations.subscriber_count = *v;
    }
    if (auto v = r.integer<std::size_t>("queue_capacity_packets", 1)) {
      s.stations.queue_capacity_packets = *v;
    }
    r.finish();
  }
  if (auto node = top.child("schedulers")) {
    Reader r(*node, "schedulers", source_name);
    if (auto v = r.enumeration<SchedulerKind>("bs", parse_scheduler_kind)) {
      s.scheduler_bs = *v;
    }
    if (auto v = r.enumeration<SchedulerKind>("ss", parse_scheduler_kind)) {
      s.scheduler_ss = *v;
    }
    s.base_quantum_bytes = r.integer<std::uint32_t>("base_quantum_bytes", 1);
    r.finish();
  }
  if (auto node = top.child("contention")) {
    Reader r(*node, "contention", source_name);
    auto& b = s.bwreq;
    b.request_slot_bytes = r.integer<std::uint32_t>("request_slot_bytes", 1).value_or(b.request_slot_bytes);
    b.min_window = r.integer<std::uint32_t>("min_window", 1).value_or(b.min_window);
    b.max_window = r.integer<std::uint32_t>("max_window", 1).value_or(b.max_window);
    b.min_contention_slots = r.integer<std::uint32_t>("min_slots", 1).value_or(b.min_contention_slots);
    b.rtps_poll_interval = r.micros("rtps_poll_interval_us").value_or(b.rtps_poll_interval);
    b.nrtps_poll_interval = r.micros("nrtps_poll_interval_us").value_or(b.nrtps_poll_interval);
    b.poll_bytes = r.integer<std::uint32_t>("poll_bytes", 1).value_or(b.poll_bytes);
    b.ertps_min_grant_bytes = r.integer<std::uint32_t>("ertps_min_grant_bytes", 1).value_or(b.ertps_min_grant_bytes);
    b.piggyback = r.boolean("piggyback").value_or(b.piggyback);
    b.nrtps_contention = r.boolean("nrtps_contention").value_or(b.nrtps_contention);
    r.finish();
  }
  std::optional<SimTime> duration;
  if (auto node = top.child("run")) {
    Reader r(*node, "run", source_name);
    s.seed = r.integer<std::uint64_t>("seed").value_or(s.seed);
    duration = r.micros("duration_us");
    s.bucket_width = r.micros("bucket_width_us").value_or(s.bucket_width);
    r.finish();
  }
  if (auto node = top.child("flows")) {
    if (!node->IsSequence()) {
      top.fail(*node, "flows: expected a list");
    }
    for (std::size_t i = 0; i < node->size(); ++i) {
      s.flows.push_back(read_flow((*node)[i], i, source_name));
    }
  }
  top.finish();

  set_duration(s, duration.value_or(s.duration));
  try {
    validate(s);
  } catch (const ConfigError& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& name_or_path) {
  if (name_or_path == kPaperScenarioName) {
    auto s = build_paper_scenario();
    validate(s);
    return s;
  }
  if (name_or_path == kPaperLiteralScenarioName) {
    auto s = build_paper_scenario_literal();
    validate(s);
    return s;
  }
  std::ifstream in(name_or_path);
  if (!in) {
    throw ConfigError(name_or_path + ": cannot open scenario file (built-in names: paper-pmp, paper-pmp-literal)");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), name_or_path);
}

std::string to_yaml(const Scenario& s) {
  std::ostringstream o;
  const auto& f = s.frame;
  const auto& b = s.bwreq;
  o << "name: " << s.name << "\n";
  o << "frame:\n"
    << "  duration_us: " << f.frame_duration.us() << "\n"
    << "  ttg_us: " << f.ttg.us() << "\n"
    << "  rtg_us: " << f.rtg.us() << "\n"
    << "  dl_fraction: " << f.dl_fraction.str() << "\n"
    << "  channel_bandwidth_hz: " << f.channel_bandwidth_hz << "\n"
    << "  modulation: " << to_string(f.phy.modulation) << "\n"
    << "  coding_rate: " << f.phy.coding_rate.str() << "\n"
    << "  efficiency: " << f.phy.efficiency_factor.str() << "\n"
    << "  map_overhead: " << s.stations.map_overhead.str() << "\n";
  o << "stations:\n"
    << "  subscribers: " << s.stations.subscriber_count << "\n"
    << "  queue_capacity_packets: " << s.stations.queue_capacity_packets << "\n";
  o << "schedulers:\n"
    << "  bs: " << to_string(s.scheduler_bs) << "\n"
    << "  ss: " << to_string(s.scheduler_ss) << "\n";
  if (s.base_quantum_bytes) {
    o << "  base_quantum_bytes: " << *s.base_quantum_bytes << "\n";
  }
  o << "contention:\n"
    << "  request_slot_bytes: " << b.request_slot_bytes << "\n"
    << "  min_window: " << b.min_window << "\n"
    << "  max_window: " << b.max_window << "\n"
    << "  min_slots: " << b.min_contention_slots << "\n"
    << "  rtps_poll_interval_us: " << b.rtps_poll_interval.us() << "\n"
    << "  nrtps_poll_interval_us: " << b.nrtps_poll_interval.us() << "\n"
    << "  poll_bytes: " << b.poll_bytes << "\n"
    << "  ertps_min_grant_bytes: " << b.ertps_min_grant_bytes << "\n"
    << "  piggyback: " << (b.piggyback ? "true" : "false") << "\n"
    << "  nrtps_contention: " << (b.nrtps_contention ? "true" : "false") << "\n";
  o << "run:\n"
    << "  seed: " << s.seed << "\n"
    << "  duration_us: " << s.duration.us() << "\n"
    << "  bucket_width_us: " << s.bucket_width.us() << "\n";
  o << "flows:\n";
  for (const auto& fl : s.flows) {
    const auto& g = fl.generator;
    const auto& p = g.params;
    o << "  - name: " << fl.name << "\n"
      << "    kind: " << to_string(g.kind) << "\n"
      << "    class: " << to_string(g.cls) << "\n"
      << "    src: " << g.src << "\n"
      << "    dst: " << g.dst << "\n"
      << "    weight: " << fl.weight << "\n"
      << "    grant_interval_us: " << fl.grant_interval.us() << "\n";
    if (fl.quantum_bytes) {
      o << "    quantum_bytes: " << *fl.quantum_bytes << "\n";
    }
    if (fl.min_reserved_rate_bps) {
      o << "    min_reserved_rate_bps: " << *fl.min_reserved_rate_bps << "\n";
    }
    if (fl.max_sustained_rate_bps) {
      o << "    max_sustained_rate_bps: " << *fl.max_sustained_rate_bps << "\n";
    }
    if (fl.max_latency_us) {
      o << "    max_latency_us: " << *fl.max_latency_us << "\n";
    }
    if (g.start != SimTime{}) {
      o << "    start_us: " << g.start.us() << "\n";
    }
    if (fl.stop_explicit) {
      o << "    stop_us: " << g.stop.us() << "\n";
    }
    o << "    params:\n";
    switch (g.kind) {
    case TrafficType::voip_silence:
      o << "      mean_talk_s: " << fmt_real(p.mean_talk_s) << "\n"
        << "      mean_silence_s: " << fmt_real(p.mean_silence_s) << "\n";
      [[fallthrough]];
    case TrafficType::voice:
      o << "      packet_bytes: " << p.voice_packet_bytes << "\n"
        << "      interval_us: " << p.voice_interval.us() << "\n";
      break;
    case TrafficType::video:
      o << "      frame_interval_us: " << p.video_frame_interval.us() << "\n"
        << "      mean_frame_bytes: " << fmt_real(p.video_mean_frame_bytes) << "\n"
        << "      max_frame_bytes: " << p.video_max_frame_bytes << "\n"
        << "      sigma: " << fmt_real(p.video_sigma) << "\n";
      break;
    case TrafficType::ftp:
      o << "      packet_bytes: " << p.ftp_packet_bytes << "\n"
        << "      rate_bps: " << p.ftp_rate_bps << "\n";
      break;
    case TrafficType::http:
      o << "      mean_interarrival_s: " << fmt_real(p.http_mean_interarrival_s) << "\n"
        << "      mean_page_bytes: " << fmt_real(p.http_mean_page_bytes) << "\n"
        << "      max_page_bytes: " << p.http_max_page_bytes << "\n"
        << "      pareto_shape: " << fmt_real(p.http_pareto_shape) << "\n";
      break;
    }
    o << "      mtu_bytes: " << p.mtu_bytes << "\n";
  }
  return o.str();
}

} // namespace wimax
