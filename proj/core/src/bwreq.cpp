#include "wimax/bwreq.hpp"

#include <algorithm>
#include <string>

namespace wimax {
namespace {

bool is_power_of_two(std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

} // namespace

void validate(const BwReqParams& p) {
  if (p.request_slot_bytes == 0) {
    throw ConfigError("contention request_slot_bytes must be >= 1");
  }
  if (p.min_window == 0 || p.min_window > p.max_window) {
    throw ConfigError("contention windows must satisfy 1 <= min_window <= max_window");
  }
  if (!is_power_of_two(p.max_window / p.min_window) || p.max_window % p.min_window != 0) {
    throw ConfigError("contention max_window must be min_window times a power of two");
  }
  if (p.min_contention_slots == 0) {
    throw ConfigError("contention min_slots must be >= 1");
  }
  if (p.rtps_poll_interval <= SimTime{} || p.nrtps_poll_interval <= SimTime{}) {
    throw ConfigError("poll intervals must be positive");
  }
  if (p.poll_bytes == 0 || p.ertps_min_grant_bytes == 0) {
    throw ConfigError("poll_bytes and ertps_min_grant_bytes must be >= 1");
  }
}

const char* to_string(RequestOrigin origin) {
  switch (origin) {
  case RequestOrigin::poll_response: return "poll-response";
  case RequestOrigin::contention: return "contention";
  case RequestOrigin::piggyback: return "piggyback";
  }
  return "unknown";
}

std::optional<BwRequest> make_request(const Connection& connection, SimTime now, RequestOrigin mode) {
  if (connection.empty()) {
    return std::nullopt;
  }
  BwRequest r;
  r.cid = connection.cid();
  r.issued_at = now;
  r.mode = mode;
  r.packet_sizes.reserve(connection.size());
  for (const auto& sdu : connection.queue()) {
    r.packet_sizes.push_back(sdu.size_bytes);
  }
  r.bytes_requested = connection.backlog_bytes();
  return r;
}

// --- contention --------------------------------------------------------------

ContentionState ContentionState::with_bounds(std::uint32_t min_window, std::uint32_t max_window) {
  ContentionState s;
  s.window = min_window;
  s.min_window = min_window;
  s.max_window = max_window;
  return s;
}

void ContentionState::arm(BwRequest request, RandomSource& rng) {
  pending = std::move(request);
  backoff_remaining = static_cast<std::uint32_t>(rng.draw_uniform(window));
}

ContentionOutcome run_contention(std::span<ContentionState> states, std::uint32_t contention_slots,
                                 RandomSource& rng) {
  ContentionOutcome outcome;
  if (contention_slots == 0) {
    return outcome;
  }
  std::map<std::uint32_t, std::vector<std::size_t>> by_slot;
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto& s = states[i];
    if (!s.pending) {
      continue;
    }
    if (s.backoff_remaining < contention_slots) {
      by_slot[s.backoff_remaining].push_back(i);
    } else {
      s.backoff_remaining -= contention_slots;
    }
  }
  for (auto& [slot, senders] : by_slot) {
    if (senders.size() == 1) {
      auto& s = states[senders.front()];
      outcome.delivered.push_back(DeliveredRequest{senders.front(), slot, std::move(*s.pending)});
      s.pending.reset();
      s.window = s.min_window;
      s.backoff_remaining = 0;
      ++s.successes;
      continue;
    }
    for (std::size_t i : senders) {
      outcome.collided.push_back(CollidedRequest{i, slot, states[i].pending->cid});
    }
  }
  // Redraw after all slots are resolved, in station order.
  std::sort(outcome.collided.begin(), outcome.collided.end(),
            [](const CollidedRequest& a, const CollidedRequest& b) { return a.station_index < b.station_index; });
  for (const auto& c : outcome.collided) {
    auto& s = states[c.station_index];
    s.window = std::min(s.window * 2, s.max_window);
    s.backoff_remaining = static_cast<std::uint32_t>(rng.draw_uniform(s.window));
    ++s.collisions;
  }
  std::sort(outcome.delivered.begin(), outcome.delivered.end(),
            [](const DeliveredRequest& a, const DeliveredRequest& b) { return a.slot < b.slot; });
  return outcome;
}

// --- ledger ------------------------------------------------------------------

GrantLedger::GrantLedger(SchedulerKind ul_scheduler, BwReqParams params)
    : params_(params), scheduler_(make_scheduler(ul_scheduler)) {
  validate(params_);
}

void GrantLedger::register_connection(const ConnectionInfo& info, const ServiceFlow& flow, std::uint32_t quantum) {
  if (info.direction != Direction::uplink) {
    throw ConfigError("grant ledger only tracks uplink connections");
  }
  if (entries_.contains(info.cid)) {
    throw ConfigError("connection " + std::to_string(info.cid) + " registered twice");
  }
  Entry e;
  e.info = info;
  e.flow = flow;
  e.ertps_rate_bps = flow.min_reserved_rate_bps;
  switch (info.cls) {
  case SchedulingClass::ugs:
  case SchedulingClass::ertps: break;
  case SchedulingClass::rtps:
  case SchedulingClass::nrtps:
  case SchedulingClass::be: scheduler_->add_queue(QueueParams{info.cid, flow.weight, quantum}); break;
  }
  entries_.emplace(info.cid, e);
}

GrantLedger::Entry& GrantLedger::entry(Cid cid) {
  auto it = entries_.find(cid);
  if (it == entries_.end()) {
    throw InvariantViolation("grant ledger: unknown cid " + std::to_string(cid));
  }
  return it->second;
}

const GrantLedger::Entry& GrantLedger::entry(Cid cid) const {
  auto it = entries_.find(cid);
  if (it == entries_.end()) {
    throw InvariantViolation("grant ledger: unknown cid " + std::to_string(cid));
  }
  return it->second;
}

std::uint64_t GrantLedger::unsolicited_size(const Entry& e) const {
  const std::uint64_t rate = e.info.cls == SchedulingClass::ugs ? e.flow.min_reserved_rate_bps : e.ertps_rate_bps;
  if (rate == 0) {
    return params_.ertps_min_grant_bytes;
  }
  const auto bits = static_cast<unsigned __int128>(rate) * static_cast<std::uint64_t>(e.flow.grant_interval.us());
  const auto bytes = static_cast<std::uint64_t>((bits + 7999999u) / 8000000u);
  return ceil_div(bytes, e.flow.sdu_size) * e.flow.sdu_size;
}

std::vector<UnsolicitedGrant> GrantLedger::issue_unsolicited(SimTime now) {
  std::vector<UnsolicitedGrant> out;
  for (auto& [cid, e] : entries_) {
    if (requires_request(e.info.cls) != RequestMode::unsolicited) {
      continue;
    }
    std::uint64_t bytes = 0;
    while (e.next_grant <= now) {
      bytes += unsolicited_size(e);
      e.next_grant += e.flow.grant_interval;
    }
    if (bytes > 0) {
      e.unsolicited += bytes;
      out.push_back(UnsolicitedGrant{cid, e.info.src, bytes});
    }
  }
  return out;
}

std::vector<MapIE> GrantLedger::poll_flows(SimTime now, std::uint64_t max_bytes) {
  std::vector<MapIE> out;
  std::uint64_t used = 0;
  for (auto& [cid, e] : entries_) {
    if (requires_request(e.info.cls) != RequestMode::poll) {
      continue;
    }
    if (e.next_poll > now) {
      continue;
    }
    if (used + params_.poll_bytes > max_bytes) {
      continue;
    }
    const SimTime interval =
        e.info.cls == SchedulingClass::rtps ? params_.rtps_poll_interval : params_.nrtps_poll_interval;
    while (e.next_poll <= now) {
      e.next_poll += interval;
    }
    used += params_.poll_bytes;
    out.push_back(MapIE{cid, e.info.src, 0, params_.poll_bytes, GrantKind::unicast_poll});
  }
  return out;
}

void GrantLedger::on_request(const BwRequest& request) {
  auto& e = entry(request.cid);
  if (requires_request(e.info.cls) == RequestMode::unsolicited) {
    throw InvariantViolation("bandwidth request on unsolicited-grant connection " + std::to_string(request.cid));
  }
  std::vector<QueuedPacket> chunks;
  chunks.reserve(request.packet_sizes.size());
  std::uint64_t total = 0;
  for (auto size : request.packet_sizes) {
    chunks.push_back(QueuedPacket{e.next_chunk_id++, size, request.issued_at, Rational()});
    total += size;
  }
  if (total != request.bytes_requested) {
    throw InvariantViolation("bandwidth request size mismatch on cid " + std::to_string(request.cid));
  }
  scheduler_->replace_backlog(request.cid, chunks);
  e.requested += request.bytes_requested;
  ++request_count_;
}

void GrantLedger::adjust_ertps(Cid cid, std::uint64_t rate_bps) {
  auto& e = entry(cid);
  if (e.info.cls != SchedulingClass::ertps) {
    throw InvariantViolation("rate adjustment on non-ertPS connection " + std::to_string(cid));
  }
  e.ertps_rate_bps = rate_bps;
}

std::vector<ServiceDecision> GrantLedger::select_data_grants(std::uint64_t budget) {
  auto decisions = scheduler_->select(budget);
  for (const auto& d : decisions) {
    entry(d.cid).granted += d.bytes;
  }
  return decisions;
}

std::uint64_t GrantLedger::outstanding_bytes(Cid cid) const {
  const auto& e = entry(cid);
  if (requires_request(e.info.cls) == RequestMode::unsolicited) {
    return 0;
  }
  return scheduler_->queue(cid).backlog_bytes;
}

std::uint64_t GrantLedger::requested_bytes(Cid cid) const { return entry(cid).requested; }
std::uint64_t GrantLedger::granted_bytes(Cid cid) const { return entry(cid).granted; }
std::uint64_t GrantLedger::unsolicited_bytes(Cid cid) const { return entry(cid).unsolicited; }
std::uint64_t GrantLedger::ertps_rate(Cid cid) const { return entry(cid).ertps_rate_bps; }
StationId GrantLedger::station_of(Cid cid) const { return entry(cid).info.src; }

bool GrantLedger::is_unsolicited(Cid cid) const {
  return requires_request(entry(cid).info.cls) == RequestMode::unsolicited;
}

std::uint64_t GrantLedger::peak_unsolicited_bytes_per_frame() const {
  std::uint64_t total = 0;
  for (const auto& [cid, e] : entries_) {
    if (requires_request(e.info.cls) == RequestMode::unsolicited) {
      Entry peak = e;
      peak.ertps_rate_bps = std::max(e.flow.min_reserved_rate_bps, e.flow.max_sustained_rate_bps);
      total += unsolicited_size(peak);
    }
  }
  return total;
}

UlMap build_ul_map(GrantLedger& ledger, const FrameConfig& cfg, std::uint64_t frame_index) {
  const std::uint64_t capacity = subframe_capacity_bytes(cfg, Direction::uplink);
  const SimTime now = frame_boundaries(cfg, frame_index).frame_start;
  const auto& params = ledger.params();

  UlMap map;
  map.frame_index = frame_index;

  const auto unsolicited = ledger.issue_unsolicited(now);
  std::uint64_t offset = 0;
  for (const auto& g : unsolicited) {
    map.ies.push_back(MapIE{g.cid, g.ss, offset, g.bytes, GrantKind::data_grant});
    offset += g.bytes;
  }
  if (offset > capacity) {
    throw OversubscribedUgsError("frame " + std::to_string(frame_index) + ": unsolicited grants need " +
                                 std::to_string(offset) + " bytes, uplink capacity is " + std::to_string(capacity));
  }

  const std::uint64_t reserve =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(params.min_contention_slots) * params.request_slot_bytes,
                              capacity - offset);
  std::uint64_t available = capacity - offset - reserve;

  for (auto ie : ledger.poll_flows(now, available)) {
    ie.offset_bytes = offset;
    offset += ie.grant_bytes;
    available -= ie.grant_bytes;
    map.ies.push_back(ie);
  }

  for (const auto& d : ledger.select_data_grants(available)) {
    map.ies.push_back(MapIE{d.cid, ledger.station_of(d.cid), offset, d.bytes, GrantKind::data_grant});
    offset += d.bytes;
  }

  map.contention_offset = offset;
  map.contention_bytes = capacity - offset;
  return map;
}

} // namespace wimax
