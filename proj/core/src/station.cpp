#include "wimax/station.hpp"

#include <algorithm>
#include <string>

namespace wimax {
namespace {

std::uint64_t ceil_fraction(const Rational& r, std::uint64_t k) {
  const auto num = static_cast<unsigned __int128>(r.num()) * k;
  const auto den = static_cast<unsigned __int128>(r.den());
  return static_cast<std::uint64_t>((num + den - 1) / den);
}

std::vector<Cid> sequential_cids(std::size_t n) {
  std::vector<Cid> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(static_cast<Cid>(i + 1));
  }
  return out;
}

} // namespace

const char* to_string(TransmissionRecord::Kind kind) {
  switch (kind) {
  case TransmissionRecord::Kind::map: return "map";
  case TransmissionRecord::Kind::data: return "data";
  case TransmissionRecord::Kind::poll_response: return "poll-response";
  case TransmissionRecord::Kind::contention_request: return "contention-request";
  }
  return "unknown";
}

// --- base station ------------------------------------------------------------

BaseStation::BaseStation(const Scenario& scenario)
    : cfg_(scenario.frame),
      map_overhead_(scenario.stations.map_overhead),
      queue_capacity_(scenario.stations.queue_capacity_packets),
      dl_scheduler_(make_scheduler(scenario.scheduler_bs)),
      ledger_(scenario.scheduler_bs, scenario.bwreq) {}

void BaseStation::add_uplink(const ConnectionInfo& info, const ServiceFlow& flow, std::uint32_t quantum) {
  ledger_.register_connection(info, flow, quantum);
}

void BaseStation::add_downlink(const ConnectionInfo& info, const ServiceFlow& flow, std::uint32_t quantum) {
  dl_queues_.emplace(info.cid, Connection(info, queue_capacity_));
  dl_scheduler_->add_queue(QueueParams{info.cid, flow.weight, quantum});
}

BaseStation::Tick BaseStation::frame_tick(std::uint64_t frame_index) {
  Tick t;
  const auto fb = frame_boundaries(cfg_, frame_index);
  const std::uint64_t capacity = subframe_capacity_bytes(cfg_, Direction::downlink);
  const std::uint64_t overhead = std::min(capacity, ceil_fraction(map_overhead_, capacity));

  t.dl.frame_index = frame_index;
  t.dl.map_overhead_bytes = overhead;
  if (overhead > 0) {
    t.out.records.push_back({frame_index, Direction::downlink, TransmissionRecord::Kind::map, 0, kBaseStation, 0,
                             overhead, fb.dl_start, fb.dl_start + air_time(cfg_, overhead)});
  }

  std::uint64_t offset = overhead;
  for (const auto& d : dl_scheduler_->select(capacity - overhead)) {
    auto& q = dl_queues_.at(d.cid);
    DlBurst burst{d.cid, q.info().dst, offset, d.bytes, d.packet_ids};
    for (PacketId id : d.packet_ids) {
      MacSdu sdu = q.pop_front();
      if (sdu.id != id) {
        throw InvariantViolation("downlink queue " + std::to_string(d.cid) + " out of step with its scheduler");
      }
      offset += sdu.size_bytes;
      t.out.sdus.push_back({std::move(sdu), fb.dl_start + air_time(cfg_, offset)});
    }
    t.out.records.push_back({frame_index, Direction::downlink, TransmissionRecord::Kind::data, d.cid, kBaseStation,
                             burst.offset_bytes, burst.bytes, fb.dl_start + air_time(cfg_, burst.offset_bytes),
                             fb.dl_start + air_time(cfg_, burst.offset_bytes + burst.bytes)});
    t.dl.bursts.push_back(std::move(burst));
  }

  t.ul = build_ul_map(ledger_, cfg_, frame_index);
  return t;
}

bool BaseStation::relay(const MacSdu& sdu, Cid dl_cid) {
  auto& q = dl_queues_.at(dl_cid);
  if (!q.enqueue(sdu)) {
    return false;
  }
  dl_scheduler_->enqueue(dl_cid, sdu.id, sdu.size_bytes, sdu.bs_received_at.value_or(sdu.created_at));
  iface_sent_bytes_ += sdu.size_bytes;
  return true;
}

// --- subscriber station ------------------------------------------------------

SubscriberStation::SubscriberStation(StationId id, const Scenario& scenario)
    : id_(id),
      cfg_(scenario.frame),
      params_(scenario.bwreq),
      queue_capacity_(scenario.stations.queue_capacity_packets),
      local_(make_scheduler(scenario.scheduler_ss)),
      contention_(ContentionState::with_bounds(scenario.bwreq.min_window, scenario.bwreq.max_window)) {}

void SubscriberStation::add_connection(const ConnectionInfo& info, const ServiceFlow& flow, std::uint32_t quantum) {
  if (info.src != id_) {
    throw ConfigError("connection " + std::to_string(info.cid) + " does not start at SS" + std::to_string(id_));
  }
  queues_.emplace(info.cid, Connection(info, queue_capacity_));
  conns_.emplace(info.cid, Conn{flow, SimTime::micros(-1), flow.min_reserved_rate_bps});
  local_->add_queue(QueueParams{info.cid, flow.weight, quantum});
}

bool SubscriberStation::enqueue(const MacSdu& sdu) {
  auto& q = queues_.at(sdu.flow_cid);
  conns_.at(sdu.flow_cid).last_arrival = sdu.created_at;
  if (!q.enqueue(sdu)) {
    return false;
  }
  local_->enqueue(sdu.flow_cid, sdu.id, sdu.size_bytes, sdu.created_at);
  return true;
}

bool SubscriberStation::contends(const ServiceFlow& flow) const {
  const auto mode = requires_request(flow.cls);
  return mode == RequestMode::contention || (flow.cls == SchedulingClass::nrtps && params_.nrtps_contention);
}

void SubscriberStation::transmit(Cid cid, const std::vector<PacketId>& ids, std::uint64_t& offset, SimTime ul_start,
                                 std::uint64_t frame_index, FrameOutput& out) {
  if (ids.empty()) {
    return;
  }
  auto& q = queues_.at(cid);
  const std::uint64_t first = offset;
  for (PacketId id : ids) {
    MacSdu sdu = q.pop_front();
    if (sdu.id != id) {
      throw InvariantViolation("SS" + std::to_string(id_) + " queue " + std::to_string(cid) +
                               " out of step with its scheduler");
    }
    offset += sdu.size_bytes;
    iface_sent_bytes_ += sdu.size_bytes;
    out.sdus.push_back({std::move(sdu), ul_start + air_time(cfg_, offset)});
  }
  out.records.push_back({frame_index, Direction::uplink, TransmissionRecord::Kind::data, cid, id_, first,
                         offset - first, ul_start + air_time(cfg_, first), ul_start + air_time(cfg_, offset)});
}

FrameOutput SubscriberStation::on_map(const UlMap& map, SimTime ul_start) {
  FrameOutput out;
  const auto n = map.frame_index;
  std::vector<const MapIE*> polls;
  std::map<Cid, SimTime> dedicated_end;
  std::optional<SimTime> last_data_end;

  for (const auto& ie : map.ies) {
    if (ie.ss_id != id_) {
      continue;
    }
    if (!has_connection(ie.cid) || ie.grant_kind == GrantKind::contention_window) {
      ++out.protocol_errors;
      out.unused_grant_bytes += ie.grant_bytes;
      continue;
    }
    if (ie.grant_kind == GrantKind::unicast_poll) {
      polls.push_back(&ie);
      continue;
    }
    std::uint64_t offset = ie.offset_bytes;
    const auto& conn = conns_.at(ie.cid);
    if (requires_request(conn.flow.cls) == RequestMode::unsolicited) {
      std::vector<PacketId> ids;
      for (const auto& p : local_->take_from(ie.cid, ie.grant_bytes)) {
        ids.push_back(p.id);
      }
      transmit(ie.cid, ids, offset, ul_start, n, out);
      dedicated_end[ie.cid] = ul_start + air_time(cfg_, ie.end());
    }
    for (const auto& d : local_->select(ie.end() - offset)) {
      transmit(d.cid, d.packet_ids, offset, ul_start, n, out);
    }
    out.unused_grant_bytes += ie.end() - offset;
    if (offset > ie.offset_bytes) {
      last_data_end = std::max(last_data_end.value_or(SimTime{}), ul_start + air_time(cfg_, offset));
    }
    awaiting_grant_.erase(ie.cid);
  }

  std::set<Cid> answered;
  for (const MapIE* ie : polls) {
    const SimTime start = ul_start + air_time(cfg_, ie->offset_bytes);
    const SimTime end = ul_start + air_time(cfg_, ie->end());
    auto req = make_request(queues_.at(ie->cid), start, RequestOrigin::poll_response);
    if (!req) {
      out.unused_grant_bytes += ie->grant_bytes;
      continue;
    }
    out.records.push_back({n, Direction::uplink, TransmissionRecord::Kind::poll_response, ie->cid, id_,
                           ie->offset_bytes, ie->grant_bytes, start, end});
    out.requests.push_back({std::move(*req), end});
    answered.insert(ie->cid);
  }

  if (params_.piggyback && last_data_end) {
    for (const auto& [cid, conn] : conns_) {
      if (requires_request(conn.flow.cls) == RequestMode::unsolicited || answered.contains(cid)) {
        continue;
      }
      if (auto req = make_request(queues_.at(cid), *last_data_end, RequestOrigin::piggyback)) {
        out.requests.push_back({std::move(*req), *last_data_end});
        awaiting_grant_.insert(cid);
      }
    }
  }

  // ertPS: ask for the reserved rate while the source is talking, for the
  // minimal keep-alive grant once it has gone quiet for two grant periods.
  for (auto& [cid, conn] : conns_) {
    if (conn.flow.cls != SchedulingClass::ertps) {
      continue;
    }
    auto slot = dedicated_end.find(cid);
    if (slot == dedicated_end.end()) {
      continue;
    }
    const bool active = !queues_.at(cid).empty() ||
                        (conn.last_arrival >= SimTime{} && ul_start - conn.last_arrival <= conn.flow.grant_interval * 2);
    const std::uint64_t desired = active ? conn.flow.min_reserved_rate_bps : 0;
    if (desired != conn.reported_rate) {
      out.ertps_updates.push_back({cid, desired, slot->second});
      conn.reported_rate = desired;
    }
  }
  return out;
}

void SubscriberStation::prepare_contention(SimTime now, RandomSource& rng) {
  if (contention_.pending) {
    const Cid cid = contention_.pending->cid;
    auto fresh = make_request(queues_.at(cid), now, RequestOrigin::contention);
    if (!fresh || awaiting_grant_.contains(cid)) {
      contention_.pending.reset();
    } else {
      contention_.pending = std::move(*fresh);
    }
    return;
  }
  for (const auto& [cid, conn] : conns_) {
    if (!contends(conn.flow) || awaiting_grant_.contains(cid)) {
      continue;
    }
    if (auto req = make_request(queues_.at(cid), now, RequestOrigin::contention)) {
      contention_.arm(std::move(*req), rng);
      return;
    }
  }
}

// --- cell --------------------------------------------------------------------

Cell::Cell(Scenario scenario, CellObservers observers)
    : scenario_((validate(scenario), std::move(scenario))),
      observers_(std::move(observers)),
      sim_(scenario_.seed),
      bs_(scenario_),
      metrics_(scenario_.bucket_width, scenario_.duration, scenario_.stations.subscriber_count,
               sequential_cids(scenario_.flows.size())) {
  const auto& flows = scenario_.flows;
  std::vector<ServiceFlow> ul_flows;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const auto& g = flows[i].generator;
    auto flow = resolve_service_flow(flows[i], Direction::uplink);
    flow.sfid = static_cast<Sfid>(i + 1);
    uplink_cids_.push_back(table_.add(flow, FlowKey{g.src, g.dst, g.kind, Direction::uplink}));
    ul_flows.push_back(flow);
  }
  if (uplink_cids_ != sequential_cids(flows.size())) {
    throw InvariantViolation("flow table handed out unexpected CIDs");
  }
  for (StationId id = 1; id <= scenario_.stations.subscriber_count; ++id) {
    ss_.push_back(std::make_unique<SubscriberStation>(id, scenario_));
  }
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const auto& g = flows[i].generator;
    const Cid ul = uplink_cids_[i];
    const auto quantum = quantum_of(scenario_, flows[i]);
    bs_.add_uplink(table_.connection(ul), ul_flows[i], quantum);
    ss_.at(g.src - 1)->add_connection(table_.connection(ul), ul_flows[i], quantum);
    accounts_[ul] = {};
    generators_.emplace_back(g);
    if (g.dst == kBaseStation) {
      continue;
    }
    auto dl_flow = resolve_service_flow(flows[i], Direction::downlink);
    dl_flow.sfid = static_cast<Sfid>(flows.size() + i + 1);
    const Cid dl = table_.add(dl_flow, FlowKey{g.src, g.dst, g.kind, Direction::downlink});
    bs_.add_downlink(table_.connection(dl), dl_flow, quantum);
    relay_cid_[ul] = dl;
  }
}

std::optional<Cid> Cell::downlink_cid(Cid uplink) const {
  auto it = relay_cid_.find(uplink);
  if (it == relay_cid_.end()) {
    return std::nullopt;
  }
  return it->second;
}

bool Cell::schedule_before_end(SimTime at, EventKind kind, Simulator::Action action) {
  if (at >= scenario_.duration) {
    return false;
  }
  sim_.schedule(at, kind, std::move(action));
  return true;
}

void Cell::note(const TransmissionRecord& r) {
  const auto& cfg = scenario_.frame;
  const auto fb = frame_boundaries(cfg, r.frame_index);
  const bool dl = r.direction == Direction::downlink;
  const SimTime lo = dl ? fb.dl_start : fb.ul_start;
  const SimTime hi = dl ? fb.dl_end(cfg) : fb.ul_end(cfg);
  if (r.start < lo || r.end > hi || r.end < r.start) {
    throw InvariantViolation(std::string(to_string(r.direction)) + " transmission [" + to_string(r.start) + ", " +
                             to_string(r.end) + ") leaves its subframe in frame " + std::to_string(r.frame_index));
  }
  if (observers_.on_transmission) {
    observers_.on_transmission(r);
  }
}

void Cell::schedule_arrival(std::size_t flow_index) {
  auto emission = generators_[flow_index].next_emission(sim_.rng());
  if (!emission) {
    return;
  }
  const std::uint32_t size = emission->size_bytes;
  schedule_before_end(emission->time, EventKind::packet_arrival, [this, flow_index, size] {
    const auto& g = generators_[flow_index].spec();
    const auto cid = table_.classify(FlowKey{g.src, g.dst, g.kind, Direction::uplink});
    if (!cid) {
      ++metrics_.counters().unclassified_drops;
    } else {
      auto& account = accounts_.at(*cid);
      for (auto part : segment(size, g.params.mtu_bytes)) {
        MacSdu sdu;
        sdu.id = next_packet_id_++;
        sdu.flow_cid = *cid;
        sdu.src = g.src;
        sdu.dst = g.dst;
        sdu.size_bytes = part;
        sdu.created_at = sim_.now();
        account.generated_bytes += part;
        ++account.generated_packets;
        metrics_.record_offered(sdu);
        if (!ss_.at(g.src - 1)->enqueue(sdu)) {
          account.dropped_bytes += part;
          ++account.dropped_packets;
          ++metrics_.counters().dropped_packets;
          metrics_.counters().dropped_bytes += part;
        }
      }
    }
    schedule_arrival(flow_index);
  });
}

void Cell::on_frame_start(std::uint64_t n) {
  ++frames_started_;
  const auto& cfg = scenario_.frame;
  const auto fb = frame_boundaries(cfg, n);
  auto tick = bs_.frame_tick(n);
  if (auto v = validate_map(tick.ul, cfg)) {
    throw InvariantViolation("frame " + std::to_string(n) + " UL-MAP " + to_string(v->kind) + ": " + v->detail);
  }
  if (tick.dl.used_bytes() > subframe_capacity_bytes(cfg, Direction::downlink)) {
    throw InvariantViolation("frame " + std::to_string(n) + " downlink over capacity");
  }
  if (observers_.on_dl_schedule) {
    observers_.on_dl_schedule(tick.dl);
  }
  if (observers_.on_ul_map) {
    observers_.on_ul_map(tick.ul);
  }
  for (const auto& r : tick.out.records) {
    note(r);
  }
  for (auto& s : tick.out.sdus) {
    accounts_.at(s.sdu.flow_cid).in_flight_bytes += s.sdu.size_bytes;
    schedule_before_end(s.completes_at, EventKind::packet_arrival,
                        [this, sdu = std::move(s.sdu)]() mutable { on_deliver(std::move(sdu)); });
  }
  schedule_before_end(fb.ul_start, EventKind::ul_subframe_start,
                      [this, n, map = std::move(tick.ul)] { on_ul_subframe(n, map); });
  schedule_before_end(fb.frame_end, EventKind::frame_start, [this, n] { on_frame_start(n + 1); });
}

void Cell::on_ul_subframe(std::uint64_t n, const UlMap& map) {
  const auto& cfg = scenario_.frame;
  const SimTime ul_start = sim_.now();
  std::uint64_t ul_bytes = 0;

  for (auto& ss : ss_) {
    auto out = ss->on_map(map, ul_start);
    metrics_.counters().unused_grant_bytes += out.unused_grant_bytes;
    metrics_.counters().protocol_errors += out.protocol_errors;
    for (const auto& r : out.records) {
      // Grant compliance: each uplink burst sits inside one IE for its sender.
      const bool granted = std::any_of(map.ies.begin(), map.ies.end(), [&](const MapIE& ie) {
        return ie.ss_id == r.station && ie.offset_bytes <= r.offset_bytes && r.offset_bytes + r.bytes <= ie.end();
      });
      if (!granted) {
        throw InvariantViolation("SS" + std::to_string(r.station) + " transmitted outside its grants in frame " +
                                 std::to_string(n));
      }
      ul_bytes += r.bytes;
      note(r);
    }
    for (auto& s : out.sdus) {
      accounts_.at(s.sdu.flow_cid).in_flight_bytes += s.sdu.size_bytes;
      schedule_before_end(s.completes_at, EventKind::packet_arrival,
                          [this, sdu = std::move(s.sdu)]() mutable { on_bs_receive(std::move(sdu)); });
    }
    for (auto& r : out.requests) {
      schedule_before_end(r.arrives_at, EventKind::grant_fire,
                          [this, req = std::move(r.request)] { bs_.on_request(req); });
    }
    for (const auto& u : out.ertps_updates) {
      schedule_before_end(u.arrives_at, EventKind::grant_fire,
                          [this, u] { bs_.on_ertps_update(u.cid, u.rate_bps); });
    }
  }

  // Contention region.
  const auto& params = scenario_.bwreq;
  const auto slots = static_cast<std::uint32_t>(map.contention_bytes / params.request_slot_bytes);
  std::vector<ContentionState> states;
  for (auto& ss : ss_) {
    ss->prepare_contention(ul_start, sim_.rng());
    states.push_back(ss->contention());
  }
  const auto outcome = run_contention(states, slots, sim_.rng());
  for (std::size_t i = 0; i < ss_.size(); ++i) {
    ss_[i]->contention() = std::move(states[i]);
  }
  const auto slot_record = [&](std::size_t station_index, std::uint32_t slot, Cid cid) {
    const std::uint64_t offset = map.contention_offset + static_cast<std::uint64_t>(slot) * params.request_slot_bytes;
    TransmissionRecord r{n,
                         Direction::uplink,
                         TransmissionRecord::Kind::contention_request,
                         cid,
                         ss_[station_index]->id(),
                         offset,
                         params.request_slot_bytes,
                         ul_start + air_time(cfg, offset),
                         ul_start + air_time(cfg, offset + params.request_slot_bytes)};
    note(r);
    return r.end;
  };
  for (const auto& c : outcome.collided) {
    slot_record(c.station_index, c.slot, c.cid);
  }
  metrics_.counters().collisions += outcome.collided.size();
  for (const auto& d : outcome.delivered) {
    const SimTime end = slot_record(d.station_index, d.slot, d.request.cid);
    ss_[d.station_index]->on_contention_delivered(d.request.cid);
    schedule_before_end(end, EventKind::grant_fire, [this, req = d.request] { bs_.on_request(req); });
  }

  if (ul_bytes > subframe_capacity_bytes(cfg, Direction::uplink)) {
    throw InvariantViolation("frame " + std::to_string(n) + " uplink over capacity");
  }
}

void Cell::on_bs_receive(MacSdu sdu) {
  auto& account = accounts_.at(sdu.flow_cid);
  account.in_flight_bytes -= sdu.size_bytes;
  sdu.bs_received_at = sim_.now();
  metrics_.record_bs_reception(sdu);
  bs_.count_iface_recv(sdu.size_bytes);
  if (sdu.dst == kBaseStation) {
    account.in_flight_bytes += sdu.size_bytes;
    on_deliver(std::move(sdu));
    return;
  }
  const Cid dl = relay_cid_.at(sdu.flow_cid);
  if (bs_.relay(sdu, dl)) {
    metrics_.record_relay_enqueued(sdu, sim_.now());
    return;
  }
  account.dropped_bytes += sdu.size_bytes;
  ++account.dropped_packets;
  ++metrics_.counters().dropped_packets;
  metrics_.counters().dropped_bytes += sdu.size_bytes;
}

void Cell::on_deliver(MacSdu sdu) {
  auto& account = accounts_.at(sdu.flow_cid);
  account.in_flight_bytes -= sdu.size_bytes;
  sdu.delivered_at = sim_.now();
  account.delivered_bytes += sdu.size_bytes;
  ++account.delivered_packets;
  metrics_.record_delivery(sdu);
  if (observers_.on_delivery) {
    observers_.on_delivery(sdu);
  }
}

std::vector<ConservationLine> Cell::conservation() const {
  std::map<Cid, std::uint64_t> queued;
  for (const auto& ss : ss_) {
    for (const auto& [cid, q] : ss->queues()) {
      for (const auto& sdu : q.queue()) {
        queued[sdu.flow_cid] += sdu.size_bytes;
      }
    }
  }
  for (const auto& [cid, q] : bs_.dl_queues()) {
    for (const auto& sdu : q.queue()) {
      queued[sdu.flow_cid] += sdu.size_bytes;
    }
  }
  std::vector<ConservationLine> out;
  ConservationLine cell;
  for (const auto& [cid, a] : accounts_) {
    ConservationLine l{cid, a.generated_bytes, a.delivered_bytes, queued[cid], a.in_flight_bytes, a.dropped_bytes};
    cell.generated += l.generated;
    cell.delivered += l.delivered;
    cell.queued += l.queued;
    cell.in_flight += l.in_flight;
    cell.dropped += l.dropped;
    out.push_back(l);
  }
  out.insert(out.begin(), cell);
  return out;
}

void Cell::run() {
  sim_.schedule(SimTime{}, EventKind::frame_start, [this] { on_frame_start(0); });
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    schedule_arrival(i);
  }
  sim_.run_until(scenario_.duration);
  metrics_.counters().unclassified_drops += table_.unclassified_drops();
  metrics_.counters().bandwidth_requests = bs_.ledger().request_count();
  for (const auto& l : conservation()) {
    if (!l.balanced()) {
      const std::string who = l.flow_cid == 0 ? "cell" : "flow " + std::to_string(l.flow_cid);
      throw InvariantViolation("conservation audit failed for " + who + ": generated " + std::to_string(l.generated) +
                               " != delivered " + std::to_string(l.delivered) + " + queued " +
                               std::to_string(l.queued) + " + in flight " + std::to_string(l.in_flight) +
                               " + dropped " + std::to_string(l.dropped));
    }
  }
}

} // namespace wimax
