#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "wimax/bwreq.hpp"
#include "wimax/metrics.hpp"
#include "wimax/phy_frame.hpp"
#include "wimax/scenario.hpp"
#include "wimax/scheduler.hpp"
#include "wimax/service_flow.hpp"
#include "wimax/sim_kernel.hpp"

namespace wimax {

/// One entry of the air-interface audit log.
struct TransmissionRecord {
  enum class Kind : std::uint8_t { map, data, poll_response, contention_request };

  std::uint64_t frame_index = 0;
  Direction direction = Direction::downlink;
  Kind kind = Kind::data;
  Cid cid = 0;
  StationId station = 0; // transmitter
  std::uint64_t offset_bytes = 0;
  std::uint64_t bytes = 0;
  SimTime start;
  SimTime end;
};

const char* to_string(TransmissionRecord::Kind kind);

/// An SDU leaving a station, with the instant its last bit is on the air.
struct SduInFlight {
  MacSdu sdu;
  SimTime completes_at;
};

/// A request and the instant it reaches the BS.
struct RequestInFlight {
  BwRequest request;
  SimTime arrives_at;
};

struct ErtpsUpdate {
  Cid cid = 0;
  std::uint64_t rate_bps = 0;
  SimTime arrives_at;
};

/// Output of one station's turn in a frame.
struct FrameOutput {
  std::vector<TransmissionRecord> records;
  std::vector<SduInFlight> sdus;
  std::vector<RequestInFlight> requests;
  std::vector<ErtpsUpdate> ertps_updates;
  std::uint64_t unused_grant_bytes = 0;
  std::uint64_t protocol_errors = 0;
};

class BaseStation {
public:
  BaseStation(const Scenario& scenario);

  void add_uplink(const ConnectionInfo& info, const ServiceFlow& flow, std::uint32_t quantum);
  void add_downlink(const ConnectionInfo& info, const ServiceFlow& flow, std::uint32_t quantum);

  struct Tick {
    DlSchedule dl;
    UlMap ul;
    FrameOutput out;
  };
  /// DL selection over the DL capacity left after MAP overhead, then the UL-MAP.
  Tick frame_tick(std::uint64_t frame_index);

  /// Enqueues an uplink-received SDU on the downlink connection `dl_cid`.
  /// Returns false on a drop.
  bool relay(const MacSdu& sdu, Cid dl_cid);

  void on_request(const BwRequest& request) { ledger_.on_request(request); }
  void on_ertps_update(Cid cid, std::uint64_t rate_bps) { ledger_.adjust_ertps(cid, rate_bps); }

  GrantLedger& ledger() { return ledger_; }
  const GrantLedger& ledger() const { return ledger_; }
  const Scheduler& dl_scheduler() const { return *dl_scheduler_; }
  const std::map<Cid, Connection>& dl_queues() const { return dl_queues_; }

  std::uint64_t iface_recv_bytes() const { return iface_recv_bytes_; }
  std::uint64_t iface_sent_bytes() const { return iface_sent_bytes_; }
  void count_iface_recv(std::uint64_t bytes) { iface_recv_bytes_ += bytes; }

private:
  FrameConfig cfg_;
  Rational map_overhead_;
  std::size_t queue_capacity_;
  std::unique_ptr<Scheduler> dl_scheduler_;
  GrantLedger ledger_;
  std::map<Cid, Connection> dl_queues_;
  std::uint64_t iface_recv_bytes_ = 0;
  std::uint64_t iface_sent_bytes_ = 0;
};

class SubscriberStation {
public:
  SubscriberStation(StationId id, const Scenario& scenario);

  StationId id() const { return id_; }

  void add_connection(const ConnectionInfo& info, const ServiceFlow& flow, std::uint32_t quantum);
  bool has_connection(Cid cid) const { return queues_.contains(cid); }

  /// Returns false on a drop.
  bool enqueue(const MacSdu& sdu);

  /// Consumes this station's IEs of `map`: data grants are filled by the local
  /// scheduler (dedicated grants first serve their own connection), polls
  /// answered with aggregate requests, then piggybacked requests and ertPS
  /// rate changes.
  FrameOutput on_map(const UlMap& map, SimTime ul_start);

  /// Arms the contention state when a contention-class connection has backlog
  /// nobody asked for yet. The pending request is refreshed to the current
  /// backlog and dropped if the backlog drained.
  void prepare_contention(SimTime now, RandomSource& rng);
  void on_contention_delivered(Cid cid) { awaiting_grant_.insert(cid); }

  ContentionState& contention() { return contention_; }
  const ContentionState& contention() const { return contention_; }
  const Scheduler& local_scheduler() const { return *local_; }
  const std::map<Cid, Connection>& queues() const { return queues_; }

  std::uint64_t iface_sent_bytes() const { return iface_sent_bytes_; }

private:
  struct Conn {
    ServiceFlow flow;
    SimTime last_arrival = SimTime::micros(-1);
    std::uint64_t reported_rate = 0;
  };

  void transmit(Cid cid, const std::vector<PacketId>& ids, std::uint64_t& offset, SimTime ul_start,
                std::uint64_t frame_index, FrameOutput& out);
  bool contends(const ServiceFlow& flow) const;

  StationId id_;
  FrameConfig cfg_;
  BwReqParams params_;
  std::size_t queue_capacity_;
  std::unique_ptr<Scheduler> local_;
  std::map<Cid, Connection> queues_;
  std::map<Cid, Conn> conns_;
  std::set<Cid> awaiting_grant_;
  ContentionState contention_;
  std::uint64_t iface_sent_bytes_ = 0;
};

struct FlowAccount {
  std::uint64_t generated_bytes = 0;
  std::uint64_t generated_packets = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t delivered_packets = 0;
  std::uint64_t dropped_bytes = 0;
  std::uint64_t dropped_packets = 0;
  std::uint64_t in_flight_bytes = 0;
};

struct ConservationLine {
  Cid flow_cid = 0; // 0 for the cell-wide line
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t queued = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t dropped = 0;

  bool balanced() const { return generated == delivered + queued + in_flight + dropped; }
};

/// Observer hooks for tests and tooling. All optional.
struct CellObservers {
  std::function<void(const UlMap&)> on_ul_map;
  std::function<void(const DlSchedule&)> on_dl_schedule;
  std::function<void(const TransmissionRecord&)> on_transmission;
  std::function<void(const MacSdu&)> on_delivery;
};

/// One BS and its subscriber stations driven by the event kernel. Every
/// uplink flow is relayed by the BS onto a downlink connection to its
/// destination (packets addressed to the BS itself end there).
class Cell {
public:
  explicit Cell(Scenario scenario, CellObservers observers = {});

  Cell(const Cell&) = delete;
  Cell& operator=(const Cell&) = delete;

  /// Runs to the scenario duration, then audits conservation. Throws
  /// InvariantViolation when an invariant breaks.
  void run();

  const Scenario& scenario() const { return scenario_; }
  const FlowTable& flows() const { return table_; }
  const MetricsCollector& metrics() const { return metrics_; }
  const BaseStation& base_station() const { return bs_; }
  const SubscriberStation& subscriber(StationId id) const { return *ss_.at(id - 1); }
  const Simulator& simulator() const { return sim_; }

  /// Uplink CID carrying the flow at `index` in the scenario.
  Cid uplink_cid(std::size_t index) const { return uplink_cids_.at(index); }
  std::optional<Cid> downlink_cid(Cid uplink) const;

  std::vector<ConservationLine> conservation() const;
  std::uint64_t frames_started() const { return frames_started_; }

private:
  void schedule_arrival(std::size_t flow_index);
  void on_frame_start(std::uint64_t n);
  void on_ul_subframe(std::uint64_t n, const UlMap& map);
  void on_bs_receive(MacSdu sdu);
  void on_deliver(MacSdu sdu);
  void note(const TransmissionRecord& r);
  /// Events past the end of the run are dropped; the caller keeps accounting.
  bool schedule_before_end(SimTime at, EventKind kind, Simulator::Action action);

  Scenario scenario_;
  CellObservers observers_;
  Simulator sim_;
  FlowTable table_;
  BaseStation bs_;
  std::vector<std::unique_ptr<SubscriberStation>> ss_;
  std::vector<TrafficGenerator> generators_;
  std::vector<Cid> uplink_cids_;
  std::map<Cid, Cid> relay_cid_;
  std::map<Cid, FlowAccount> accounts_;
  MetricsCollector metrics_;
  PacketId next_packet_id_ = 1;
  std::uint64_t frames_started_ = 0;
};

} // namespace wimax
