#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "wimax/sim_kernel.hpp"
#include "wimax/types.hpp"

namespace wimax {

enum class SchedulingClass : std::uint8_t { ugs, rtps, ertps, nrtps, be };

inline constexpr std::array<SchedulingClass, 5> kAllSchedulingClasses{
    SchedulingClass::ugs, SchedulingClass::rtps, SchedulingClass::ertps, SchedulingClass::nrtps,
    SchedulingClass::be};

const char* to_string(SchedulingClass c);
/// Case-insensitive: "UGS", "rtPS", "ertps", ...
std::optional<SchedulingClass> parse_scheduling_class(std::string_view text);

/// How a connection of a given class obtains uplink bandwidth.
enum class RequestMode : std::uint8_t { unsolicited, poll, contention };
const char* to_string(RequestMode m);

RequestMode requires_request(SchedulingClass c);

enum class TrafficType : std::uint8_t { ftp, video, http, voip_silence, voice };
const char* to_string(TrafficType t);
std::optional<TrafficType> parse_traffic_type(std::string_view text);

/// voice->UGS, video->rtPS, voip_silence->ertPS, ftp->nrtPS, http->BE.
SchedulingClass default_class(TrafficType t);

struct ServiceFlow {
  Sfid sfid = 0;
  Direction direction = Direction::uplink;
  SchedulingClass cls = SchedulingClass::be;
  std::uint64_t min_reserved_rate_bps = 0;
  std::uint64_t max_sustained_rate_bps = 0;
  std::optional<std::int64_t> max_latency_us;
  SimTime grant_interval = SimTime::micros(12500);
  std::uint32_t weight = 1;
  /// Largest SDU the flow carries; unsolicited grants are whole multiples of it.
  std::uint32_t sdu_size = 1500;
};

/// Throws ConfigError naming the broken constraint.
void validate(const ServiceFlow& flow);

struct MacSdu {
  PacketId id = 0;
  /// Uplink connection the SDU was classified onto; stays fixed across the relay.
  Cid flow_cid = 0;
  StationId src = 0;
  StationId dst = 0;
  std::uint32_t size_bytes = 0;
  SimTime created_at;
  std::optional<SimTime> bs_received_at;
  std::optional<SimTime> delivered_at;
};

/// Static description of one connection, as registered in the flow table.
struct ConnectionInfo {
  Cid cid = 0;
  Sfid sfid = 0;
  Direction direction = Direction::uplink;
  StationId src = 0;
  StationId dst = 0;
  TrafficType traffic = TrafficType::ftp;
  SchedulingClass cls = SchedulingClass::be;
  std::uint32_t weight = 1;
};

/// A connection together with its drop-tail SDU queue.
class Connection {
public:
  Connection(ConnectionInfo info, std::size_t capacity_packets);

  const ConnectionInfo& info() const { return info_; }
  Cid cid() const { return info_.cid; }

  /// Returns false (and counts a drop) when the queue is full.
  bool enqueue(MacSdu sdu);
  const MacSdu& front() const { return queue_.front(); }
  MacSdu pop_front();

  bool empty() const { return queue_.empty(); }
  std::size_t size() const { return queue_.size(); }
  std::uint64_t backlog_bytes() const { return backlog_bytes_; }
  const std::deque<MacSdu>& queue() const { return queue_; }
  std::size_t capacity() const { return capacity_; }

  std::uint64_t enqueued() const { return enqueued_; }
  std::uint64_t dequeued() const { return dequeued_; }
  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t dropped_bytes() const { return dropped_bytes_; }

private:
  ConnectionInfo info_;
  std::size_t capacity_;
  std::deque<MacSdu> queue_;
  std::uint64_t backlog_bytes_ = 0;
  std::uint64_t enqueued_ = 0;
  std::uint64_t dequeued_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t dropped_bytes_ = 0;
};

struct FlowKey {
  StationId src = 0;
  StationId dst = 0;
  TrafficType traffic = TrafficType::ftp;
  Direction direction = Direction::uplink;
};

/// Convergence-sublayer view: maps (src, dst, traffic type, direction) onto
/// connections. CIDs and SFIDs are handed out sequentially at registration.
class FlowTable {
public:
  /// Registers a flow and returns its CID. Throws ConfigError on duplicate
  /// keys, duplicate SFIDs or CID exhaustion.
  Cid add(const ServiceFlow& flow, const FlowKey& key);

  /// Returns the matching CID; on no match counts an unclassified drop.
  std::optional<Cid> classify(const FlowKey& key);

  const ServiceFlow& flow(Cid cid) const;
  const ConnectionInfo& connection(Cid cid) const;
  const std::vector<ConnectionInfo>& connections() const { return connections_; }
  const std::vector<ServiceFlow>& flows() const { return flows_; }

  std::uint64_t unclassified_drops() const { return unclassified_drops_; }

private:
  std::size_t index_of(Cid cid) const;

  std::vector<ServiceFlow> flows_;
  std::vector<ConnectionInfo> connections_;
  Cid next_cid_ = 1;
  std::uint64_t unclassified_drops_ = 0;
};

} // namespace wimax
