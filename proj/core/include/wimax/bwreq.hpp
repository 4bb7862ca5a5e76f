#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wimax/phy_frame.hpp"
#include "wimax/scheduler.hpp"
#include "wimax/service_flow.hpp"
#include "wimax/sim_kernel.hpp"

namespace wimax {

struct BwReqParams {
  std::uint32_t request_slot_bytes = 8;
  std::uint32_t min_window = 8;
  std::uint32_t max_window = 1024;
  /// Contention slots kept free even when grants would fill the subframe.
  std::uint32_t min_contention_slots = 4;
  SimTime rtps_poll_interval = SimTime::micros(12500);
  SimTime nrtps_poll_interval = SimTime::seconds(1);
  std::uint32_t poll_bytes = 8;
  std::uint32_t ertps_min_grant_bytes = 8;
  /// Requests riding on data grants. Off in strict-paper mode.
  bool piggyback = true;
  /// nrtPS connections may also contend between polls.
  bool nrtps_contention = true;
};

void validate(const BwReqParams& params);

enum class RequestOrigin : std::uint8_t { poll_response, contention, piggyback };
const char* to_string(RequestOrigin origin);

/// Aggregate bandwidth request: replaces whatever the BS had outstanding for
/// the connection. packet_sizes is the queued SDU sizes in FIFO order, so the
/// BS can grant whole SDUs.
struct BwRequest {
  Cid cid = 0;
  std::uint64_t bytes_requested = 0;
  std::vector<std::uint32_t> packet_sizes;
  SimTime issued_at;
  RequestOrigin mode = RequestOrigin::contention;
};

/// Builds an aggregate request covering `queue` (nullopt when it is empty).
std::optional<BwRequest> make_request(const Connection& connection, SimTime now, RequestOrigin mode);

/// Per-SS truncated binary exponential backoff state.
struct ContentionState {
  std::uint32_t window = 8;
  std::uint32_t min_window = 8;
  std::uint32_t max_window = 1024;
  std::optional<BwRequest> pending;
  /// Contention slots to let pass before transmitting.
  std::uint32_t backoff_remaining = 0;
  std::uint64_t collisions = 0;
  std::uint64_t successes = 0;

  static ContentionState with_bounds(std::uint32_t min_window, std::uint32_t max_window);

  /// Queues `request` and draws a backoff uniformly in [0, window).
  void arm(BwRequest request, RandomSource& rng);
};

struct DeliveredRequest {
  std::size_t station_index = 0;
  std::uint32_t slot = 0;
  BwRequest request;
};

struct CollidedRequest {
  std::size_t station_index = 0;
  std::uint32_t slot = 0;
  Cid cid = 0;
};

struct ContentionOutcome {
  std::vector<DeliveredRequest> delivered;
  std::vector<CollidedRequest> collided;
};

/// One contention region of `contention_slots` request slots. Stations whose
/// backoff falls inside the region transmit in slot `backoff_remaining`; a
/// lone transmitter gets through and resets its window, two or more collide,
/// double their windows (capped) and redraw. The others count down by the
/// region length. Stations are processed in index order so draws replay.
ContentionOutcome run_contention(std::span<ContentionState> states, std::uint32_t contention_slots,
                                 RandomSource& rng);

struct UnsolicitedGrant {
  Cid cid = 0;
  StationId ss = 0;
  std::uint64_t bytes = 0;
};

/// Base-station bookkeeping for uplink bandwidth: periodic unsolicited grants,
/// the poll timetable, and outstanding request backlog. The outstanding
/// backlog of each request-based connection lives in the uplink scheduler's
/// queue for that CID.
class GrantLedger {
public:
  GrantLedger(SchedulerKind ul_scheduler, BwReqParams params);

  /// `quantum` is used by DWRR; weight comes from the flow.
  void register_connection(const ConnectionInfo& info, const ServiceFlow& flow, std::uint32_t quantum);

  std::vector<UnsolicitedGrant> issue_unsolicited(SimTime now);

  /// Poll IEs (offsets unset) for every due poll, as long as they fit into
  /// `max_bytes`. Polls that do not fit stay due.
  std::vector<MapIE> poll_flows(SimTime now, std::uint64_t max_bytes = UINT64_MAX);

  /// Aggregate request: replaces outstanding backlog. Throws InvariantViolation
  /// for unsolicited-grant connections or unknown CIDs.
  void on_request(const BwRequest& request);

  void adjust_ertps(Cid cid, std::uint64_t rate_bps);

  std::vector<ServiceDecision> select_data_grants(std::uint64_t budget);

  std::uint64_t outstanding_bytes(Cid cid) const;
  std::uint64_t requested_bytes(Cid cid) const;
  std::uint64_t granted_bytes(Cid cid) const;
  std::uint64_t unsolicited_bytes(Cid cid) const;
  std::uint64_t ertps_rate(Cid cid) const;
  std::uint64_t request_count() const { return request_count_; }

  /// Unsolicited bytes one frame would need if every periodic grant fell due.
  std::uint64_t peak_unsolicited_bytes_per_frame() const;

  StationId station_of(Cid cid) const;
  bool is_unsolicited(Cid cid) const;
  const BwReqParams& params() const { return params_; }
  const Scheduler& ul_scheduler() const { return *scheduler_; }

private:
  struct Entry {
    ConnectionInfo info;
    ServiceFlow flow;
    SimTime next_grant;
    SimTime next_poll;
    std::uint64_t ertps_rate_bps = 0;
    std::uint64_t requested = 0;
    std::uint64_t granted = 0;
    std::uint64_t unsolicited = 0;
    PacketId next_chunk_id = 0;
  };

  Entry& entry(Cid cid);
  const Entry& entry(Cid cid) const;
  std::uint64_t unsolicited_size(const Entry& e) const;

  BwReqParams params_;
  std::unique_ptr<Scheduler> scheduler_;
  std::map<Cid, Entry> entries_;
  std::uint64_t request_count_ = 0;
};

/// Unsolicited grants exceeded the uplink subframe.
class OversubscribedUgsError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Lays out one frame's UL-MAP: unsolicited grants, then unicast polls, then
/// data grants picked by the ledger's scheduler, then the contention region
/// taking whatever remains (never less than the configured minimum when
/// unsolicited grants leave room for it).
UlMap build_ul_map(GrantLedger& ledger, const FrameConfig& cfg, std::uint64_t frame_index);

} // namespace wimax
