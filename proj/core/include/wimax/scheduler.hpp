#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wimax/rational.hpp"
#include "wimax/sim_kernel.hpp"
#include "wimax/types.hpp"

namespace wimax {

enum class SchedulerKind : std::uint8_t { wfq, dwrr, wrr, fifo };

const char* to_string(SchedulerKind kind);
std::optional<SchedulerKind> parse_scheduler_kind(std::string_view text);

struct QueuedPacket {
  PacketId id = 0;
  std::uint32_t size = 0;
  SimTime arrival;
  /// WFQ only; stamped on enqueue.
  Rational finish_tag;
};

struct QueueParams {
  Cid key = 0;
  std::uint32_t weight = 1;
  std::uint32_t quantum = 1;
};

struct SchedulableQueue {
  Cid key = 0;
  std::uint32_t weight = 1;
  std::uint32_t quantum = 1;
  std::deque<QueuedPacket> backlog;
  std::uint64_t backlog_bytes = 0;
  /// DWRR only.
  std::uint64_t deficit = 0;
  /// WFQ only: tag of the newest queued packet, and of the newest served one.
  Rational last_finish_tag;
  Rational last_served_tag;

  bool empty() const { return backlog.empty(); }
};

struct ServiceDecision {
  Cid cid = 0;
  std::uint64_t bytes = 0;
  std::vector<PacketId> packet_ids;
};

/// Common queue-service interface. Queues are kept in ascending key order,
/// which is also the round-robin visit order.
///
/// select(budget) never fragments: once the packet the discipline would serve
/// next does not fit the remaining budget, selection stops for this call.
/// Consecutive packets served from the same queue are merged into one
/// ServiceDecision.
class Scheduler {
public:
  virtual ~Scheduler() = default;

  virtual SchedulerKind kind() const = 0;

  /// Throws std::invalid_argument on duplicate key or zero weight/quantum.
  void add_queue(const QueueParams& params);
  bool has_queue(Cid key) const;

  void enqueue(Cid key, PacketId id, std::uint32_t size, SimTime arrival);

  /// Discards the queue's backlog and enqueues `packets` in its place.
  void replace_backlog(Cid key, std::span<const QueuedPacket> packets);

  std::vector<ServiceDecision> select(std::uint64_t budget);

  /// Serves head packets of one queue, bypassing the discipline, while they
  /// fit `budget`. Used for grants dedicated to a single connection.
  std::vector<QueuedPacket> take_from(Cid key, std::uint64_t budget);

  /// Drops every backlog and all discipline state; keeps the queue set.
  void clear();

  const SchedulableQueue& queue(Cid key) const;
  std::span<const SchedulableQueue> queues() const { return queues_; }
  std::uint64_t backlog_bytes() const;
  bool idle() const;

protected:
  SchedulableQueue& mutable_queue(Cid key);
  std::size_t index_of(Cid key) const;

  virtual void on_enqueue(SchedulableQueue& q, QueuedPacket& p) {
    (void)q;
    (void)p;
  }
  /// Called after a queue's backlog was replaced wholesale.
  virtual void on_replace(SchedulableQueue& q) { (void)q; }
  virtual void on_emptied(SchedulableQueue& q) { (void)q; }
  virtual void reset_state() {}
  virtual void do_select(std::uint64_t budget, std::vector<ServiceDecision>& out) = 0;

  /// Pops the head of `q`, appends it to `out` (merging with a trailing
  /// decision of the same queue) and returns its size.
  std::uint32_t serve_head(SchedulableQueue& q, std::vector<ServiceDecision>& out);

  std::vector<SchedulableQueue> queues_;
};

/// Finish tag for a packet of `packet_size` bytes arriving at `q`:
/// max(virtual_time, q.last_finish_tag) + size / weight. Updates q.last_finish_tag.
Rational wfq_finish_tag(const Rational& virtual_time, SchedulableQueue& q, std::uint32_t packet_size);

/// Weighted fair queueing with self-clocked virtual time: V jumps to the
/// finish tag of each packet as it is served. Ties go to the lower key.
class WfqScheduler final : public Scheduler {
public:
  SchedulerKind kind() const override { return SchedulerKind::wfq; }
  const Rational& virtual_time() const { return virtual_time_; }

protected:
  void on_enqueue(SchedulableQueue& q, QueuedPacket& p) override;
  void on_replace(SchedulableQueue& q) override;
  void reset_state() override { virtual_time_ = Rational(); }
  void do_select(std::uint64_t budget, std::vector<ServiceDecision>& out) override;

private:
  Rational virtual_time_;
};

/// Deficit round robin. Each visit to a backlogged queue credits one quantum;
/// head packets are served while deficit >= head size. An emptied queue's
/// deficit resets to zero. The rotation (including a visit cut short by the
/// budget) carries over to the next select call.
class DwrrScheduler final : public Scheduler {
public:
  struct VisitReport {
    Cid key;
    std::uint64_t deficit_after;
    std::uint32_t served_packets;
    bool emptied;
    bool completed; // false when the budget ended selection mid-visit
  };
  using VisitObserver = std::function<void(const SchedulableQueue&, const VisitReport&)>;

  SchedulerKind kind() const override { return SchedulerKind::dwrr; }
  void set_visit_observer(VisitObserver observer) { observer_ = std::move(observer); }
  std::uint32_t max_packet_seen() const { return max_packet_seen_; }

protected:
  void on_enqueue(SchedulableQueue& q, QueuedPacket& p) override;
  void on_emptied(SchedulableQueue& q) override;
  void reset_state() override;
  void do_select(std::uint64_t budget, std::vector<ServiceDecision>& out) override;

private:
  void check_bound(const SchedulableQueue& q) const;

  std::size_t cursor_ = 0;
  std::optional<Cid> open_visit_;
  std::uint32_t max_packet_seen_ = 0;
  VisitObserver observer_;
};

/// Weighted round robin: each round serves up to `weight` packets per queue,
/// whatever their size.
class WrrScheduler final : public Scheduler {
public:
  SchedulerKind kind() const override { return SchedulerKind::wrr; }

protected:
  void on_emptied(SchedulableQueue& q) override;
  void reset_state() override;
  void do_select(std::uint64_t budget, std::vector<ServiceDecision>& out) override;

private:
  std::size_t cursor_ = 0;
  std::optional<Cid> open_visit_;
  std::uint32_t served_in_visit_ = 0;
};

/// Global arrival order across queues; simultaneous arrivals go to the lower key.
class FifoScheduler final : public Scheduler {
public:
  SchedulerKind kind() const override { return SchedulerKind::fifo; }

protected:
  void do_select(std::uint64_t budget, std::vector<ServiceDecision>& out) override;
};

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind);

} // namespace wimax
