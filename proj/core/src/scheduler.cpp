#include "wimax/scheduler.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wimax {

const char* to_string(SchedulerKind kind) {
  switch (kind) {
  case SchedulerKind::wfq: return "wfq";
  case SchedulerKind::dwrr: return "dwrr";
  case SchedulerKind::wrr: return "wrr";
  case SchedulerKind::fifo: return "fifo";
  }
  return "unknown";
}

std::optional<SchedulerKind> parse_scheduler_kind(std::string_view text) {
  for (auto k : {SchedulerKind::wfq, SchedulerKind::dwrr, SchedulerKind::wrr, SchedulerKind::fifo}) {
    if (text == to_string(k)) {
      return k;
    }
  }
  return std::nullopt;
}

// --- Scheduler ---------------------------------------------------------------

void Scheduler::add_queue(const QueueParams& params) {
  if (params.weight == 0 || params.quantum == 0) {
    throw std::invalid_argument("queue " + std::to_string(params.key) + ": weight and quantum must be >= 1");
  }
  auto it = std::lower_bound(queues_.begin(), queues_.end(), params.key,
                             [](const SchedulableQueue& q, Cid key) { return q.key < key; });
  if (it != queues_.end() && it->key == params.key) {
    throw std::invalid_argument("duplicate queue " + std::to_string(params.key));
  }
  SchedulableQueue q;
  q.key = params.key;
  q.weight = params.weight;
  q.quantum = params.quantum;
  queues_.insert(it, std::move(q));
}

std::size_t Scheduler::index_of(Cid key) const {
  auto it = std::lower_bound(queues_.begin(), queues_.end(), key,
                             [](const SchedulableQueue& q, Cid k) { return q.key < k; });
  if (it == queues_.end() || it->key != key) {
    throw std::out_of_range("no scheduler queue for cid " + std::to_string(key));
  }
  return static_cast<std::size_t>(it - queues_.begin());
}

bool Scheduler::has_queue(Cid key) const {
  auto it = std::lower_bound(queues_.begin(), queues_.end(), key,
                             [](const SchedulableQueue& q, Cid k) { return q.key < k; });
  return it != queues_.end() && it->key == key;
}

SchedulableQueue& Scheduler::mutable_queue(Cid key) { return queues_[index_of(key)]; }

const SchedulableQueue& Scheduler::queue(Cid key) const { return queues_[index_of(key)]; }

void Scheduler::enqueue(Cid key, PacketId id, std::uint32_t size, SimTime arrival) {
  if (size == 0) {
    throw std::invalid_argument("zero-size packet");
  }
  auto& q = mutable_queue(key);
  QueuedPacket p{id, size, arrival, Rational()};
  on_enqueue(q, p);
  q.backlog_bytes += size;
  q.backlog.push_back(p);
}

void Scheduler::replace_backlog(Cid key, std::span<const QueuedPacket> packets) {
  auto& q = mutable_queue(key);
  q.backlog.clear();
  q.backlog_bytes = 0;
  on_replace(q);
  for (const auto& src : packets) {
    enqueue(key, src.id, src.size, src.arrival);
  }
  if (q.empty()) {
    on_emptied(q);
  }
}

std::vector<ServiceDecision> Scheduler::select(std::uint64_t budget) {
  std::vector<ServiceDecision> out;
  if (budget > 0) {
    do_select(budget, out);
  }
  return out;
}

std::vector<QueuedPacket> Scheduler::take_from(Cid key, std::uint64_t budget) {
  auto& q = mutable_queue(key);
  std::vector<QueuedPacket> taken;
  while (!q.empty() && q.backlog.front().size <= budget) {
    budget -= q.backlog.front().size;
    q.last_served_tag = q.backlog.front().finish_tag;
    q.backlog_bytes -= q.backlog.front().size;
    taken.push_back(q.backlog.front());
    q.backlog.pop_front();
  }
  if (!taken.empty() && q.empty()) {
    on_emptied(q);
  }
  return taken;
}

void Scheduler::clear() {
  for (auto& q : queues_) {
    q.backlog.clear();
    q.backlog_bytes = 0;
    q.deficit = 0;
    q.last_finish_tag = Rational();
    q.last_served_tag = Rational();
  }
  reset_state();
}

std::uint64_t Scheduler::backlog_bytes() const {
  std::uint64_t total = 0;
  for (const auto& q : queues_) {
    total += q.backlog_bytes;
  }
  return total;
}

bool Scheduler::idle() const {
  return std::all_of(queues_.begin(), queues_.end(), [](const SchedulableQueue& q) { return q.empty(); });
}

std::uint32_t Scheduler::serve_head(SchedulableQueue& q, std::vector<ServiceDecision>& out) {
  const QueuedPacket p = q.backlog.front();
  q.backlog.pop_front();
  q.backlog_bytes -= p.size;
  q.last_served_tag = p.finish_tag;
  if (out.empty() || out.back().cid != q.key) {
    out.push_back(ServiceDecision{q.key, 0, {}});
  }
  out.back().bytes += p.size;
  out.back().packet_ids.push_back(p.id);
  return p.size;
}

// --- WFQ ---------------------------------------------------------------------

Rational wfq_finish_tag(const Rational& virtual_time, SchedulableQueue& q, std::uint32_t packet_size) {
  const Rational start = max(virtual_time, q.last_finish_tag);
  q.last_finish_tag = start + Rational(packet_size, q.weight);
  return q.last_finish_tag;
}

void WfqScheduler::on_enqueue(SchedulableQueue& q, QueuedPacket& p) {
  p.finish_tag = wfq_finish_tag(virtual_time_, q, p.size);
}

void WfqScheduler::on_replace(SchedulableQueue& q) { q.last_finish_tag = q.last_served_tag; }

void WfqScheduler::do_select(std::uint64_t budget, std::vector<ServiceDecision>& out) {
  std::uint64_t remaining = budget;
  for (;;) {
    SchedulableQueue* best = nullptr;
    for (auto& q : queues_) {
      // Strict < keeps the lowest key on equal tags (queues are key-ordered).
      if (!q.empty() && (best == nullptr || q.backlog.front().finish_tag < best->backlog.front().finish_tag)) {
        best = &q;
      }
    }
    if (best == nullptr || best->backlog.front().size > remaining) {
      return;
    }
    virtual_time_ = max(virtual_time_, best->backlog.front().finish_tag);
    remaining -= serve_head(*best, out);
  }
}

// --- DWRR --------------------------------------------------------------------

void DwrrScheduler::on_enqueue(SchedulableQueue& q, QueuedPacket& p) {
  (void)q;
  max_packet_seen_ = std::max(max_packet_seen_, p.size);
}

void DwrrScheduler::on_emptied(SchedulableQueue& q) {
  q.deficit = 0;
  if (open_visit_ == q.key) {
    open_visit_.reset();
  }
}

void DwrrScheduler::reset_state() {
  cursor_ = 0;
  open_visit_.reset();
  max_packet_seen_ = 0;
}

void DwrrScheduler::check_bound(const SchedulableQueue& q) const {
  if (q.deficit >= static_cast<std::uint64_t>(q.quantum) + max_packet_seen_ || (q.empty() && q.deficit != 0)) {
    throw InvariantViolation("dwrr deficit bound broken on queue " + std::to_string(q.key) + ": deficit " +
                             std::to_string(q.deficit) + ", quantum " + std::to_string(q.quantum) +
                             ", max packet " + std::to_string(max_packet_seen_));
  }
}

void DwrrScheduler::do_select(std::uint64_t budget, std::vector<ServiceDecision>& out) {
  const std::size_t n = queues_.size();
  if (n == 0) {
    return;
  }
  if (cursor_ >= n) {
    cursor_ = 0;
  }
  std::uint64_t remaining = budget;
  for (;;) {
    std::size_t scanned = 0;
    while (scanned < n && queues_[cursor_].empty()) {
      cursor_ = (cursor_ + 1) % n;
      ++scanned;
    }
    if (scanned == n) {
      open_visit_.reset();
      return;
    }
    auto& q = queues_[cursor_];
    if (open_visit_ != q.key) {
      q.deficit += q.quantum;
      open_visit_ = q.key;
      check_bound(q);
    }
    std::uint32_t served = 0;
    while (!q.empty() && q.backlog.front().size <= q.deficit) {
      if (q.backlog.front().size > remaining) {
        if (observer_) {
          observer_(q, VisitReport{q.key, q.deficit, served, false, false});
        }
        return;
      }
      const std::uint32_t size = serve_head(q, out);
      q.deficit -= size;
      remaining -= size;
      ++served;
    }
    const bool emptied = q.empty();
    if (emptied) {
      q.deficit = 0;
    }
    check_bound(q);
    if (observer_) {
      observer_(q, VisitReport{q.key, q.deficit, served, emptied, true});
    }
    open_visit_.reset();
    cursor_ = (cursor_ + 1) % n;
  }
}

// --- WRR ---------------------------------------------------------------------

void WrrScheduler::on_emptied(SchedulableQueue& q) {
  if (open_visit_ == q.key) {
    open_visit_.reset();
  }
}

void WrrScheduler::reset_state() {
  cursor_ = 0;
  open_visit_.reset();
  served_in_visit_ = 0;
}

void WrrScheduler::do_select(std::uint64_t budget, std::vector<ServiceDecision>& out) {
  const std::size_t n = queues_.size();
  if (n == 0) {
    return;
  }
  if (cursor_ >= n) {
    cursor_ = 0;
  }
  std::uint64_t remaining = budget;
  for (;;) {
    std::size_t scanned = 0;
    while (scanned < n && queues_[cursor_].empty()) {
      cursor_ = (cursor_ + 1) % n;
      ++scanned;
    }
    if (scanned == n) {
      open_visit_.reset();
      return;
    }
    auto& q = queues_[cursor_];
    if (open_visit_ != q.key) {
      open_visit_ = q.key;
      served_in_visit_ = 0;
    }
    while (served_in_visit_ < q.weight && !q.empty()) {
      if (q.backlog.front().size > remaining) {
        return;
      }
      remaining -= serve_head(q, out);
      ++served_in_visit_;
    }
    open_visit_.reset();
    cursor_ = (cursor_ + 1) % n;
  }
}

// --- FIFO --------------------------------------------------------------------

void FifoScheduler::do_select(std::uint64_t budget, std::vector<ServiceDecision>& out) {
  std::uint64_t remaining = budget;
  for (;;) {
    SchedulableQueue* best = nullptr;
    for (auto& q : queues_) {
      if (!q.empty() && (best == nullptr || q.backlog.front().arrival < best->backlog.front().arrival)) {
        best = &q;
      }
    }
    if (best == nullptr || best->backlog.front().size > remaining) {
      return;
    }
    remaining -= serve_head(*best, out);
  }
}

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind) {
  switch (kind) {
  case SchedulerKind::wfq: return std::make_unique<WfqScheduler>();
  case SchedulerKind::dwrr: return std::make_unique<DwrrScheduler>();
  case SchedulerKind::wrr: return std::make_unique<WrrScheduler>();
  case SchedulerKind::fifo: return std::make_unique<FifoScheduler>();
  }
  throw std::invalid_argument("unknown scheduler kind");
}

} // namespace wimax
