#include "wimax/sim_kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace wimax {

std::string to_string(SimTime t) { return std::to_string(t.us()) + "us"; }

const char* to_string(EventKind kind) {
  switch (kind) {
  case EventKind::frame_start: return "frame-start";
  case EventKind::ul_subframe_start: return "ul-subframe-start";
  case EventKind::packet_arrival: return "packet-arrival";
  case EventKind::grant_fire: return "grant-fire";
  case EventKind::metrics_tick: return "metrics-tick";
  case EventKind::sim_end: return "sim-end";
  }
  return "unknown";
}

std::uint64_t RandomSource::next() {
  ++draws_;
  return engine_();
}

std::uint64_t RandomSource::draw_uniform(std::uint64_t range) {
  if (range == 0) {
    throw std::invalid_argument("draw_uniform: range must be >= 1");
  }
  if (range == 1) {
    return 0;
  }
  // Reject the low (2^64 mod range) values so every residue is equally likely.
  const std::uint64_t threshold = (0 - range) % range;
  std::uint64_t x = next();
  while (x < threshold) {
    x = next();
  }
  return x % range;
}

double RandomSource::draw_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double RandomSource::draw_exponential(double mean) {
  return -mean * std::log1p(-draw_unit());
}

double RandomSource::draw_standard_normal() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - draw_unit();
  const double u2 = draw_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

EventHandle Simulator::schedule(SimTime fire_at, EventKind kind, Action action) {
  if (fire_at < now_) {
    throw CausalityError("event " + std::string(to_string(kind)) + " scheduled at " +
                         to_string(fire_at) + " but clock is " + to_string(now_));
  }
  const std::uint64_t seq = next_seq_++;
  queue_.emplace(Key{fire_at.us(), seq}, Pending{kind, std::move(action)});
  return EventHandle{fire_at, seq};
}

bool Simulator::cancel(EventHandle handle) {
  return queue_.erase(Key{handle.fire_at.us(), handle.seq}) > 0;
}

void Simulator::fold_digest(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    digest_ ^= (v >> (8 * i)) & 0xff;
    digest_ *= 0x100000001b3ULL;
  }
}

std::uint64_t Simulator::run_until(SimTime end) {
  std::uint64_t count = 0;
  while (!queue_.empty()) {
    auto it = queue_.begin();
    if (it->first.first > end.us()) {
      break;
    }
    auto node = queue_.extract(it);
    now_ = SimTime::micros(node.key().first);
    fold_digest(static_cast<std::uint64_t>(node.key().first));
    fold_digest(node.key().second);
    fold_digest(static_cast<std::uint64_t>(node.mapped().kind));
    ++count;
    ++dispatched_;
    if (node.mapped().action) {
      node.mapped().action();
    }
  }
  if (now_ < end) {
    now_ = end;
  }
  return count;
}

} // namespace wimax
