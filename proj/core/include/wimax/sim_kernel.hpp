#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace wimax {

/// Simulation clock value in whole microseconds. Used both for instants
/// (time since simulation start) and for durations.
class SimTime {
public:
  constexpr SimTime() = default;

  static constexpr SimTime micros(std::int64_t us) { return SimTime{us}; }
  static constexpr SimTime millis(std::int64_t ms) { return SimTime{ms * 1000}; }
  static constexpr SimTime seconds(std::int64_t s) { return SimTime{s * 1000000}; }

  constexpr std::int64_t us() const { return us_; }
  constexpr double to_seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime& operator+=(SimTime o) {
    us_ += o.us_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) {
    us_ -= o.us_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.us_ + b.us_}; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.us_ - b.us_}; }
  friend constexpr SimTime operator*(SimTime a, std::int64_t k) { return SimTime{a.us_ * k}; }
  friend constexpr SimTime operator*(std::int64_t k, SimTime a) { return SimTime{a.us_ * k}; }

private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

std::string to_string(SimTime t);

enum class EventKind : std::uint8_t {
  frame_start,
  ul_subframe_start,
  packet_arrival,
  grant_fire,
  metrics_tick,
  sim_end,
};

const char* to_string(EventKind kind);

/// Raised when an event is scheduled in the past. This is a logic bug in the
/// caller and aborts the run.
class CausalityError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct EventHandle {
  SimTime fire_at;
  std::uint64_t seq = 0;
};

/// Seeded pseudo-random source. Only the raw mt19937_64 output sequence is
/// relied upon (it is fixed by the standard); all range reduction and
/// distribution shaping is done here so draws replay identically on any
/// conforming standard library.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform integer in [0, range). Throws std::invalid_argument on range 0.
  std::uint64_t draw_uniform(std::uint64_t range);

  /// Uniform double in [0, 1) with 53 random bits.
  double draw_unit();

  double draw_exponential(double mean);
  double draw_standard_normal();

  std::uint64_t draws() const { return draws_; }

private:
  std::uint64_t next();

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/// Single-threaded discrete-event engine. Events are totally ordered by
/// (fire_at, seq); seq is the insertion sequence, so same-instant events fire
/// in the order they were scheduled.
class Simulator {
public:
  using Action = std::function<void()>;

  explicit Simulator(std::uint64_t seed) : rng_(seed) {}

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime now() const { return now_; }

  EventHandle schedule(SimTime fire_at, EventKind kind, Action action);
  EventHandle schedule_in(SimTime delay, EventKind kind, Action action) {
    return schedule(now_ + delay, kind, std::move(action));
  }

  /// Returns false when the event already fired or was cancelled.
  bool cancel(EventHandle handle);

  /// Dispatches every event with fire_at <= end, then leaves the clock at end.
  std::uint64_t run_until(SimTime end);

  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

  /// FNV-1a digest over the (fire_at, seq, kind) of every dispatched event.
  std::uint64_t trace_digest() const { return digest_; }

  RandomSource& rng() { return rng_; }

private:
  struct Pending {
    EventKind kind;
    Action action;
  };
  using Key = std::pair<std::int64_t, std::uint64_t>;

  void fold_digest(std::uint64_t v);

  SimTime now_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  std::map<Key, Pending> queue_;
  RandomSource rng_;
};

} // namespace wimax
