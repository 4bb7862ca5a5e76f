#include "wimax/traffic_gen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wimax {
namespace {

SimTime seconds_to_time(double s) {
  return SimTime::micros(std::max<std::int64_t>(1, std::llround(s * 1e6)));
}

double truncated_pareto_mean(double scale, double cap, double shape) {
  return scale * shape / (shape - 1.0) - std::pow(scale, shape) * std::pow(cap, 1.0 - shape) / (shape - 1.0);
}

} // namespace

void validate(const GeneratorSpec& spec) {
  const auto& p = spec.params;
  const std::string who = std::string(to_string(spec.kind)) + " generator: ";
  if (spec.stop <= spec.start) {
    throw ConfigError(who + "stop must be after start");
  }
  if (spec.src == spec.dst) {
    throw ConfigError(who + "src and dst must differ");
  }
  if (p.mtu_bytes == 0) {
    throw ConfigError(who + "mtu_bytes must be >= 1");
  }
  switch (spec.kind) {
  case TrafficType::voip_silence:
    if (p.mean_talk_s <= 0.0 || p.mean_silence_s <= 0.0) {
      throw ConfigError(who + "talk and silence means must be positive");
    }
    [[fallthrough]];
  case TrafficType::voice:
    if (p.voice_packet_bytes == 0 || p.voice_interval <= SimTime{}) {
      throw ConfigError(who + "packet size and interval must be positive");
    }
    break;
  case TrafficType::video:
    if (p.video_frame_interval <= SimTime{} || p.video_mean_frame_bytes < 1.0 || p.video_sigma < 0.0 ||
        p.video_max_frame_bytes < 1) {
      throw ConfigError(who + "frame interval, mean, sigma and cap must be positive");
    }
    break;
  case TrafficType::ftp:
    if (p.ftp_packet_bytes == 0 || p.ftp_rate_bps == 0) {
      throw ConfigError(who + "packet size and rate must be positive");
    }
    break;
  case TrafficType::http:
    if (p.http_mean_interarrival_s <= 0.0 || p.http_pareto_shape <= 1.0) {
      throw ConfigError(who + "interarrival must be positive and pareto shape > 1");
    }
    if (p.http_mean_page_bytes < 1.0 || p.http_mean_page_bytes >= p.http_max_page_bytes) {
      throw ConfigError(who + "mean page size must lie in [1, max page size)");
    }
    break;
  }
}

std::vector<std::uint32_t> segment(std::uint32_t size_bytes, std::uint32_t mtu) {
  std::vector<std::uint32_t> out;
  while (size_bytes > mtu) {
    out.push_back(mtu);
    size_bytes -= mtu;
  }
  if (size_bytes > 0) {
    out.push_back(size_bytes);
  }
  return out;
}

std::uint32_t max_sdu_size(const GeneratorSpec& spec) {
  const auto& p = spec.params;
  switch (spec.kind) {
  case TrafficType::voice:
  case TrafficType::voip_silence: return std::min(p.voice_packet_bytes, p.mtu_bytes);
  case TrafficType::video: return std::min(p.video_max_frame_bytes, p.mtu_bytes);
  case TrafficType::ftp: return std::min(p.ftp_packet_bytes, p.mtu_bytes);
  case TrafficType::http: return std::min(p.http_max_page_bytes, p.mtu_bytes);
  }
  return p.mtu_bytes;
}

double nominal_rate_bps(const GeneratorSpec& spec) {
  const auto& p = spec.params;
  switch (spec.kind) {
  case TrafficType::voice: return p.voice_packet_bytes * 8.0 / p.voice_interval.to_seconds();
  case TrafficType::voip_silence:
    return p.voice_packet_bytes * 8.0 / p.voice_interval.to_seconds() * p.mean_talk_s /
           (p.mean_talk_s + p.mean_silence_s);
  case TrafficType::video: return p.video_mean_frame_bytes * 8.0 / p.video_frame_interval.to_seconds();
  case TrafficType::ftp: return static_cast<double>(p.ftp_rate_bps);
  case TrafficType::http: return p.http_mean_page_bytes * 8.0 / p.http_mean_interarrival_s;
  }
  return 0.0;
}

double pareto_scale_for_truncated_mean(double mean, double cap, double shape) {
  double lo = 0.0;
  double hi = cap;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (truncated_pareto_mean(mid, cap, shape) < mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TrafficGenerator::TrafficGenerator(GeneratorSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  if (spec_.kind == TrafficType::http) {
    pareto_scale_ = pareto_scale_for_truncated_mean(spec_.params.http_mean_page_bytes,
                                                    spec_.params.http_max_page_bytes, spec_.params.http_pareto_shape);
  }
}

std::optional<SimTime> TrafficGenerator::next_voip_time(SimTime candidate, RandomSource& rng) {
  for (;;) {
    if (on_off_.phase == OnOffState::Phase::talk) {
      if (candidate < on_off_.phase_ends) {
        return candidate;
      }
      on_off_.phase = OnOffState::Phase::silence;
      on_off_.phase_ends += seconds_to_time(rng.draw_exponential(spec_.params.mean_silence_s));
    } else {
      // Talk spurts start with a packet at the end of the silence.
      candidate = std::max(candidate, on_off_.phase_ends);
      on_off_.phase = OnOffState::Phase::talk;
      on_off_.phase_ends += seconds_to_time(rng.draw_exponential(spec_.params.mean_talk_s));
    }
    if (candidate >= spec_.stop) {
      return std::nullopt;
    }
  }
}

std::uint32_t TrafficGenerator::draw_video_frame(RandomSource& rng) const {
  const auto& p = spec_.params;
  const double mu = std::log(p.video_mean_frame_bytes) - 0.5 * p.video_sigma * p.video_sigma;
  const double x = std::exp(mu + p.video_sigma * rng.draw_standard_normal());
  const auto bytes = static_cast<std::uint32_t>(std::clamp(std::llround(x), 1LL,
                                                           static_cast<long long>(p.video_max_frame_bytes)));
  return bytes;
}

std::uint32_t TrafficGenerator::draw_http_page(RandomSource& rng) const {
  const auto& p = spec_.params;
  const double u = 1.0 - rng.draw_unit(); // (0, 1]
  const double x = pareto_scale_ / std::pow(u, 1.0 / p.http_pareto_shape);
  return static_cast<std::uint32_t>(
      std::clamp(std::llround(x), 1LL, static_cast<long long>(p.http_max_page_bytes)));
}

std::optional<Emission> TrafficGenerator::next_emission(RandomSource& rng) {
  const auto& p = spec_.params;
  std::optional<SimTime> t;
  std::uint32_t size = 0;
  switch (spec_.kind) {
  case TrafficType::voice:
    t = started_ ? last_ + p.voice_interval : spec_.start;
    size = p.voice_packet_bytes;
    break;
  case TrafficType::voip_silence:
    if (!started_) {
      on_off_.phase = OnOffState::Phase::talk;
      on_off_.phase_ends = spec_.start + seconds_to_time(rng.draw_exponential(p.mean_talk_s));
    }
    t = next_voip_time(started_ ? last_ + p.voice_interval : spec_.start, rng);
    size = p.voice_packet_bytes;
    break;
  case TrafficType::video:
    t = started_ ? last_ + p.video_frame_interval : spec_.start;
    if (*t < spec_.stop) {
      size = draw_video_frame(rng);
    }
    break;
  case TrafficType::ftp: {
    const auto gap = static_cast<std::int64_t>(
        (static_cast<std::uint64_t>(p.ftp_packet_bytes) * 8000000u + p.ftp_rate_bps - 1) / p.ftp_rate_bps);
    t = started_ ? last_ + SimTime::micros(gap) : spec_.start;
    size = p.ftp_packet_bytes;
    break;
  }
  case TrafficType::http:
    t = (started_ ? last_ : spec_.start) + seconds_to_time(rng.draw_exponential(p.http_mean_interarrival_s));
    if (*t < spec_.stop) {
      size = draw_http_page(rng);
    }
    break;
  }
  started_ = true;
  if (!t || *t >= spec_.stop) {
    last_ = spec_.stop;
    return std::nullopt;
  }
  last_ = *t;
  ++emitted_;
  return Emission{*t, size};
}

} // namespace wimax
