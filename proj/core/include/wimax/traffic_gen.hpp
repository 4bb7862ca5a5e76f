#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wimax/service_flow.hpp"
#include "wimax/sim_kernel.hpp"

namespace wimax {

/// Source-model parameters. Each traffic kind reads only its own group.
struct GeneratorParams {
  // voice, voip_silence
  std::uint32_t voice_packet_bytes = 100;
  SimTime voice_interval = SimTime::micros(12500);
  double mean_talk_s = 1.2;
  double mean_silence_s = 1.8;

  // video: lognormal frame sizes, truncated
  SimTime video_frame_interval = SimTime::millis(40);
  double video_mean_frame_bytes = 6000.0;
  std::uint32_t video_max_frame_bytes = 20000;
  double video_sigma = 0.5;

  // ftp: back-to-back packets at a fixed offered rate
  std::uint32_t ftp_packet_bytes = 1500;
  std::uint64_t ftp_rate_bps = 2000000;

  // http: Poisson page arrivals, truncated-Pareto page sizes
  double http_mean_interarrival_s = 1.0;
  double http_mean_page_bytes = 30000.0;
  std::uint32_t http_max_page_bytes = 500000;
  double http_pareto_shape = 1.5;

  /// Application units larger than this are split into MTU-sized SDUs.
  std::uint32_t mtu_bytes = 1500;
};

struct GeneratorSpec {
  TrafficType kind = TrafficType::ftp;
  StationId src = 1;
  StationId dst = 2;
  SchedulingClass cls = SchedulingClass::nrtps;
  SimTime start;
  SimTime stop = SimTime::seconds(60);
  GeneratorParams params;
};

/// Throws ConfigError on inconsistent parameters.
void validate(const GeneratorSpec& spec);

/// One application data unit handed to the MAC at `time`.
struct Emission {
  SimTime time;
  std::uint32_t size_bytes = 0;
};

/// Splits an application unit into SDUs of at most `mtu` bytes.
std::vector<std::uint32_t> segment(std::uint32_t size_bytes, std::uint32_t mtu);

/// Largest SDU a generator can produce.
std::uint32_t max_sdu_size(const GeneratorSpec& spec);

/// Long-run offered rate implied by the parameters, in bits per second.
double nominal_rate_bps(const GeneratorSpec& spec);

/// Scale x_m of a Pareto(shape) distribution so that min(X, cap) has the given mean.
double pareto_scale_for_truncated_mean(double mean, double cap, double shape);

struct OnOffState {
  enum class Phase : std::uint8_t { talk, silence };
  Phase phase = Phase::talk;
  SimTime phase_ends;
};

/// Event-driven source. Each call to next_emission returns the next unit after
/// the previous one, or nullopt once the stop time is reached.
class TrafficGenerator {
public:
  explicit TrafficGenerator(GeneratorSpec spec);

  const GeneratorSpec& spec() const { return spec_; }
  std::optional<Emission> next_emission(RandomSource& rng);

  const OnOffState& on_off() const { return on_off_; }
  std::uint64_t emitted_units() const { return emitted_; }

private:
  std::optional<SimTime> next_voip_time(SimTime candidate, RandomSource& rng);
  std::uint32_t draw_video_frame(RandomSource& rng) const;
  std::uint32_t draw_http_page(RandomSource& rng) const;

  GeneratorSpec spec_;
  bool started_ = false;
  SimTime last_;
  std::uint64_t emitted_ = 0;
  OnOffState on_off_;
  double pareto_scale_ = 0.0;
};

} // namespace wimax
