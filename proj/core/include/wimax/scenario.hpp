#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wimax/bwreq.hpp"
#include "wimax/phy_frame.hpp"
#include "wimax/scheduler.hpp"
#include "wimax/service_flow.hpp"
#include "wimax/traffic_gen.hpp"

namespace wimax {

/// One uplink flow: its source model plus the QoS parameters of the
/// connection it is classified onto. The relayed downlink flow copies them.
struct FlowSpec {
  std::string name;
  GeneratorSpec generator;
  std::uint32_t weight = 1;
  /// DWRR quantum; defaults to weight x base quantum.
  std::optional<std::uint32_t> quantum_bytes;
  /// Defaults depend on the class (see resolve_service_flow).
  std::optional<std::uint64_t> min_reserved_rate_bps;
  std::optional<std::uint64_t> max_sustained_rate_bps;
  std::optional<std::int64_t> max_latency_us;
  SimTime grant_interval = SimTime::micros(12500);
  /// Unset means "until the end of the run".
  bool stop_explicit = false;
};

struct StationParams {
  StationId subscriber_count = 5;
  std::size_t queue_capacity_packets = 100;
  /// Share of DL capacity reserved for DL-MAP/UL-MAP messages.
  Rational map_overhead{1, 50};
};

struct Scenario {
  std::string name = "custom";
  FrameConfig frame;
  StationParams stations;
  SchedulerKind scheduler_bs = SchedulerKind::wfq;
  SchedulerKind scheduler_ss = SchedulerKind::wfq;
  /// Defaults to the largest SDU any flow can produce.
  std::optional<std::uint32_t> base_quantum_bytes;
  BwReqParams bwreq;
  std::vector<FlowSpec> flows;
  std::uint64_t seed = 1;
  SimTime duration = SimTime::seconds(60);
  SimTime bucket_width = SimTime::seconds(1);
};

/// Everything load-time checkable. Throws ConfigError.
void validate(const Scenario& scenario);

/// ServiceFlow for `spec` with class defaults filled in.
ServiceFlow resolve_service_flow(const FlowSpec& spec, Direction direction);

std::uint32_t base_quantum(const Scenario& scenario);
std::uint32_t quantum_of(const Scenario& scenario, const FlowSpec& spec);

/// Sets the duration and stretches open-ended flows to it.
void set_duration(Scenario& scenario, SimTime duration);

/// Disables everything the scheduling model adds beyond the bare protocol
/// (piggybacked requests, nrtPS contention).
void apply_strict_paper(Scenario& scenario);

/// Five subscriber stations around one BS:
/// SS1->SS2 ftp, SS2->SS3 video, SS3->SS4 http, SS4->SS5 voip with silence
/// suppression, SS4->SS1 voice.
Scenario build_paper_scenario();
/// Same, but with both voice flows leaving SS4 towards SS1.
Scenario build_paper_scenario_literal();

inline constexpr std::string_view kPaperScenarioName = "paper-pmp";
inline constexpr std::string_view kPaperLiteralScenarioName = "paper-pmp-literal";

/// Built-in names ("paper-pmp", "paper-pmp-literal") or a YAML file path.
/// Throws ConfigError with "<source>:<line>:<col>: ..." diagnostics.
Scenario load_scenario(const std::string& name_or_path);
Scenario parse_scenario(std::string_view text, const std::string& source_name);

/// YAML rendering that parse_scenario reads back to an equal scenario.
std::string to_yaml(const Scenario& scenario);

} // namespace wimax
