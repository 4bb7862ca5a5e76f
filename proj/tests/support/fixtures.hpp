#pragma once

#include <string>

#include "wimax/scenario.hpp"

namespace fixtures {

inline wimax::FlowSpec flow(std::string name, wimax::TrafficType kind, wimax::StationId src, wimax::StationId dst,
                            std::uint32_t weight = 1) {
  wimax::FlowSpec f;
  f.name = std::move(name);
  f.generator.kind = kind;
  f.generator.cls = wimax::default_class(kind);
  f.generator.src = src;
  f.generator.dst = dst;
  f.weight = weight;
  return f;
}

// Empty five-station cell; add flows, then call finish().
inline wimax::Scenario cell(std::string name, wimax::SimTime duration = wimax::SimTime::seconds(2)) {
  wimax::Scenario s;
  s.name = std::move(name);
  s.duration = duration;
  return s;
}

inline wimax::Scenario finish(wimax::Scenario s) {
  wimax::set_duration(s, s.duration);
  wimax::validate(s);
  return s;
}

inline wimax::Scenario paper(wimax::SimTime duration) {
  auto s = wimax::build_paper_scenario();
  wimax::set_duration(s, duration);
  return s;
}

} // namespace fixtures
