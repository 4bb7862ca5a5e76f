#include "wimax/service_flow.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace wimax {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

} // namespace

const char* to_string(SchedulingClass c) {
  switch (c) {
  case SchedulingClass::ugs: return "UGS";
  case SchedulingClass::rtps: return "rtPS";
  case SchedulingClass::ertps: return "ertPS";
  case SchedulingClass::nrtps: return "nrtPS";
  case SchedulingClass::be: return "BE";
  }
  return "unknown";
}

std::optional<SchedulingClass> parse_scheduling_class(std::string_view text) {
  for (auto c : kAllSchedulingClasses) {
    if (iequals(text, to_string(c))) {
      return c;
    }
  }
  return std::nullopt;
}

const char* to_string(RequestMode m) {
  switch (m) {
  case RequestMode::unsolicited: return "unsolicited";
  case RequestMode::poll: return "poll";
  case RequestMode::contention: return "contention";
  }
  return "unknown";
}

RequestMode requires_request(SchedulingClass c) {
  switch (c) {
  case SchedulingClass::ugs:
  case SchedulingClass::ertps: return RequestMode::unsolicited;
  case SchedulingClass::rtps:
  case SchedulingClass::nrtps: return RequestMode::poll;
  case SchedulingClass::be: return RequestMode::contention;
  }
  return RequestMode::contention;
}

const char* to_string(TrafficType t) {
  switch (t) {
  case TrafficType::ftp: return "ftp";
  case TrafficType::video: return "video";
  case TrafficType::http: return "http";
  case TrafficType::voip_silence: return "voip_silence";
  case TrafficType::voice: return "voice";
  }
  return "unknown";
}

std::optional<TrafficType> parse_traffic_type(std::string_view text) {
  for (auto t : {TrafficType::ftp, TrafficType::video, TrafficType::http, TrafficType::voip_silence,
                 TrafficType::voice}) {
    if (text == to_string(t)) {
      return t;
    }
  }
  return std::nullopt;
}

SchedulingClass default_class(TrafficType t) {
  switch (t) {
  case TrafficType::voice: return SchedulingClass::ugs;
  case TrafficType::video: return SchedulingClass::rtps;
  case TrafficType::voip_silence: return SchedulingClass::ertps;
  case TrafficType::ftp: return SchedulingClass::nrtps;
  case TrafficType::http: return SchedulingClass::be;
  }
  return SchedulingClass::be;
}

void validate(const ServiceFlow& flow) {
  const std::string who = "service flow " + std::to_string(flow.sfid) + ": ";
  if (flow.min_reserved_rate_bps != 0 && flow.max_sustained_rate_bps != 0 &&
      flow.min_reserved_rate_bps > flow.max_sustained_rate_bps) {
    throw ConfigError(who + "min_reserved_rate_bps exceeds max_sustained_rate_bps");
  }
  if (flow.cls == SchedulingClass::ugs && flow.min_reserved_rate_bps != flow.max_sustained_rate_bps) {
    throw ConfigError(who + "UGS requires min_reserved_rate_bps == max_sustained_rate_bps");
  }
  if ((flow.cls == SchedulingClass::ugs || flow.cls == SchedulingClass::ertps) && flow.min_reserved_rate_bps == 0) {
    throw ConfigError(who + std::string(to_string(flow.cls)) + " requires a positive reserved rate");
  }
  if (flow.grant_interval <= SimTime{}) {
    throw ConfigError(who + "grant_interval must be positive");
  }
  if (flow.max_latency_us && *flow.max_latency_us <= 0) {
    throw ConfigError(who + "max_latency_us must be positive");
  }
  if (flow.weight == 0) {
    throw ConfigError(who + "weight must be >= 1");
  }
  if (flow.sdu_size == 0) {
    throw ConfigError(who + "sdu_size must be >= 1");
  }
}

Connection::Connection(ConnectionInfo info, std::size_t capacity_packets)
    : info_(info), capacity_(capacity_packets) {
  if (capacity_ == 0) {
    throw ConfigError("queue capacity must be >= 1 packet");
  }
}

bool Connection::enqueue(MacSdu sdu) {
  ++enqueued_;
  if (queue_.size() >= capacity_) {
    ++dropped_;
    dropped_bytes_ += sdu.size_bytes;
    return false;
  }
  backlog_bytes_ += sdu.size_bytes;
  queue_.push_back(std::move(sdu));
  return true;
}

MacSdu Connection::pop_front() {
  MacSdu sdu = std::move(queue_.front());
  queue_.pop_front();
  backlog_bytes_ -= sdu.size_bytes;
  ++dequeued_;
  return sdu;
}

Cid FlowTable::add(const ServiceFlow& flow, const FlowKey& key) {
  validate(flow);
  for (const auto& c : connections_) {
    if (c.src == key.src && c.dst == key.dst && c.traffic == key.traffic && c.direction == key.direction) {
      throw ConfigError("duplicate flow " + std::to_string(key.src) + "->" + std::to_string(key.dst) + " " +
                        to_string(key.traffic));
    }
  }
  for (const auto& f : flows_) {
    if (f.sfid == flow.sfid) {
      throw ConfigError("duplicate sfid " + std::to_string(flow.sfid));
    }
  }
  if (next_cid_ == 0) {
    throw ConfigError("connection identifiers exhausted");
  }
  const Cid cid = next_cid_++;
  ServiceFlow stored = flow;
  stored.direction = key.direction;
  flows_.push_back(stored);
  connections_.push_back(ConnectionInfo{cid, flow.sfid, key.direction, key.src, key.dst, key.traffic, flow.cls,
                                        flow.weight});
  return cid;
}

std::optional<Cid> FlowTable::classify(const FlowKey& key) {
  for (const auto& c : connections_) {
    if (c.src == key.src && c.dst == key.dst && c.traffic == key.traffic && c.direction == key.direction) {
      return c.cid;
    }
  }
  ++unclassified_drops_;
  return std::nullopt;
}

std::size_t FlowTable::index_of(Cid cid) const {
  for (std::size_t i = 0; i < connections_.size(); ++i) {
    if (connections_[i].cid == cid) {
      return i;
    }
  }
  throw std::out_of_range("unknown cid " + std::to_string(cid));
}

const ServiceFlow& FlowTable::flow(Cid cid) const { return flows_[index_of(cid)]; }

const ConnectionInfo& FlowTable::connection(Cid cid) const { return connections_[index_of(cid)]; }

} // namespace wimax
