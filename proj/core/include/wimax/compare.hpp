#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wimax/metrics.hpp"
#include "wimax/scenario.hpp"
#include "wimax/scheduler.hpp"

namespace wimax {

RunLabels labels_of(const Scenario& scenario);

/// One deterministic run rendered as CSV. Throws ConfigError or
/// InvariantViolation.
std::string run_to_csv(const Scenario& scenario);

struct SeedComparison {
  std::uint64_t seed = 0;
  double first = 0.0;
  double second = 0.0;
};

/// Ordering of one metric between two schedulers across seeds.
struct Verdict {
  std::string metric;
  std::string first;  // scheduler name
  std::string second; // scheduler name
  /// True when `first` should be below `second` to win (delay).
  bool lower_wins = false;
  std::uint32_t wins = 0;
  std::vector<SeedComparison> per_seed;
  bool low_confidence = false;

  /// "delay: wfq < dwrr in 5/5 seeds"
  std::string text() const;
};

struct ComparisonReport {
  std::string scenario;
  std::vector<std::string> schedulers;
  std::vector<std::uint64_t> seeds;
  /// scheduler -> metric -> mean over seeds of the BS-scope run summary.
  std::map<std::string, std::map<std::string, double>> means;
  std::vector<Verdict> verdicts;

  const Verdict* find(const std::string& metric, const std::string& first, const std::string& second) const;
  std::string render() const;
};

/// Metrics covered by the verdicts, all on the BS scope.
inline constexpr const char* kVerdictMetrics[] = {"delay_s", "throughput_bps", "load_bps"};

/// Rows of several runs' CSVs, re-read through read_csv, folded into a
/// report. Every (scheduler, seed) pair must be present.
ComparisonReport build_report(const std::vector<CsvRow>& rows, const std::vector<std::string>& schedulers,
                              const std::vector<std::uint64_t>& seeds);

struct CompareResult {
  ComparisonReport report;
  /// All runs, one header.
  std::string csv;
};

/// Runs every (scheduler, seed) with the scheduler at the BS and at every SS.
/// `jobs` > 1 runs worlds on separate threads. Errors name the failing pair.
CompareResult compare(const Scenario& base, const std::vector<SchedulerKind>& schedulers,
                      const std::vector<std::uint64_t>& seeds, unsigned jobs = 1);

} // namespace wimax
