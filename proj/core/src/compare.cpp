#include "wimax/compare.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "wimax/station.hpp"

namespace wimax {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

const char* short_name(const std::string& metric) {
  if (metric == "delay_s") {
    return "delay";
  }
  if (metric == "throughput_bps") {
    return "throughput";
  }
  if (metric == "load_bps") {
    return "load";
  }
  return metric.c_str();
}

} // namespace

RunLabels labels_of(const Scenario& scenario) {
  return RunLabels{scenario.name, to_string(scenario.scheduler_bs), to_string(scenario.scheduler_ss), scenario.seed};
}

std::string run_to_csv(const Scenario& scenario) {
  Cell cell(scenario);
  cell.run();
  std::ostringstream out;
  emit_csv(out, labels_of(scenario), cell.metrics().series(), cell.metrics().summary());
  return out.str();
}

std::string Verdict::text() const {
  const char* op = lower_wins ? " < " : " > ";
  std::string s = std::string(short_name(metric)) + ": " + first + op + second + " in " + std::to_string(wins) +
                  "/" + std::to_string(per_seed.size()) + " seeds";
  if (low_confidence) {
    s += " (low confidence: single seed)";
  }
  return s;
}

const Verdict* ComparisonReport::find(const std::string& metric, const std::string& first,
                                      const std::string& second) const {
  for (const auto& v : verdicts) {
    if (v.metric == metric && v.first == first && v.second == second) {
      return &v;
    }
  }
  return nullptr;
}

std::string ComparisonReport::render() const {
  std::ostringstream o;
  o << "scenario " << scenario << ", " << seeds.size() << " seed(s), BS scope means\n";
  o << "scheduler";
  for (const char* m : kVerdictMetrics) {
    o << "  " << m;
  }
  o << "\n";
  for (const auto& s : schedulers) {
    o << s;
    const auto& row = means.at(s);
    for (const char* m : kVerdictMetrics) {
      o << "  " << fixed(row.at(m), std::string(m) == "delay_s" ? 6 : 1);
    }
    o << "\n";
  }
  o << "\n";
  for (const auto& v : verdicts) {
    o << v.text() << "\n";
    for (const auto& p : v.per_seed) {
      const int digits = v.metric == "delay_s" ? 6 : 1;
      o << "  seed " << p.seed << ": " << fixed(p.first, digits) << " vs " << fixed(p.second, digits) << "\n";
    }
  }
  return o.str();
}

ComparisonReport build_report(const std::vector<CsvRow>& rows, const std::vector<std::string>& schedulers,
                              const std::vector<std::uint64_t>& seeds) {
  ComparisonReport report;
  report.schedulers = schedulers;
  report.seeds = seeds;
  // scheduler -> seed -> metric -> value
  std::map<std::string, std::map<std::uint64_t, std::map<std::string, double>>> values;
  for (const auto& r : rows) {
    if (!r.is_summary() || r.scope != "bs") {
      continue;
    }
    if (report.scenario.empty()) {
      report.scenario = r.labels.scenario;
    }
    values[r.labels.scheduler_bs][r.labels.seed][r.metric] = r.value;
  }
  const auto value = [&](const std::string& sched, std::uint64_t seed, const std::string& metric) {
    auto& per_seed = values[sched];
    auto it = per_seed.find(seed);
    if (it == per_seed.end() || !it->second.contains(metric)) {
      throw std::runtime_error("comparison input lacks " + metric + " for " + sched + " seed " +
                               std::to_string(seed));
    }
    return it->second.at(metric);
  };
  for (const auto& s : schedulers) {
    for (const char* m : kVerdictMetrics) {
      double sum = 0.0;
      for (auto seed : seeds) {
        sum += value(s, seed, m);
      }
      report.means[s][m] = seeds.empty() ? 0.0 : sum / static_cast<double>(seeds.size());
    }
  }
  for (const char* m : kVerdictMetrics) {
    for (std::size_t i = 0; i < schedulers.size(); ++i) {
      for (std::size_t j = i + 1; j < schedulers.size(); ++j) {
        Verdict v;
        v.metric = m;
        v.first = schedulers[i];
        v.second = schedulers[j];
        v.lower_wins = v.metric == "delay_s";
        v.low_confidence = seeds.size() < 2;
        for (auto seed : seeds) {
          SeedComparison c{seed, value(v.first, seed, m), value(v.second, seed, m)};
          if (v.lower_wins ? c.first < c.second : c.first > c.second) {
            ++v.wins;
          }
          v.per_seed.push_back(c);
        }
        report.verdicts.push_back(std::move(v));
      }
    }
  }
  return report;
}

CompareResult compare(const Scenario& base, const std::vector<SchedulerKind>& schedulers,
                      const std::vector<std::uint64_t>& seeds, unsigned jobs) {
  if (schedulers.size() < 2) {
    throw ConfigError("compare needs at least two schedulers");
  }
  if (seeds.empty()) {
    throw ConfigError("compare needs at least one seed");
  }
  for (std::size_t i = 0; i < schedulers.size(); ++i) {
    for (std::size_t j = i + 1; j < schedulers.size(); ++j) {
      if (schedulers[i] == schedulers[j]) {
        throw ConfigError(std::string("scheduler ") + to_string(schedulers[i]) + " listed twice");
      }
    }
  }

  struct Job {
    Scenario scenario;
    std::string csv;
    std::exception_ptr error;
  };
  std::vector<Job> grid;
  for (auto kind : schedulers) {
    for (auto seed : seeds) {
      Job j{base, {}, nullptr};
      j.scenario.scheduler_bs = kind;
      j.scenario.scheduler_ss = kind;
      j.scenario.seed = seed;
      grid.push_back(std::move(j));
    }
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        grid[i].csv = run_to_csv(grid[i].scenario);
      } catch (...) {
        grid[i].error = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }

  CompareResult result;
  std::string all;
  for (auto& j : grid) {
    if (j.error) {
      const std::string who = std::string("run ") + to_string(j.scenario.scheduler_bs) + " seed " +
                              std::to_string(j.scenario.seed) + ": ";
      try {
        std::rethrow_exception(j.error);
      } catch (const ConfigError& e) {
        throw ConfigError(who + e.what());
      } catch (const InvariantViolation& e) {
        throw InvariantViolation(who + e.what());
      } catch (const std::exception& e) {
        throw std::runtime_error(who + e.what());
      }
    }
    all += j.csv;
  }
  // Verdicts come only from the public CSV format.
  std::istringstream in(all);
  const auto rows = read_csv(in);
  std::vector<std::string> names;
  for (auto k : schedulers) {
    names.emplace_back(to_string(k));
  }
  result.report = build_report(rows, names, seeds);

  std::ostringstream merged;
  merged << kCsvHeader << '\n';
  std::istringstream again(all);
  std::string line;
  while (std::getline(again, line)) {
    if (line != kCsvHeader) {
      merged << line << '\n';
    }
  }
  result.csv = merged.str();
  return result;
}

} // namespace wimax
