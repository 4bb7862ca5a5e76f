// wimaxsim: run, compare and inspect PMP cell scenarios.
//
// Exit status: 0 ok, 1 scenario/usage error, 2 runtime invariant violation.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wimax/compare.hpp"
#include "wimax/scenario.hpp"
#include "wimax/station.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenario = 1;
constexpr int kExitInvariant = 2;

struct Overrides {
  std::string scenario{wimax::kPaperScenarioName};
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::string bs_scheduler;
  std::string ss_scheduler;
  bool strict_paper = false;
};

wimax::SchedulerKind scheduler_arg(const std::string& text) {
  auto k = wimax::parse_scheduler_kind(text);
  if (!k) {
    throw wimax::ConfigError("unknown scheduler '" + text + "' (expected wfq, dwrr, wrr or fifo)");
  }
  return *k;
}

wimax::Scenario load(const Overrides& o) {
  auto s = wimax::load_scenario(o.scenario);
  if (o.seed) {
    s.seed = *o.seed;
  }
  if (o.duration_s) {
    if (!(*o.duration_s >= 0.0) || *o.duration_s > 1e9) {
      throw wimax::ConfigError("--duration must be a non-negative number of seconds");
    }
    wimax::set_duration(s, wimax::SimTime::micros(std::llround(*o.duration_s * 1e6)));
  }
  if (!o.bs_scheduler.empty()) {
    s.scheduler_bs = scheduler_arg(o.bs_scheduler);
  }
  if (!o.ss_scheduler.empty()) {
    s.scheduler_ss = scheduler_arg(o.ss_scheduler);
  }
  if (o.strict_paper) {
    wimax::apply_strict_paper(s);
  }
  wimax::validate(s);
  return s;
}

// "1,2,5" or "1-5" or a mix.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty()) {
      continue;
    }
    try {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoull(part));
        continue;
      }
      const auto lo = std::stoull(part.substr(0, dash));
      const auto hi = std::stoull(part.substr(dash + 1));
      if (hi < lo || hi - lo > 100000) {
        throw wimax::ConfigError("bad seed range '" + part + "'");
      }
      for (auto s = lo; s <= hi; ++s) {
        out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw wimax::ConfigError("bad seed list '" + text + "'");
    }
  }
  if (out.empty()) {
    throw wimax::ConfigError("--seeds lists no seeds");
  }
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw wimax::ConfigError("cannot write " + path);
  }
  f << text;
  if (!f) {
    throw wimax::ConfigError("write to " + path + " failed");
  }
}

void add_scenario_flags(CLI::App* cmd, Overrides& o, bool with_schedulers) {
  cmd->add_option("--scenario", o.scenario, "scenario file or built-in name (paper-pmp, paper-pmp-literal)")
      ->capture_default_str();
  cmd->add_option("--duration", o.duration_s, "simulated seconds (whole frames)");
  if (with_schedulers) {
    cmd->add_option("--bs-scheduler", o.bs_scheduler, "wfq, dwrr, wrr or fifo at the base station");
    cmd->add_option("--ss-scheduler", o.ss_scheduler, "wfq, dwrr, wrr or fifo at subscriber stations");
  }
  cmd->add_flag("--strict-paper", o.strict_paper, "no piggybacked requests, no nrtPS contention");
}

int cmd_run(const Overrides& o, const std::string& out) {
  const auto s = load(o);
  write_output(out, wimax::run_to_csv(s));
  return kExitOk;
}

int cmd_compare(const Overrides& o, const std::string& seeds, const std::vector<std::string>& schedulers,
                unsigned jobs, const std::string& out) {
  const auto s = load(o);
  std::vector<wimax::SchedulerKind> kinds;
  for (const auto& name : schedulers) {
    kinds.push_back(scheduler_arg(name));
  }
  const auto result = wimax::compare(s, kinds, parse_seeds(seeds), jobs);
  if (!out.empty() && out != "-") {
    write_output(out, result.csv);
  }
  std::cout << result.report.render();
  return kExitOk;
}

int cmd_validate(const Overrides& o) {
  const auto s = load(o);
  std::cout << s.name << ": ok (" << s.stations.subscriber_count << " subscriber stations, " << s.flows.size()
            << " flows, " << s.duration.to_seconds() << " s, schedulers " << wimax::to_string(s.scheduler_bs) << "/"
            << wimax::to_string(s.scheduler_ss) << ")\n";
  return kExitOk;
}

int cmd_print(const Overrides& o, const std::string& out) {
  write_output(out, wimax::to_yaml(load(o)));
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of an 802.16 PMP cell (WFQ, DWRR, WRR, FIFO schedulers)"};
  app.require_subcommand(1);

  Overrides o;
  std::string out;
  std::string seeds = "1-5";
  std::vector<std::string> schedulers{"wfq", "dwrr"};
  unsigned jobs = 1;

  auto* run = app.add_subcommand("run", "one run, CSV metrics to --out (default stdout)");
  add_scenario_flags(run, o, true);
  run->add_option("--seed", o.seed, "random seed (overrides the scenario)");
  run->add_option("--out", out, "CSV output path");

  auto* cmp = app.add_subcommand("compare", "scheduler x seed grid with ordering verdicts");
  add_scenario_flags(cmp, o, false);
  cmp->add_option("--seeds", seeds, "seed list, e.g. 1-5 or 1,4,9")->capture_default_str();
  cmp->add_option("--schedulers", schedulers, "schedulers to compare (applied at BS and SSs)")
      ->delimiter(',')
      ->capture_default_str();
  cmp->add_option("--jobs", jobs, "parallel runs")->capture_default_str()->check(CLI::Range(1u, 256u));
  cmp->add_option("--out", out, "combined CSV output path");

  auto* val = app.add_subcommand("validate", "load and check a scenario without running it");
  add_scenario_flags(val, o, true);
  val->add_option("--seed", o.seed, "random seed");

  auto* print = app.add_subcommand("print-scenario", "write a scenario as an editable YAML file");
  add_scenario_flags(print, o, true);
  print->add_option("--seed", o.seed, "random seed");
  print->add_option("--out", out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitScenario;
  }

  try {
    if (*run) {
      return cmd_run(o, out);
    }
    if (*cmp) {
      return cmd_compare(o, seeds, schedulers, jobs, out);
    }
    if (*val) {
      return cmd_validate(o);
    }
    return cmd_print(o, out);
  } catch (const wimax::ConfigError& e) {
    std::cerr << "wimaxsim: scenario error: " << e.what() << "\n";
    return kExitScenario;
  } catch (const std::exception& e) {
    std::cerr << "wimaxsim: invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  }
}
