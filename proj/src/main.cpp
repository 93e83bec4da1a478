#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "djc/global_step.hpp"
#include "djc/parser.hpp"
#include "djc/policy.hpp"
#include "djc/sc.hpp"
#include "djc/state.hpp"
#include "djc/syncmgr.hpp"
#include "djc/validate.hpp"
#include "djc/wf.hpp"

namespace {

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

djc::Program load_program(const std::string& path, std::string* sourceOut) {
  std::string src = read_file(path);
  djc::Program prog = djc::parse_program(src);
  auto issues = djc::validate_program(prog);
  if (!issues.empty()) {
    std::ostringstream msg;
    msg << "invalid program:";
    for (const auto& i : issues)
      msg << "\n  " << i.line << ":" << i.col << ": " << i.message;
    throw std::runtime_error(msg.str());
  }
  if (sourceOut) *sourceOut = src;
  return prog;
}

djc::WritePolicy parse_policy_name(const std::string& s,
                                   std::uint32_t* threshold) {
  if (s == "eager") return djc::WritePolicy::Eager;
  if (s == "buffered") return djc::WritePolicy::Buffered;
  if (s.rfind("buffered:", 0) == 0) {
    if (threshold) *threshold = static_cast<std::uint32_t>(
                       std::stoul(s.substr(std::string("buffered:").size())));
    return djc::WritePolicy::Buffered;
  }
  throw std::runtime_error("unknown policy '" + s +
                           "' (use eager, buffered, or buffered:N)");
}

djc::MigrationDirective parse_migrate(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3)
    throw std::runtime_error("--migrate expects STEP:THREAD:DST, got '" + s +
                             "'");
  auto num = [&](std::string p, char prefix) -> std::uint64_t {
    if (!p.empty() && p[0] == prefix) p.erase(0, 1);
    if (p.empty()) throw std::runtime_error("bad --migrate component in '" +
                                            s + "'");
    return std::stoull(p);
  };
  djc::MigrationDirective d;
  d.step = num(parts[0], 's');
  d.thread = static_cast<djc::RefId>(num(parts[1], 'r'));
  d.dst = static_cast<djc::CoreId>(num(parts[2], 'c'));
  return d;
}

struct RunArgs {
  std::string program;
  std::string out;
  std::string schedule = "random";
  std::string emitSchedule;
  std::string policy = "buffered";
  std::uint32_t cores = 8;
  std::uint32_t managers = 1;
  std::uint32_t wbThreshold = 16;
  std::uint64_t seed = 0;
  std::uint64_t maxSteps = 1000000;
  bool checkpoints = false;
  std::vector<std::string> migrations;
};

int cmd_run(const RunArgs& a) {
  std::string source;
  djc::Program prog = load_program(a.program, &source);

  djc::RunConfig cfg;
  cfg.sourceText = source;
  cfg.cores = a.cores;
  cfg.managers = a.managers;
  cfg.seed = a.seed;
  cfg.wbThreshold = a.wbThreshold;
  cfg.maxSteps = a.maxSteps;
  cfg.checkpoints = a.checkpoints;
  cfg.policy = parse_policy_name(a.policy, &cfg.wbThreshold);
  for (const std::string& m : a.migrations)
    cfg.migrations.push_back(parse_migrate(m));

  djc::Simulator sim(prog, cfg);
  djc::RunResult rr;
  if (a.schedule == "random") {
    rr = sim.run();
  } else if (a.schedule.rfind("replay:", 0) == 0) {
    std::string path = a.schedule.substr(std::string("replay:").size());
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schedule " + path);
    rr = sim.replay(djc::parse_schedule(in));
  } else {
    throw std::runtime_error("unknown schedule '" + a.schedule +
                             "' (use random or replay:PATH)");
  }

  std::string out = a.out;
  if (out.empty())
    out = std::filesystem::path(a.program).stem().string() + ".trace";
  if (out == "-") {
    djc::write_trace(std::cout, rr.trace);
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + out);
    djc::write_trace(os, rr.trace);
  }
  if (a.checkpoints && out != "-") {
    std::ofstream os(out + ".ckpt", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + out + ".ckpt");
    djc::write_checkpoints(os, rr.checkpoints);
  }
  if (!a.emitSchedule.empty())
    write_file(a.emitSchedule, djc::format_schedule(rr.schedule));

  if (!rr.diagnostics.empty()) std::cerr << rr.diagnostics << "\n";
  if (out != "-") {
    std::cout << "trace: " << out << "\n";
    std::cout << "steps: " << rr.schedule.size() << "\n";
    std::cout << "actions: " << rr.trace.actions.size();
    std::map<std::string, std::uint64_t> byKind;
    for (const djc::Action& act : rr.trace.actions)
      ++byKind[djc::kind_name(act.kind)];
    for (const auto& [k, n] : byKind) std::cout << " " << k << "=" << n;
    std::cout << "\n";
    std::map<std::string, std::uint64_t> byLc;
    for (const auto& [ref, entry] : rr.finalState.heap.entries)
      if (entry.object.lifecycle)
        ++byLc[djc::lifecycle_name(*entry.object.lifecycle)];
    std::cout << "threads:";
    for (const auto& [lc, n] : byLc) std::cout << " " << lc << "=" << n;
    std::cout << "\n";
    std::cout << "heap: " << djc::heap_fingerprint(rr.finalState) << "\n";
  }
  return rr.exitCode;
}

struct CheckArgs {
  std::string trace;
  std::string ckpt;
  std::vector<std::string> rules;
  bool saCacheOps = false;
};

int cmd_check(const CheckArgs& a) {
  djc::Trace tr;
  if (a.trace == "-") {
    tr = djc::read_trace(std::cin);
  } else {
    std::ifstream in(a.trace, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + a.trace);
    tr = djc::read_trace(in);
  }

  djc::WfOptions opts;
  opts.saCacheOps = a.saCacheOps;
  for (const std::string& r : a.rules) opts.only.insert(r);

  djc::WfReport rep = djc::check(tr, opts);

  std::string ckptPath = a.ckpt;
  if (ckptPath.empty() && a.trace != "-" &&
      std::filesystem::exists(a.trace + ".ckpt"))
    ckptPath = a.trace + ".ckpt";
  if (!ckptPath.empty()) {
    std::ifstream in(ckptPath, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + ckptPath);
    std::vector<djc::Checkpoint> cps = djc::read_checkpoints(in);
    djc::WfReport hr = djc::check_wfh(tr, cps, opts);
    rep.violations.insert(rep.violations.end(), hr.violations.begin(),
                          hr.violations.end());
  }

  for (const djc::WfViolation& v : rep.violations)
    std::cout << djc::violation_line(v) << "\n";
  if (rep.clean()) {
    std::cout << "ok: no violations\n";
    return 0;
  }
  std::cout << "violations: " << rep.violations.size() << "\n";
  return 1;
}

struct ExploreArgs {
  std::string program;
  std::string policy = "buffered";
  std::uint32_t cores = 8;
  std::uint32_t wbThreshold = 16;
  std::uint64_t maxDepth = 100000;
  std::uint64_t maxStates = 2000000;
  bool sc = false;
};

int cmd_explore(const ExploreArgs& a) {
  std::string source;
  djc::Program prog = load_program(a.program, &source);
  if (a.sc) {
    djc::ScConfig cfg;
    cfg.cores = a.cores;
    cfg.maxDepth = a.maxDepth;
    cfg.maxStates = a.maxStates;
    djc::ScAnalysis an = djc::analyze_sc(prog, cfg);
    for (const std::string& fp : an.outcomes) std::cout << "heap: " << fp
                                                        << "\n";
    std::cout << "states: " << an.statesExplored << "\n";
    if (an.racy) {
      std::cout << "racy: yes";
      if (an.witness)
        std::cout << " (r" << an.witness->ref << "." << an.witness->field
                  << " between r" << an.witness->thread1 << " and r"
                  << an.witness->thread2 << ")";
      std::cout << "\n";
    } else {
      std::cout << "racy: no\n";
    }
    if (an.deadlockFound) std::cout << "deadlock: yes\n";
    return an.partial ? 4 : an.deadlockFound ? 3 : 0;
  }

  djc::ExploreConfig cfg;
  cfg.sourceText = source;
  cfg.cores = a.cores;
  cfg.wbThreshold = a.wbThreshold;
  cfg.maxDepth = a.maxDepth;
  cfg.maxStates = a.maxStates;
  cfg.policy = parse_policy_name(a.policy, &cfg.wbThreshold);
  djc::ExploreResult res = djc::Simulator::explore(prog, cfg);
  for (const std::string& fp : res.finalHeaps) std::cout << "heap: " << fp
                                                         << "\n";
  std::cout << "states: " << res.statesExplored << "\n";
  std::cout << "terminals: " << res.terminalStates << "\n";
  if (res.deadlockFound) {
    std::cout << "deadlock: yes\n";
    for (const std::string& d : res.deadlockDiags)
      std::cerr << d << "\n";
  }
  return res.exit_code();
}

struct SyncArgs {
  std::string script;
  std::uint32_t managers = 1;
};

int cmd_syncmgr(const SyncArgs& a) {
  std::string text = read_file(a.script);
  std::vector<djc::syncmgr::ScriptEvent> events =
      djc::syncmgr::parse_script_text(text);
  djc::syncmgr::SimResult res = djc::syncmgr::simulate(events, a.managers);
  for (const std::string& line : res.lines()) std::cout << line << "\n";
  return res.faulted ? 1 : 0;
}

struct CompareArgs {
  std::string program;
  std::string out;
  std::vector<std::string> policies;
  std::uint32_t cores = 8;
  std::uint32_t managers = 1;
  std::uint64_t seedBase = 0;
  std::uint32_t runs = 10;
};

int cmd_compare(const CompareArgs& a) {
  std::string source;
  load_program(a.program, &source);

  std::vector<djc::PolicyConfig> pcs;
  std::vector<std::string> specs = a.policies;
  if (specs.empty()) specs = {"eager", "buffered:16"};
  for (const std::string& s : specs) {
    djc::PolicyConfig pc;
    pc.policy = parse_policy_name(s, &pc.threshold);
    pcs.push_back(pc);
  }
  std::vector<std::uint64_t> seeds;
  for (std::uint32_t i = 0; i < a.runs; ++i) seeds.push_back(a.seedBase + i);

  djc::RunConfig base;
  base.cores = a.cores;
  base.managers = a.managers;
  std::string csv;
  try {
    csv = djc::compare_policies_csv(source, pcs, seeds, base);
  } catch (const std::exception& e) {
    std::cerr << "comparison failed: " << e.what() << "\n";
    return 1;
  }
  if (a.out.empty() || a.out == "-")
    std::cout << csv;
  else
    write_file(a.out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "djcsim: executes concurrent object programs on a simulated "
      "non-coherent many-core machine, records memory-action traces, and "
      "validates them"};
  app.require_subcommand(1);

  int rc = 0;

  RunArgs ra;
  CLI::App* run = app.add_subcommand(
      "run", "Execute a program and record its action trace");
  run->add_option("program", ra.program, "Program source file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("-o,--out", ra.out,
                  "Trace output path (default: <program stem>.trace, - for "
                  "stdout)");
  run->add_option("--cores", ra.cores, "Number of cores")
      ->check(CLI::Range(1u, 512u))
      ->envname("DJCSIM_CORES");
  run->add_option("--managers", ra.managers,
                  "Number of synchronization managers")
      ->check(CLI::Range(1u, 512u))
      ->envname("DJCSIM_MANAGERS");
  run->add_option("--seed", ra.seed, "Scheduler seed")
      ->envname("DJCSIM_SEED");
  run->add_option("--schedule", ra.schedule,
                  "random (default) or replay:PATH");
  run->add_option("--emit-schedule", ra.emitSchedule,
                  "Write the executed schedule to this path");
  run->add_option("--wb-threshold", ra.wbThreshold,
                  "Write-buffer flush threshold")
      ->check(CLI::Range(1u, 1u << 20))
      ->envname("DJCSIM_WB_THRESHOLD");
  run->add_option("--policy", ra.policy,
                  "Write policy: eager, buffered, or buffered:N")
      ->envname("DJCSIM_POLICY");
  run->add_flag("--checkpoints", ra.checkpoints,
                "Also write per-step state snapshots to <trace>.ckpt");
  run->add_option("--migrate", ra.migrations,
                  "Force a migration (STEP:THREAD:DST, repeatable)");
  run->add_option("--max-steps", ra.maxSteps, "Global transition budget");
  run->callback([&]() { rc = cmd_run(ra); });

  CheckArgs ca;
  CLI::App* chk = app.add_subcommand(
      "check", "Validate a trace against the memory-model rules");
  chk->add_option("trace", ca.trace, "Trace file (- for stdin)")->required();
  chk->add_option("--ckpt", ca.ckpt,
                  "Checkpoint file (default: <trace>.ckpt when present)");
  chk->add_option("--rule", ca.rules,
                  "Check only these rule ids (repeatable)");
  chk->add_flag("--sa-cache-ops", ca.saCacheOps,
                "Treat fetches and write-backs as synchronization actions "
                "when checking for position ties");
  chk->callback([&]() { rc = cmd_check(ca); });

  ExploreArgs ea;
  CLI::App* exp = app.add_subcommand(
      "explore", "Enumerate schedules and collect final heaps");
  exp->add_option("program", ea.program, "Program source file")
      ->required()
      ->check(CLI::ExistingFile);
  exp->add_option("--cores", ea.cores, "Number of cores")
      ->check(CLI::Range(1u, 512u))
      ->envname("DJCSIM_CORES");
  exp->add_option("--wb-threshold", ea.wbThreshold,
                  "Write-buffer flush threshold")
      ->check(CLI::Range(1u, 1u << 20));
  exp->add_option("--policy", ea.policy,
                  "Write policy: eager, buffered, or buffered:N");
  exp->add_option("--max-depth", ea.maxDepth, "Depth budget");
  exp->add_option("--max-states", ea.maxStates, "State budget");
  exp->add_flag("--sc", ea.sc,
                "Explore an idealized coherent machine instead and report "
                "data races");
  exp->callback([&]() { rc = cmd_explore(ea); });

  SyncArgs sa;
  CLI::App* smgr = app.add_subcommand(
      "syncmgr-sim", "Run a monitor-protocol script through the "
                     "synchronization managers");
  smgr->add_option("script", sa.script, "Script file (- for stdin)")
      ->required();
  smgr->add_option("--managers", sa.managers,
                   "Number of synchronization managers")
      ->check(CLI::Range(1u, 512u))
      ->envname("DJCSIM_MANAGERS");
  smgr->callback([&]() { rc = cmd_syncmgr(sa); });

  CompareArgs pa;
  CLI::App* cmp = app.add_subcommand(
      "compare-policies", "Run one program under several write policies "
                          "and tabulate operation counts");
  cmp->add_option("program", pa.program, "Program source file")
      ->required()
      ->check(CLI::ExistingFile);
  cmp->add_option("-o,--out", pa.out, "CSV output path (default: stdout)");
  cmp->add_option("--policy", pa.policies,
                  "Policy to include (repeatable; default eager and "
                  "buffered:16)");
  cmp->add_option("--cores", pa.cores, "Number of cores")
      ->check(CLI::Range(1u, 512u))
      ->envname("DJCSIM_CORES");
  cmp->add_option("--managers", pa.managers,
                  "Number of synchronization managers")
      ->check(CLI::Range(1u, 512u));
  cmp->add_option("--seed-base", pa.seedBase, "First seed");
  cmp->add_option("--runs", pa.runs, "Seeds per policy")
      ->check(CLI::Range(1u, 100000u));
  cmp->callback([&]() { rc = cmd_compare(pa); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const djc::TraceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const djc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
