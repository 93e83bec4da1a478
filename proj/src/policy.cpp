#include "djc/policy.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

#include "djc/parser.hpp"
#include "djc/state.hpp"
#include "djc/validate.hpp"

namespace djc {

OpMetrics measure(const Trace& tr, const Program& prog) {
  OpMetrics m;
  std::map<RefId, std::string> refClass;
  for (const Action& a : tr.actions)
    if (a.kind == ActionKind::In && !a.cls.empty())
      refClass.emplace(a.target.ref, a.cls);

  bool inRun = false;
  RefId runRef = kNullRef;
  int runIdx = -1;
  for (const Action& a : tr.actions) {
    if (a.is_sync()) ++m.syncActions;
    switch (a.kind) {
      case ActionKind::F:
        ++m.fetches;
        break;
      case ActionKind::I:
        ++m.invalidations;
        break;
      case ActionKind::B: {
        if (!a.prologue) ++m.writebacks;
        int idx = -1;
        auto rc = refClass.find(a.target.ref);
        if (rc != refClass.end()) {
          const ClassDef* cd = prog.find_class(rc->second);
          if (cd) idx = cd->field_index(a.target.field);
        }
        bool continues =
            inRun && a.target.ref == runRef && idx >= 0 && idx == runIdx + 1;
        if (!continues) ++m.bulkRuns;
        inRun = true;
        runRef = a.target.ref;
        runIdx = idx;
        break;
      }
      default:
        inRun = false;
        break;
    }
    if (a.kind != ActionKind::B) inRun = false;
  }
  return m;
}

RunResult run_with_policy(const std::string& source, const PolicyConfig& pc,
                          RunConfig base) {
  base.sourceText = source;
  base.policy = pc.policy;
  base.wbThreshold = pc.threshold;
  Program prog = parse_program(source);
  ValidationReport issues = validate_program(prog);
  if (!issues.empty())
    throw std::runtime_error("invalid program: " + issues.front().message);
  Simulator sim(prog, base);
  return sim.run();
}

std::string compare_policies_csv(const std::string& source,
                                 const std::vector<PolicyConfig>& policies,
                                 const std::vector<std::uint64_t>& seeds,
                                 RunConfig base) {
  Program prog = parse_program(source);
  std::ostringstream csv;
  csv << "policy,seed,writebacks,fetches,invalidations,bulkRuns,"
         "syncActions\n";
  for (std::uint64_t seed : seeds) {
    std::string fingerprint;
    std::string fingerprintPolicy;
    for (const PolicyConfig& pc : policies) {
      RunConfig cfg = base;
      cfg.seed = seed;
      RunResult rr = run_with_policy(source, pc, cfg);
      if (rr.exitCode != 0)
        throw std::runtime_error("policy " + pc.name() + " seed " +
                                 std::to_string(seed) + " exited with " +
                                 std::to_string(rr.exitCode) + ": " +
                                 rr.diagnostics);
      std::string fp = heap_fingerprint(rr.finalState);
      if (fingerprint.empty()) {
        fingerprint = fp;
        fingerprintPolicy = pc.name();
      } else if (fp != fingerprint) {
        throw std::runtime_error(
            "policies disagree on the final heap for seed " +
            std::to_string(seed) + ": " + fingerprintPolicy + " vs " +
            pc.name());
      }
      OpMetrics m = measure(rr.trace, prog);
      csv << pc.name() << ',' << seed << ',' << m.writebacks << ','
          << m.fetches << ',' << m.invalidations << ',' << m.bulkRuns << ','
          << m.syncActions << '\n';
    }
  }
  return csv.str();
}

}  // namespace djc
