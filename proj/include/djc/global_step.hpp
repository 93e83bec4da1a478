#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "djc/local_step.hpp"
#include "djc/syncmgr.hpp"
#include "djc/trace.hpp"

namespace djc {

/// A migration forced at a given global transition index: the directive
/// consumes that transition (flushing the source write buffer first), so the
/// destination core's buffer and cache must already be empty.
struct MigrationDirective {
  std::uint64_t step = 0;
  RefId thread = kNullRef;
  CoreId dst = 0;
};

struct RunConfig {
  std::string sourceText;  // embedded in the trace header
  std::uint32_t cores = 8;
  std::uint32_t managers = 1;
  std::uint64_t seed = 0;
  std::uint32_t wbThreshold = 16;
  WritePolicy policy = WritePolicy::Buffered;
  bool checkpoints = false;
  std::uint64_t maxSteps = 1000000;
  std::vector<MigrationDirective> migrations;
};

/// One scheduled global transition: which thread stepped, on which core,
/// with which program-level rule. This is exactly what a replay file stores.
struct GlobalTransition {
  std::uint64_t step = 0;
  CoreId core = 0;
  Rule rule = Rule::Blocked;
  RefId thread = kNullRef;
  CoreId migrateDst = 0;  // Migrate entries only
};

std::string format_schedule(const std::vector<GlobalTransition>& sched);
std::vector<GlobalTransition> parse_schedule(std::istream& in);

struct RunResult {
  int exitCode = 0;  // 0 done, 2 config/replay error, 3 deadlock, 4 budget
  Trace trace;
  std::vector<Checkpoint> checkpoints;
  std::vector<GlobalTransition> schedule;
  std::string diagnostics;
  MachineState finalState;
};

struct ExploreConfig {
  std::string sourceText;
  std::uint32_t cores = 8;
  std::uint32_t wbThreshold = 16;
  WritePolicy policy = WritePolicy::Buffered;
  std::uint64_t maxDepth = 100000;
  std::uint64_t maxStates = 2000000;
};

struct ExploreResult {
  bool partial = false;
  bool deadlockFound = false;
  std::set<std::string> finalHeaps;  // fingerprints of terminal heaps
  std::vector<std::string> deadlockDiags;
  std::uint64_t statesExplored = 0;
  std::uint64_t terminalStates = 0;
  int exit_code() const { return partial ? 4 : deadlockFound ? 3 : 0; }
};

/// Drives whole-machine execution: boots the entry class on core 0, then
/// repeatedly picks one thread whose next program-level rule is enabled and
/// applies it together with its demanded implicit cache steps.
///
/// run() draws every choice from the seeded generator and gates contended
/// monitor entry through the synchronization managers (requests are queued
/// in arrival order; only the thread holding the grant may enter). replay()
/// re-executes a recorded schedule, verifying rule and thread at each step.
/// explore() enumerates all thread interleavings (volatile accesses split
/// into their lock/access phases, no manager gating) and collects terminal
/// heap fingerprints.
class Simulator {
 public:
  Simulator(Program prog, RunConfig cfg);

  RunResult run();
  RunResult replay(const std::vector<GlobalTransition>& schedule);

  static ExploreResult explore(const Program& prog, const ExploreConfig& cfg);

  /// Test access: the booted-but-unstepped machine.
  const MachineState& initial_state() const { return boot_; }

 private:
  struct Candidate {
    std::size_t threadIndex;
    NextStep ns;
  };

  MachineState boot_state() const;
  std::vector<Candidate> candidates(const MachineState& st,
                                    const StepOptions& opts) const;
  RunResult drive(const std::vector<GlobalTransition>* replaySchedule);

  Program prog_;
  RunConfig cfg_;
  MachineState boot_;
};

/// Lowest core hosting no unfinished thread; if every core is occupied, the
/// core hosting the fewest unfinished threads (lowest id on ties). A pure
/// function of the state so that replay and exploration agree with run.
CoreId choose_spawn_core(const MachineState& st, const Program& prog,
                         std::uint32_t nCores);

/// Allocates the entry object (class Main, no fields) with its spawned
/// lifecycle state and places its thread on core 0 behind a start marker.
MachineState boot_machine(const Program& prog, std::uint32_t wbThreshold,
                          MemoryMode mode = MemoryMode::Cached);

/// True when the thread's body has fully reduced and its finish step has
/// been taken.
bool thread_done(const MachineState& st, const ThreadTerm& tt);

}  // namespace djc
