#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "djc/ast.hpp"
#include "djc/machine_ops.hpp"
#include "djc/state.hpp"

namespace djc {

/// The active redex of a term under the left-to-right evaluation order,
/// plus a function that rebuilds the whole term with the redex replaced.
/// A Lit redex means the term is a value; a Var redex means it is stuck.
struct Redex {
  ExprPtr node;
  std::function<ExprPtr(ExprPtr)> rebuild;
};

Redex find_redex(const ExprPtr& e);

enum class Rule : std::uint8_t {
  IfTrue,
  IfFalse,
  Let,
  Call,
  Builtin,
  Field,
  FieldDirty,
  Assign,
  New,
  Fetch,
  WriteBack,
  Invalidate,
  Start,
  Finish,
  VolatileReadL,
  VolatileRead,
  VolatileWriteL,
  VolatileWrite,
  MonitorEnter,
  NestedMonitorEnter,
  MonitorExit,
  NestedMonitorExit,
  Join,
  Interrupt,
  InterruptedT,
  InterruptedF,
  Spawn,
  Migrate,
  Blocked,
};

const char* rule_name(Rule r);
std::optional<Rule> rule_from_name(const std::string& s);

enum class WritePolicy : std::uint8_t { Buffered, Eager };

/// Classification of a thread's next program-level step. `enabled` means the
/// step can fire now, counting cache/buffer-emptiness premises as
/// establishable by a bundled flush. A blocked thread may later become
/// enabled (e.g. waiting on a monitor); a permanently stuck one cannot
/// (null dereference, missing method, non-unit completed body, ...).
struct NextStep {
  Rule rule = Rule::Blocked;
  RefId targetRef = kNullRef;
  std::string targetField;
  bool enabled = false;
  bool finished = false;         // thread completed: body () and finished
  bool permanentlyStuck = false;
  std::string why;               // diagnostic when not enabled
};

struct StepOptions {
  WritePolicy policy = WritePolicy::Buffered;
  bool fuseVolatile = true;  // apply both volatile phases in one transition
};

struct StepResult {
  std::vector<Action> actions;
  Rule programRule = Rule::Blocked;
  bool spawned = false;
  RefId spawnedThread = kNullRef;
};

NextStep next_step(const MachineState& st, const Program& prog,
                   const ThreadTerm& t, const StepOptions& opts);

/// Apply thread `thread`'s next program-level step, together with its
/// implicit-operation prefix (fetches on miss, write-backs at release
/// points, flush+invalidate at acquire points, capacity flushes), as one
/// transition with index `step`. Requires next_step(...).enabled.
/// `spawnCore` names the core a spawned thread is placed on (ignored by
/// every rule but Spawn).
StepResult apply_step(MachineState& st, const Program& prog, RefId thread,
                      std::uint64_t step, const StepOptions& opts,
                      CoreId spawnCore);

/// Move `thread` to core `dst`. All migration premises are checked
/// strictly (distinct cores, empty source buffer, empty destination buffer
/// and cache); a failed premise throws. With `flushSource`, the source
/// core's write buffer is flushed first (as the transition's implicit
/// prefix) instead of being required empty. Emits one M action.
StepResult apply_migrate(MachineState& st, RefId thread, CoreId dst,
                         std::uint64_t step, bool flushSource = false);

}  // namespace djc
