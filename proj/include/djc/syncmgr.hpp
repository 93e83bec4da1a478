#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace djc::syncmgr {

/// Messages exchanged between client cores and synchronization managers.
/// Managers serialize all monitor traffic for the objects they own; clients
/// block until the GrantAck for their request arrives.
enum class MsgKind : std::uint8_t {
  MonEnterReq,
  MonExitReq,
  WaitReq,
  WaitTimeoutRemove,
  Notify,
  NotifyAll,
  GrantAck,
};

const char* msg_kind_name(MsgKind k);

struct Message {
  MsgKind kind = MsgKind::MonEnterReq;
  std::uint64_t object = 0;  // monitor identity
  std::uint64_t thread = 0;  // sending thread
  std::uint32_t core = 0;    // sending core
  std::uint64_t seq = 0;     // arrival index within the receiving mailbox
};

/// Per-object manager record, allocated lazily on the first request that
/// names the object.
struct ObjectRecord {
  bool held = false;
  std::uint64_t owner = 0;
  std::uint32_t count = 0;
  std::deque<std::uint64_t> enterQueue;  // blocked enter requesters, FIFO
  std::deque<std::uint64_t> waiters;     // wait() callers, FIFO
};

struct Event {
  enum class Kind : std::uint8_t { Grant, Wake, Fault };
  Kind kind = Kind::Grant;
  std::uint64_t object = 0;
  std::uint64_t thread = 0;
  std::uint64_t eventIndex = 0;  // index of the client event being processed
  std::string msg;               // fault description
};

std::string event_line(const Event& e);

struct ManagerState {
  std::uint32_t id = 0;
  std::deque<Message> mailbox;
  std::map<std::uint64_t, ObjectRecord> records;
};

std::uint32_t assign_manager(std::uint64_t ref, std::uint32_t nManagers);

/// Process one message against a manager's state. Grants, wakes, and
/// protocol faults are appended to `log` tagged with `eventIndex`; outbound
/// GrantAck messages are returned.
std::vector<Message> handle(ManagerState& m, const Message& msg,
                            std::vector<Event>& log,
                            std::uint64_t eventIndex);

/// A pool of managers with a shared event log. Objects are distributed over
/// managers by `assign_manager`; submit() delivers to the owning mailbox and
/// processes it immediately (per-mailbox FIFO arrival).
class ManagerPool {
 public:
  explicit ManagerPool(std::uint32_t nManagers);

  std::uint32_t size() const { return static_cast<std::uint32_t>(managers_.size()); }
  ManagerState& manager(std::uint32_t id) { return managers_[id]; }
  const ManagerState& manager(std::uint32_t id) const { return managers_[id]; }
  ManagerState& manager_for(std::uint64_t ref) {
    return managers_[assign_manager(ref, size())];
  }

  void submit(MsgKind kind, std::uint64_t object, std::uint64_t thread,
              std::uint32_t core = 0);

  /// Pool-side monitor view (for grant gating by a scheduler).
  const ObjectRecord* record(std::uint64_t object) const;
  bool owns(std::uint64_t object, std::uint64_t thread) const;

  const std::vector<Event>& log() const { return log_; }
  std::uint64_t events_submitted() const { return eventCounter_; }

 private:
  std::vector<ManagerState> managers_;
  std::vector<Event> log_;
  std::uint64_t eventCounter_ = 0;
};

/// One parsed client event of a protocol script.
struct ScriptEvent {
  std::uint64_t thread = 0;  // t<k>
  MsgKind kind = MsgKind::MonEnterReq;
  std::uint64_t object = 0;  // r<j>
};

/// Parses a line-delimited protocol script:
///   t<k> enter r<j> | t<k> exit r<j> | t<k> wait r<j>
///   t<k> notify r<j> | t<k> notifyAll r<j> | t<k> timeoutRemove r<j>
/// Blank lines and lines starting with // are skipped.
/// Throws std::runtime_error with a line number on malformed input.
std::vector<ScriptEvent> parse_script(std::istream& in);
std::vector<ScriptEvent> parse_script_text(const std::string& text);

struct SimResult {
  std::vector<Event> events;
  bool faulted = false;
  std::vector<std::string> lines() const;
};

/// Runs a protocol script through a manager pool. The script order is the
/// cross-client arrival permutation; each event is delivered to its object's
/// manager mailbox in that order.
SimResult simulate(const std::vector<ScriptEvent>& script,
                   std::uint32_t nManagers);

/// Produces the message script a joiner/target pair exchanges over the
/// target's descriptor object: joiner reads the volatile liveness state and,
/// unless the target is already dead, waits on the descriptor; the target's
/// completion notifies all joiners. Returns client events in causal order.
std::vector<ScriptEvent> join_protocol(std::uint64_t joiner,
                                       std::uint64_t target,
                                       std::uint64_t descriptor,
                                       bool targetDead);

}  // namespace djc::syncmgr
