#include "djc/syncmgr.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace djc::syncmgr {

const char* msg_kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::MonEnterReq: return "enter";
    case MsgKind::MonExitReq: return "exit";
    case MsgKind::WaitReq: return "wait";
    case MsgKind::WaitTimeoutRemove: return "timeoutRemove";
    case MsgKind::Notify: return "notify";
    case MsgKind::NotifyAll: return "notifyAll";
    case MsgKind::GrantAck: return "grantAck";
  }
  return "?";
}

std::string event_line(const Event& e) {
  std::ostringstream out;
  switch (e.kind) {
    case Event::Kind::Grant:
      out << "grant r" << e.object << " -> t" << e.thread << " @"
          << e.eventIndex;
      break;
    case Event::Kind::Wake:
      out << "wake r" << e.object << " -> t" << e.thread << " @"
          << e.eventIndex;
      break;
    case Event::Kind::Fault:
      out << "fault " << e.msg << " @" << e.eventIndex;
      break;
  }
  return out.str();
}

std::uint32_t assign_manager(std::uint64_t ref, std::uint32_t nManagers) {
  return static_cast<std::uint32_t>(ref % nManagers);
}

namespace {

Message grant_ack(const ManagerState& m, std::uint64_t object,
                  std::uint64_t thread) {
  Message ack;
  ack.kind = MsgKind::GrantAck;
  ack.object = object;
  ack.thread = thread;
  ack.core = m.id;  // managers occupy dedicated cores
  return ack;
}

void grant(ManagerState& m, ObjectRecord& rec, std::uint64_t object,
           std::uint64_t thread, std::vector<Event>& log,
           std::uint64_t eventIndex, std::vector<Message>& out) {
  rec.held = true;
  rec.owner = thread;
  rec.count = rec.count == 0 ? 1 : rec.count + 1;
  log.push_back({Event::Kind::Grant, object, thread, eventIndex, {}});
  out.push_back(grant_ack(m, object, thread));
}

/// Full release of a monitor record followed by a grant to the oldest
/// queued requester, if any.
void release_and_grant_next(ManagerState& m, ObjectRecord& rec,
                            std::uint64_t object, std::vector<Event>& log,
                            std::uint64_t eventIndex,
                            std::vector<Message>& out) {
  rec.held = false;
  rec.owner = 0;
  rec.count = 0;
  if (!rec.enterQueue.empty()) {
    std::uint64_t next = rec.enterQueue.front();
    rec.enterQueue.pop_front();
    grant(m, rec, object, next, log, eventIndex, out);
  }
}

}  // namespace

std::vector<Message> handle(ManagerState& m, const Message& msg,
                            std::vector<Event>& log,
                            std::uint64_t eventIndex) {
  std::vector<Message> out;
  ObjectRecord& rec = m.records[msg.object];  // lazily allocated

  switch (msg.kind) {
    case MsgKind::MonEnterReq:
      if (!rec.held || rec.owner == msg.thread)
        grant(m, rec, msg.object, msg.thread, log, eventIndex, out);
      else
        rec.enterQueue.push_back(msg.thread);
      break;
    case MsgKind::MonExitReq:
      if (!rec.held || rec.owner != msg.thread) {
        log.push_back({Event::Kind::Fault, msg.object, msg.thread, eventIndex,
                       "monitor exit by non-owner t" +
                           std::to_string(msg.thread) + " on r" +
                           std::to_string(msg.object)});
        break;
      }
      rec.count -= 1;
      if (rec.count == 0)
        release_and_grant_next(m, rec, msg.object, log, eventIndex, out);
      break;
    case MsgKind::WaitReq:
      if (!rec.held || rec.owner != msg.thread) {
        log.push_back({Event::Kind::Fault, msg.object, msg.thread, eventIndex,
                       "wait by non-owner t" + std::to_string(msg.thread) +
                           " on r" + std::to_string(msg.object)});
        break;
      }
      rec.waiters.push_back(msg.thread);
      release_and_grant_next(m, rec, msg.object, log, eventIndex, out);
      break;
    case MsgKind::WaitTimeoutRemove: {
      auto it = std::find(rec.waiters.begin(), rec.waiters.end(), msg.thread);
      if (it != rec.waiters.end()) rec.waiters.erase(it);
      break;
    }
    case MsgKind::Notify:
      if (!rec.waiters.empty()) {
        std::uint64_t w = rec.waiters.front();  // longest-waiting
        rec.waiters.pop_front();
        rec.enterQueue.push_back(w);  // contends again, no immediate grant
        log.push_back({Event::Kind::Wake, msg.object, w, eventIndex, {}});
      }
      break;
    case MsgKind::NotifyAll:
      while (!rec.waiters.empty()) {
        std::uint64_t w = rec.waiters.front();
        rec.waiters.pop_front();
        rec.enterQueue.push_back(w);
        log.push_back({Event::Kind::Wake, msg.object, w, eventIndex, {}});
      }
      break;
    case MsgKind::GrantAck:
      break;  // client-bound; never handled by a manager
  }
  return out;
}

ManagerPool::ManagerPool(std::uint32_t nManagers) {
  if (nManagers == 0) throw std::invalid_argument("need at least one manager");
  managers_.resize(nManagers);
  for (std::uint32_t i = 0; i < nManagers; ++i) managers_[i].id = i;
}

void ManagerPool::submit(MsgKind kind, std::uint64_t object,
                         std::uint64_t thread, std::uint32_t core) {
  ManagerState& m = manager_for(object);
  Message msg;
  msg.kind = kind;
  msg.object = object;
  msg.thread = thread;
  msg.core = core;
  msg.seq = eventCounter_;
  std::uint64_t idx = eventCounter_++;
  m.mailbox.push_back(msg);
  while (!m.mailbox.empty()) {
    Message head = m.mailbox.front();
    m.mailbox.pop_front();
    handle(m, head, log_, idx);
  }
}

const ObjectRecord* ManagerPool::record(std::uint64_t object) const {
  const ManagerState& m = managers_[assign_manager(object, size())];
  auto it = m.records.find(object);
  return it == m.records.end() ? nullptr : &it->second;
}

bool ManagerPool::owns(std::uint64_t object, std::uint64_t thread) const {
  const ObjectRecord* rec = record(object);
  return rec && rec->held && rec->owner == thread;
}

namespace {

std::uint64_t parse_prefixed(const std::string& tok, char prefix,
                             std::size_t lineNo, const char* what) {
  if (tok.size() < 2 || tok[0] != prefix)
    throw std::runtime_error("script line " + std::to_string(lineNo) +
                             ": expected " + what + ", got '" + tok + "'");
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(tok.substr(1), &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos + 1 != tok.size())
    throw std::runtime_error("script line " + std::to_string(lineNo) +
                             ": malformed " + what + " '" + tok + "'");
  return v;
}

std::optional<MsgKind> verb_kind(const std::string& v) {
  if (v == "enter") return MsgKind::MonEnterReq;
  if (v == "exit") return MsgKind::MonExitReq;
  if (v == "wait") return MsgKind::WaitReq;
  if (v == "timeoutRemove") return MsgKind::WaitTimeoutRemove;
  if (v == "notify") return MsgKind::Notify;
  if (v == "notifyAll") return MsgKind::NotifyAll;
  return std::nullopt;
}

}  // namespace

std::vector<ScriptEvent> parse_script(std::istream& in) {
  std::vector<ScriptEvent> script;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ls(line);
    std::string tThread, verb, tObj;
    if (!(ls >> tThread)) continue;  // blank
    if (tThread.rfind("//", 0) == 0) continue;
    if (!(ls >> verb >> tObj))
      throw std::runtime_error("script line " + std::to_string(lineNo) +
                               ": expected 't<k> <verb> r<j>'");
    std::string extra;
    if (ls >> extra)
      throw std::runtime_error("script line " + std::to_string(lineNo) +
                               ": trailing token '" + extra + "'");
    ScriptEvent ev;
    ev.thread = parse_prefixed(tThread, 't', lineNo, "thread 't<k>'");
    auto kind = verb_kind(verb);
    if (!kind)
      throw std::runtime_error("script line " + std::to_string(lineNo) +
                               ": unknown verb '" + verb + "'");
    ev.kind = *kind;
    ev.object = parse_prefixed(tObj, 'r', lineNo, "object 'r<j>'");
    script.push_back(ev);
  }
  return script;
}

std::vector<ScriptEvent> parse_script_text(const std::string& text) {
  std::istringstream in(text);
  return parse_script(in);
}

std::vector<std::string> SimResult::lines() const {
  std::vector<std::string> out;
  out.reserve(events.size());
  for (const Event& e : events) out.push_back(event_line(e));
  return out;
}

SimResult simulate(const std::vector<ScriptEvent>& script,
                   std::uint32_t nManagers) {
  ManagerPool pool(nManagers);
  for (const ScriptEvent& ev : script)
    pool.submit(ev.kind, ev.object, ev.thread);
  SimResult res;
  res.events = pool.log();
  for (const Event& e : res.events)
    if (e.kind == Event::Kind::Fault) res.faulted = true;
  return res;
}

std::vector<ScriptEvent> join_protocol(std::uint64_t joiner,
                                       std::uint64_t target,
                                       std::uint64_t descriptor,
                                       bool targetDead) {
  std::vector<ScriptEvent> script;
  if (targetDead) return script;  // liveness read says dead: no waiting
  // Joiner takes the descriptor monitor and waits for the liveness change.
  script.push_back({joiner, MsgKind::MonEnterReq, descriptor});
  script.push_back({joiner, MsgKind::WaitReq, descriptor});
  // Target's completion handler wakes all joiners.
  script.push_back({target, MsgKind::MonEnterReq, descriptor});
  script.push_back({target, MsgKind::NotifyAll, descriptor});
  script.push_back({target, MsgKind::MonExitReq, descriptor});
  // Woken joiner reacquires and releases the descriptor before returning.
  script.push_back({joiner, MsgKind::MonExitReq, descriptor});
  return script;
}

}  // namespace djc::syncmgr
