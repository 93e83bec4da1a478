#include "djc/machine_ops.hpp"

#include <algorithm>
#include <stdexcept>

namespace djc {

namespace {

std::pair<RefId, std::string> var_key(RefId r, const std::string& f) {
  return {r, f};
}

}  // namespace

Uid push_action(EmitCtx& cx, Action a) {
  a.uid = cx.st.nextUid++;
  a.step = cx.step;
  a.ord = cx.nextOrd++;
  a.core = cx.core;
  if (a.thread == kNullRef) a.thread = cx.thread;
  cx.out.push_back(std::move(a));
  return cx.out.back().uid;
}

bool locally_readable(const MachineState& st, CoreId core, RefId r,
                      const std::string& field) {
  if (st.mode == MemoryMode::Direct) return st.heap.allocated(r);
  auto bit = st.buffers.find(core);
  if (bit != st.buffers.end() && bit->second.dirty(r, field)) return true;
  auto cit = st.caches.find(core);
  return cit != st.caches.end() && cit->second.cached(r);
}

Value read_field(EmitCtx& cx, RefId r, const std::string& field) {
  Action a;
  a.kind = ActionKind::R;
  a.target = Target::variable(r, field);

  if (cx.st.mode == MemoryMode::Direct) {
    Value v = cx.st.heap.at(r).object.fields.at(field);
    auto w = cx.st.heapWriter.find(var_key(r, field));
    if (w != cx.st.heapWriter.end()) a.prov.W = w->second;
    a.value = v;
    push_action(cx, a);
    return v;
  }

  if (const BufferEntry* e = cx.st.buffer(cx.core).find(r, field)) {
    a.value = e->value;
    a.prov.W = e->writeUid;
    a.prov.Cs = e->writeUid;
    push_action(cx, a);
    return e->value;
  }
  const CacheEntry& ce = cx.st.cache(cx.core).entries.at(r);
  Value v = ce.fields.at(field);
  a.value = v;
  a.prov.W = ce.fieldWriter.at(field);
  a.prov.Cs = ce.fieldSource.at(field);
  push_action(cx, a);
  return v;
}

Uid write_field(EmitCtx& cx, RefId r, const std::string& field, Value v) {
  Action a;
  a.kind = ActionKind::W;
  a.target = Target::variable(r, field);
  a.value = v;

  if (cx.st.mode == MemoryMode::Direct) {
    Uid uid = push_action(cx, a);
    cx.st.heap.at(r).object.fields.at(field) = v;
    cx.st.heapWriter[var_key(r, field)] = uid;
    return uid;
  }

  WriteBuffer& buf = cx.st.buffer(cx.core);
  auto it = std::find_if(buf.entries.begin(), buf.entries.end(),
                         [&](const BufferEntry& e) {
                           return e.ref == r && e.field == field;
                         });
  if (it == buf.entries.end() && buf.size() >= cx.st.wbThreshold)
    write_back_all(cx);

  Uid uid = push_action(cx, a);
  BufferEntry fresh{r, field, v, cx.thread, uid};
  it = std::find_if(buf.entries.begin(), buf.entries.end(),
                    [&](const BufferEntry& e) {
                      return e.ref == r && e.field == field;
                    });
  if (it != buf.entries.end()) buf.entries.erase(it);
  buf.entries.push_back(fresh);
  return uid;
}

void fetch_object(EmitCtx& cx, RefId r) {
  const HeapEntry& he = cx.st.heap.at(r);

  Action a;
  a.kind = ActionKind::F;
  a.target = Target::object(r);
  CacheEntry ce;
  for (const auto& [f, v] : he.object.fields) {
    if (cx.st.volatileVars.count(var_key(r, f))) continue;  // never cached
    auto lw = cx.st.lastWriteBack.find(var_key(r, f));
    if (lw == cx.st.lastWriteBack.end())
      throw std::logic_error("fetch_object: field missing write-back record");
    ce.fields[f] = v;
    ce.fieldWriter[f] = cx.st.heapWriter.at(var_key(r, f));
    a.prov.Bf[f] = lw->second;
  }
  Uid uid = push_action(cx, a);
  for (const auto& [f, v] : ce.fields) ce.fieldSource[f] = uid;
  ce.fetchUid = uid;
  ce.lastUpdate = uid;

  ObjectCache& cache = cx.st.cache(cx.core);
  if (!cache.cached(r)) cache.fetchOrder.push_back(r);
  cache.entries[r] = std::move(ce);
}

void write_back_field(EmitCtx& cx, RefId r, const std::string& field) {
  WriteBuffer& buf = cx.st.buffer(cx.core);
  auto it = std::find_if(buf.entries.begin(), buf.entries.end(),
                         [&](const BufferEntry& e) {
                           return e.ref == r && e.field == field;
                         });
  if (it == buf.entries.end())
    throw std::logic_error("write_back_field: variable not dirty");
  if (!cx.st.cache(cx.core).cached(r))
    throw std::logic_error("write_back_field: owner not cached");

  BufferEntry e = *it;
  buf.entries.erase(it);

  Action a;
  a.kind = ActionKind::B;
  a.target = Target::variable(r, field);
  a.value = e.value;
  a.thread = e.writer;  // attributed to the writing thread
  a.prov.Ab = e.writeUid;
  Uid uid = push_action(cx, a);

  cx.st.heap.at(r).object.fields.at(field) = e.value;
  cx.st.heapWriter[var_key(r, field)] = e.writeUid;
  cx.st.lastWriteBack[var_key(r, field)] = uid;

  CacheEntry& ce = cx.st.cache(cx.core).entries.at(r);
  ce.fields[field] = e.value;
  ce.fieldSource[field] = e.writeUid;
  ce.fieldWriter[field] = e.writeUid;
  ce.lastUpdate = uid;
}

void invalidate_object(EmitCtx& cx, RefId r) {
  ObjectCache& cache = cx.st.cache(cx.core);
  auto it = cache.entries.find(r);
  if (it == cache.entries.end())
    throw std::logic_error("invalidate_object: not cached");

  Action a;
  a.kind = ActionKind::I;
  a.target = Target::object(r);
  a.prov.Ai = it->second.lastUpdate;
  push_action(cx, a);

  cache.entries.erase(it);
  auto& order = cache.fetchOrder;
  order.erase(std::remove(order.begin(), order.end(), r), order.end());
}

void write_back_all(EmitCtx& cx) {
  WriteBuffer& buf = cx.st.buffer(cx.core);
  while (!buf.entries.empty()) {
    BufferEntry front = buf.entries.front();
    if (!cx.st.cache(cx.core).cached(front.ref)) fetch_object(cx, front.ref);
    write_back_field(cx, front.ref, front.field);
  }
}

void acquire_flush(EmitCtx& cx) {
  write_back_all(cx);
  ObjectCache& cache = cx.st.cache(cx.core);
  std::vector<RefId> order = cache.fetchOrder;
  for (RefId r : order) invalidate_object(cx, r);
}

void release_flush(EmitCtx& cx) { write_back_all(cx); }

void emit_alloc_prologue(EmitCtx& cx, RefId r, const ClassDef& cd) {
  const ObjectRecord& obj = cx.st.heap.at(r).object;
  for (const FieldDecl& fd : cd.fields) {
    Value v = obj.fields.at(fd.name);
    if (fd.isVolatile) cx.st.volatileVars.insert({r, fd.name});

    Action init;
    init.kind = ActionKind::In;
    init.target = Target::variable(r, fd.name);
    init.value = v;
    init.prologue = true;
    init.cls = cd.name;
    Uid inUid = push_action(cx, init);
    cx.st.heapWriter[{r, fd.name}] = inUid;

    if (cx.st.mode == MemoryMode::Direct) continue;

    Action wb;
    wb.kind = ActionKind::B;
    wb.target = Target::variable(r, fd.name);
    wb.value = v;
    wb.prologue = true;
    wb.prov.Ab = inUid;
    Uid bUid = push_action(cx, wb);
    cx.st.lastWriteBack[{r, fd.name}] = bUid;
  }
}

}  // namespace djc
