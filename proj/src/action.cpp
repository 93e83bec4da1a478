#include "djc/action.hpp"

namespace djc {

const char* kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::In: return "In";
    case ActionKind::R: return "R";
    case ActionKind::W: return "W";
    case ActionKind::Vr: return "Vr";
    case ActionKind::Vw: return "Vw";
    case ActionKind::L: return "L";
    case ActionKind::U: return "U";
    case ActionKind::S: return "S";
    case ActionKind::Fi: return "Fi";
    case ActionKind::Ir: return "Ir";
    case ActionKind::Ird: return "Ird";
    case ActionKind::Sp: return "Sp";
    case ActionKind::J: return "J";
    case ActionKind::F: return "F";
    case ActionKind::B: return "B";
    case ActionKind::I: return "I";
    case ActionKind::M: return "M";
  }
  return "?";
}

std::optional<ActionKind> kind_from_name(const std::string& s) {
  if (s == "In") return ActionKind::In;
  if (s == "R") return ActionKind::R;
  if (s == "W") return ActionKind::W;
  if (s == "Vr") return ActionKind::Vr;
  if (s == "Vw") return ActionKind::Vw;
  if (s == "L") return ActionKind::L;
  if (s == "U") return ActionKind::U;
  if (s == "S") return ActionKind::S;
  if (s == "Fi") return ActionKind::Fi;
  if (s == "Ir") return ActionKind::Ir;
  if (s == "Ird") return ActionKind::Ird;
  if (s == "Sp") return ActionKind::Sp;
  if (s == "J") return ActionKind::J;
  if (s == "F") return ActionKind::F;
  if (s == "B") return ActionKind::B;
  if (s == "I") return ActionKind::I;
  if (s == "M") return ActionKind::M;
  return std::nullopt;
}

std::string Target::render() const {
  switch (kind) {
    case Kind::None:
      return "";
    case Kind::Var:
      return "r" + std::to_string(ref) + "." + field;
    case Kind::Ref:
      return "r" + std::to_string(ref);
    case Kind::Core:
      return "c" + std::to_string(core);
  }
  return "";
}

}  // namespace djc
