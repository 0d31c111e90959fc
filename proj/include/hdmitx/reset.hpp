#pragma once

#include "hdmitx/logic.hpp"

namespace hdmitx {

enum class ClockEdge { Rising, Falling, None };

// Registered part of the RESET block: Disable/Enable captured at the last
// rising Dclk edge, and the one-cycle enable term latched at falling Dclk.
struct ResetState {
  LogicLevel sampled_disable = LogicLevel::Unknown;
  LogicLevel sampled_enable = LogicLevel::Unknown;
  LogicLevel armed = LogicLevel::Unknown;

  friend bool operator==(const ResetState&, const ResetState&) = default;
};

struct ResetInputs {
  LogicLevel disable = LogicLevel::Unknown;
  LogicLevel enable = LogicLevel::Unknown;
  LogicLevel buffered_sel = LogicLevel::Unknown;
};

struct ResetResult {
  ResetState state;
  LogicLevel start = LogicLevel::Unknown;
};

// Start = !Disable & (armed | (!Disable & !Enable & Buffered_Sel10)), where
// armed <- (!sampled Disable & sampled Enable) at each falling edge. The
// recirculation term is combinational so that Start overlaps Sel10 and the
// ring closes in ten cycles.
constexpr ResetResult eval_reset(ResetState s, ClockEdge edge, const ResetInputs& in) {
  switch (edge) {
    case ClockEdge::Rising:
      s.sampled_disable = in.disable;
      s.sampled_enable = in.enable;
      break;
    case ClockEdge::Falling:
      s.armed = logic_and(logic_not(s.sampled_disable), s.sampled_enable);
      break;
    case ClockEdge::None:
      break;
  }
  const LogicLevel not_disable = logic_not(in.disable);
  const LogicLevel recirculate = logic_and({not_disable, logic_not(in.enable), in.buffered_sel});
  return {s, logic_and(not_disable, logic_or(s.armed, recirculate))};
}

}  // namespace hdmitx
