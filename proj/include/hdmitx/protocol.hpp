#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdmitx/config.hpp"
#include "hdmitx/error.hpp"
#include "hdmitx/stimulus.hpp"
#include "hdmitx/traces.hpp"

namespace hdmitx {

struct ActionLatency {
  ScheduledAction action;
  std::int64_t latency_ps = 0;
  bool pass = false;
};

struct ProtocolVerdict {
  std::int64_t bound_ps = 0;
  std::vector<ActionLatency> latencies;
  std::optional<std::int64_t> reset_complete_ps;  // end of the first disable+enable pair
  bool unknown_after_reset = false;
  std::vector<std::string> warnings;
  bool pass = false;
};

namespace detail {

inline bool quiet_level(bool is_sel, LogicLevel l) {
  return is_sel ? l == LogicLevel::Low : l == LogicLevel::High;
}

// Earliest time >= from after which `net` stays quiet up to `end`;
// nullopt if it is not quiet at `end`.
inline std::optional<std::int64_t> quiet_since(const SignalTraces& tr, NetId net, bool is_sel, std::int64_t from,
                                               std::int64_t end) {
  if (!quiet_level(is_sel, tr.level_at(net, end))) return std::nullopt;
  std::int64_t since = from;
  for (const auto& e : tr.events(net)) {
    if (e.time_ps <= from) continue;
    if (e.time_ps > end) break;
    if (quiet_level(is_sel, e.level)) since = e.time_ps;
  }
  return since;
}

}  // namespace detail

// Measures disable-to-quiet and enable-to-Sel1 latencies against two pixel
// periods, tracks reset completion and flags protocol misuse.
inline ProtocolVerdict check_protocol(const SignalTraces& traces, const ProtocolSchedule& schedule,
                                      const ChannelConfig& config) {
  schedule.validate();
  const int n = config.word_width;
  const TimeBase tb = config.timebase();
  const std::int64_t horizon = traces.horizon();
  ProtocolVerdict v;
  v.bound_ps = config.protocol_bound_ps();

  for (const auto& a : schedule.actions) {
    if (a.time_ps > horizon) throw IncompleteTraceError(std::string(action_name(a.action)) + " beyond horizon");
  }

  std::vector<NetId> sel;
  for (int k = 1; k <= n; ++k) sel.push_back(traces.id("Sel" + std::to_string(k)));
  const std::vector<NetId> lines{traces.id("Odd"), traces.id("Even"), traces.id("nOdd"), traces.id("nEven")};
  const auto sel1_rises = traces.rising_edges("Sel1");

  bool disabled = false;
  for (std::size_t i = 0; i < schedule.actions.size(); ++i) {
    const auto& a = schedule.actions[i];
    if (a.action == ProtocolAction::DisableRelease) {
      disabled = false;
      continue;
    }
    if (a.action == ProtocolAction::DisableAssert) {
      disabled = true;
      std::int64_t end = horizon;
      for (std::size_t j = i + 1; j < schedule.actions.size(); ++j) {
        if (schedule.actions[j].action == ProtocolAction::EnablePulse) {
          end = schedule.actions[j].time_ps;
          break;
        }
      }
      std::int64_t quiet = a.time_ps;
      bool settled = true;
      auto fold = [&](NetId id, bool is_sel) {
        auto s = detail::quiet_since(traces, id, is_sel, a.time_ps, end);
        if (!s) settled = false;
        else quiet = std::max(quiet, *s);
      };
      for (NetId id : sel) fold(id, true);
      for (NetId id : lines) fold(id, false);
      if (!settled) {
        if (end == horizon) throw IncompleteTraceError("channel not quiet at horizon after DISABLE_ASSERT");
        quiet = end;
      }
      const std::int64_t lat = quiet - a.time_ps;
      v.latencies.push_back({a, lat, settled && lat <= v.bound_ps});
      continue;
    }
    // Enable pulse
    if (disabled) {
      v.warnings.push_back("ENABLE_PULSE at " + std::to_string(a.time_ps) + " ps issued while Disable is held");
      continue;
    }
    auto it = std::upper_bound(sel1_rises.begin(), sel1_rises.end(), a.time_ps);
    if (it == sel1_rises.end()) throw IncompleteTraceError("no Sel1 rise after ENABLE_PULSE before horizon");
    const std::int64_t lat = *it - a.time_ps;
    v.latencies.push_back({a, lat, lat <= v.bound_ps});
    if (enable_width(config, a) > tb.floor_period()) {
      v.warnings.push_back("ENABLE_PULSE at " + std::to_string(a.time_ps) +
                           " ps is wider than one Dclk period (Enable not lowered before the next rising edge)");
    }
  }

  // Reset: first DISABLE_ASSERT, a later DISABLE_RELEASE, then ENABLE_PULSE.
  const auto& acts = schedule.actions;
  if (acts.empty() || acts.front().action != ProtocolAction::DisableAssert) {
    v.warnings.push_back("first activity after power-on is not a disable+enable pair");
  }
  {
    std::size_t i = 0;
    while (i < acts.size() && acts[i].action != ProtocolAction::DisableAssert) ++i;
    while (i < acts.size() && acts[i].action != ProtocolAction::DisableRelease) ++i;
    while (i < acts.size() && acts[i].action != ProtocolAction::EnablePulse) ++i;
    if (i < acts.size()) v.reset_complete_ps = acts[i].time_ps + enable_width(config, acts[i]);
  }
  if (v.reset_complete_ps) {
    const auto unknown_end = traces.unknown_until();
    if (unknown_end && *unknown_end > *v.reset_complete_ps) {
      v.unknown_after_reset = true;
      v.warnings.push_back("UNKNOWN levels persist after the reset pair");
    }
  }

  // Observed misuse: Start held past one period, or more than one Sel HIGH.
  {
    const NetId start = traces.id("Start");
    const auto& h = traces.events(start);
    for (std::size_t i = 0; i + 1 < h.size(); ++i) {
      if (h[i].level == LogicLevel::High && h[i + 1].time_ps - h[i].time_ps > tb.ceil_period()) {
        v.warnings.push_back("Start held HIGH for more than one serial period at " + std::to_string(h[i].time_ps) +
                             " ps (double token injection)");
        break;
      }
    }
    std::vector<std::int64_t> times;
    for (NetId id : sel) {
      for (const auto& e : traces.events(id)) times.push_back(e.time_ps);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (std::int64_t t : times) {
      int high = 0;
      for (NetId id : sel) high += traces.level_at(id, t) == LogicLevel::High ? 1 : 0;
      if (high > 1) {
        v.warnings.push_back("multiple Sel nets HIGH at " + std::to_string(t) + " ps");
        break;
      }
    }
  }

  v.pass = !v.unknown_after_reset;
  for (const auto& l : v.latencies) v.pass = v.pass && l.pass;
  return v;
}

}  // namespace hdmitx
