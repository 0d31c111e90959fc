#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "hdmitx/channel.hpp"
#include "hdmitx/error.hpp"
#include "hdmitx/traces.hpp"

namespace hdmitx {

// Functional model of the SEL blocks and pull-ups: recomputes Odd, Even,
// nOdd and nEven from Sel<k> and the per-slot data nets (data_nets[k-1]
// feeds slot k). Outputs lag the inputs by gate_delay_ps.
inline SignalTraces mux_lines(const SignalTraces& traces, const std::vector<std::string>& data_nets,
                              std::int64_t gate_delay_ps = 0) {
  const int n = static_cast<int>(data_nets.size());
  std::vector<NetId> sel, bit;
  for (int k = 1; k <= n; ++k) {
    sel.push_back(traces.id("Sel" + std::to_string(k)));
    bit.push_back(traces.id(data_nets[static_cast<std::size_t>(k - 1)]));
  }

  std::vector<std::int64_t> times{0};
  for (int i = 0; i < n; ++i) {
    for (const auto& e : traces.events(sel[i])) times.push_back(e.time_ps);
    for (const auto& e : traces.events(bit[i])) times.push_back(e.time_ps);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  SignalTraces out;
  const NetId odd = out.add_net("Odd");
  const NetId even = out.add_net("Even");
  const NetId nodd = out.add_net("nOdd");
  const NetId neven = out.add_net("nEven");
  out.set_horizon(traces.horizon());

  std::vector<LogicLevel> s(n), d(n), nd(n);
  for (std::int64_t t : times) {
    for (int i = 0; i < n; ++i) {
      s[i] = traces.level_at(sel[i], t);
      d[i] = traces.level_at(bit[i], t);
      nd[i] = logic_not(d[i]);
    }
    for (int parity = 1; parity >= 0; --parity) {
      std::vector<LogicLevel> gs, gd, gnd;
      int active = 0;
      bool drive_one = false, drive_zero = false;
      for (int i = 0; i < n; ++i) {
        if (((i + 1) % 2) != parity) continue;
        gs.push_back(s[i]);
        gd.push_back(d[i]);
        gnd.push_back(nd[i]);
        if (s[i] == LogicLevel::High) {
          ++active;
          drive_one |= d[i] == LogicLevel::High;
          drive_zero |= d[i] == LogicLevel::Low;
        }
      }
      if (active > 1 && drive_one && drive_zero) {
        throw ContentionError(std::string(parity ? "Odd" : "Even") + " line driven by " + std::to_string(active) +
                              " selects with conflicting data at t=" + std::to_string(t) + " ps");
      }
      const std::int64_t at = t + gate_delay_ps;
      if (at > traces.horizon()) continue;
      out.record(parity ? odd : even, at, resolve_line(gs, gd));
      out.record(parity ? nodd : neven, at, resolve_line(gs, gnd));
    }
  }
  return out;
}

inline std::vector<std::string> selection_data_nets(const ChannelNetlist& ch) {
  std::vector<std::string> out;
  for (const auto& s : ch.selectors) out.push_back(ch.name(s.data));
  return out;
}

inline SignalTraces mux_lines(const SignalTraces& traces, const ChannelNetlist& ch) {
  return mux_lines(traces, selection_data_nets(ch), ch.config.buffer_delay_ps);
}

// Same level history, ignoring net ids.
inline bool same_history(const std::vector<NetEvent>& a, const std::vector<NetEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].time_ps != b[i].time_ps || a[i].level != b[i].level) return false;
  }
  return true;
}

}  // namespace hdmitx
