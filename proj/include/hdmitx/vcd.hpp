#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "hdmitx/error.hpp"
#include "hdmitx/traces.hpp"

namespace hdmitx {

namespace detail {
// Printable identifier codes '!'..'~', base 94.
inline std::string vcd_id(std::size_t i) {
  std::string s;
  do {
    s += static_cast<char>('!' + i % 94);
    i /= 94;
  } while (i > 0);
  return s;
}
}  // namespace detail

// Value Change Dump with a 1 ps timescale; nets in creation order. No date
// stamp so identical traces give identical bytes.
inline std::string format_vcd(const SignalTraces& traces, const std::string& scope = "channel") {
  if (traces.net_count() == 0) throw Error("no nets to dump");
  std::string out;
  out += "$version hdmitx $end\n";
  out += "$timescale 1ps $end\n";
  out += "$scope module " + scope + " $end\n";
  for (std::size_t i = 0; i < traces.net_count(); ++i) {
    out += "$var wire 1 " + detail::vcd_id(i) + " " + traces.name(static_cast<NetId>(i)) + " $end\n";
  }
  out += "$upscope $end\n$enddefinitions $end\n";

  // time -> (net, level) in net order
  std::map<std::int64_t, std::vector<std::pair<std::size_t, LogicLevel>>> changes;
  std::vector<LogicLevel> initial(traces.net_count(), LogicLevel::Unknown);
  for (std::size_t i = 0; i < traces.net_count(); ++i) {
    const auto& h = traces.events(static_cast<NetId>(i));
    for (const auto& e : h) {
      if (e.time_ps == 0) initial[i] = e.level;
      else changes[e.time_ps].emplace_back(i, e.level);
    }
  }
  out += "#0\n$dumpvars\n";
  for (std::size_t i = 0; i < initial.size(); ++i) {
    out += vcd_char(initial[i]);
    out += detail::vcd_id(i) + "\n";
  }
  out += "$end\n";
  for (const auto& [t, list] : changes) {
    out += "#" + std::to_string(t) + "\n";
    for (const auto& [i, level] : list) {
      out += vcd_char(level);
      out += detail::vcd_id(i) + "\n";
    }
  }
  return out;
}

inline void export_vcd(const SignalTraces& traces, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << format_vcd(traces);
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace hdmitx
