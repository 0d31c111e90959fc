#pragma once

#include <cstdint>
#include <initializer_list>

namespace hdmitx {

enum class LogicLevel : std::uint8_t { Low = 0, High = 1, Unknown = 2 };

using NetId = std::uint32_t;

struct NetEvent {
  std::int64_t time_ps = 0;
  NetId net = 0;
  LogicLevel level = LogicLevel::Unknown;

  friend bool operator==(const NetEvent&, const NetEvent&) = default;
};

constexpr LogicLevel level_of(bool b) { return b ? LogicLevel::High : LogicLevel::Low; }
constexpr bool is_known(LogicLevel l) { return l != LogicLevel::Unknown; }

constexpr LogicLevel logic_not(LogicLevel a) {
  switch (a) {
    case LogicLevel::Low: return LogicLevel::High;
    case LogicLevel::High: return LogicLevel::Low;
    default: return LogicLevel::Unknown;
  }
}

// Kleene AND: a known LOW dominates.
constexpr LogicLevel logic_and(LogicLevel a, LogicLevel b) {
  if (a == LogicLevel::Low || b == LogicLevel::Low) return LogicLevel::Low;
  if (a == LogicLevel::High && b == LogicLevel::High) return LogicLevel::High;
  return LogicLevel::Unknown;
}

constexpr LogicLevel logic_or(LogicLevel a, LogicLevel b) {
  if (a == LogicLevel::High || b == LogicLevel::High) return LogicLevel::High;
  if (a == LogicLevel::Low && b == LogicLevel::Low) return LogicLevel::Low;
  return LogicLevel::Unknown;
}

constexpr LogicLevel logic_and(std::initializer_list<LogicLevel> xs) {
  LogicLevel r = LogicLevel::High;
  for (auto x : xs) r = logic_and(r, x);
  return r;
}

constexpr char vcd_char(LogicLevel l) {
  switch (l) {
    case LogicLevel::Low: return '0';
    case LogicLevel::High: return '1';
    default: return 'x';
  }
}

}  // namespace hdmitx
