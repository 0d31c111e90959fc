#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdmitx/error.hpp"
#include "hdmitx/logic.hpp"

namespace hdmitx {

// Per-net event histories of one simulation run. Each net starts with an
// entry at time 0; events on a net are strictly time-ordered and alternate
// in level.
class SignalTraces {
 public:
  SignalTraces() = default;

  NetId add_net(const std::string& name, LogicLevel initial = LogicLevel::Unknown) {
    if (index_.count(name)) throw Error("duplicate net '" + name + "'");
    const auto id = static_cast<NetId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    events_.push_back({NetEvent{0, id, initial}});
    return id;
  }

  // Appends a level change, merging same-time updates.
  void record(NetId net, std::int64_t t, LogicLevel level) {
    auto& h = events_.at(net);
    if (!h.empty() && h.back().time_ps > t) throw Error("out-of-order event on '" + names_[net] + "'");
    if (!h.empty() && h.back().time_ps == t) {
      if (h.size() >= 2 && h[h.size() - 2].level == level) {
        h.pop_back();
      } else {
        h.back().level = level;
      }
      return;
    }
    if (!h.empty() && h.back().level == level) return;
    h.push_back(NetEvent{t, net, level});
  }

  void set_horizon(std::int64_t t) { horizon_ = t; }
  std::int64_t horizon() const { return horizon_; }

  std::size_t net_count() const { return names_.size(); }
  const std::vector<std::string>& net_names() const { return names_; }
  const std::string& name(NetId id) const { return names_.at(id); }

  std::optional<NetId> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  NetId id(const std::string& name) const {
    auto n = find(name);
    if (!n) throw Error("no net named '" + name + "'");
    return *n;
  }

  const std::vector<NetEvent>& events(NetId id) const { return events_.at(id); }
  const std::vector<NetEvent>& events(const std::string& name) const { return events_.at(id(name)); }

  // Level after all events at time t.
  LogicLevel level_at(NetId id, std::int64_t t) const {
    const auto& h = events_.at(id);
    auto it = std::upper_bound(h.begin(), h.end(), t,
                               [](std::int64_t v, const NetEvent& e) { return v < e.time_ps; });
    if (it == h.begin()) return LogicLevel::Unknown;
    return std::prev(it)->level;
  }
  LogicLevel level_at(const std::string& name, std::int64_t t) const { return level_at(id(name), t); }

  std::vector<std::int64_t> edges(NetId id, LogicLevel to) const {
    std::vector<std::int64_t> out;
    const auto& h = events_.at(id);
    for (std::size_t i = 1; i < h.size(); ++i) {
      const LogicLevel from = h[i - 1].level;
      if (h[i].level == to && from == logic_not(to)) out.push_back(h[i].time_ps);
    }
    return out;
  }
  std::vector<std::int64_t> rising_edges(const std::string& name) const { return edges(id(name), LogicLevel::High); }
  std::vector<std::int64_t> falling_edges(const std::string& name) const { return edges(id(name), LogicLevel::Low); }

  // End of the last UNKNOWN interval on any net; horizon + 1 if some net is
  // still UNKNOWN at the horizon, nullopt if no net is ever UNKNOWN.
  std::optional<std::int64_t> unknown_until() const {
    std::optional<std::int64_t> out;
    for (const auto& h : events_) {
      for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i].level != LogicLevel::Unknown) continue;
        const std::int64_t end = i + 1 < h.size() ? h[i + 1].time_ps : horizon_ + 1;
        if (!out || end > *out) out = end;
      }
    }
    return out;
  }

  friend bool operator==(const SignalTraces& a, const SignalTraces& b) {
    return a.names_ == b.names_ && a.events_ == b.events_ && a.horizon_ == b.horizon_;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, NetId> index_;
  std::vector<std::vector<NetEvent>> events_;
  std::int64_t horizon_ = 0;
};

}  // namespace hdmitx
