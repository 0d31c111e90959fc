#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hdmitx/error.hpp"
#include "hdmitx/logic.hpp"
#include "hdmitx/reset.hpp"
#include "hdmitx/traces.hpp"

namespace hdmitx {

enum class Trigger { Falling, Rising };

// out = in (or !in) after a transport delay.
struct BufferSpec {
  NetId in = 0;
  NetId out = 0;
  std::int64_t delay_ps = 0;
  bool invert = false;
};

// Edge-triggered D flip-flop with an optional active-high asynchronous clear.
struct FlipFlopSpec {
  NetId clock = 0;
  NetId data = 0;
  NetId q = 0;
  std::int64_t delay_ps = 0;
  Trigger trigger = Trigger::Falling;
  std::optional<NetId> clear;
};

struct ResetSpec {
  NetId dclk = 0;
  NetId disable = 0;
  NetId enable = 0;
  NetId buffered_sel = 0;
  NetId start = 0;
  std::int64_t delay_ps = 0;
};

// Parallel register captured on a rising strobe, cleared while `clear` is HIGH.
struct LatchSpec {
  NetId strobe = 0;
  std::vector<NetId> d;
  std::vector<NetId> q;
  NetId clear = 0;
  std::int64_t delay_ps = 0;
};

// Wired active-low pre-driver input: pulled up, pulled LOW by any tap whose
// select is HIGH and whose (possibly inverted) data bit is 1.
struct LineSpec {
  std::vector<std::pair<NetId, NetId>> taps;  // (select, data)
  bool invert_data = false;
  NetId out = 0;
  std::int64_t delay_ps = 0;
};

using ComponentSpec = std::variant<BufferSpec, FlipFlopSpec, ResetSpec, LatchSpec, LineSpec>;

enum class NetKind { Input, Internal };

// Resolved pre-driver line level for one tap set.
inline LogicLevel resolve_line(std::span<const LogicLevel> sel, std::span<const LogicLevel> bit) {
  bool uncertain = false;
  for (std::size_t i = 0; i < sel.size(); ++i) {
    const LogicLevel pull = logic_and(sel[i], bit[i]);
    if (pull == LogicLevel::High) return LogicLevel::Low;
    if (pull == LogicLevel::Unknown) uncertain = true;
  }
  return uncertain ? LogicLevel::Unknown : LogicLevel::High;
}

class Netlist {
 public:
  NetId add_net(const std::string& name, NetKind kind = NetKind::Internal) {
    for (const auto& n : names_) {
      if (n == name) throw Error("duplicate net '" + name + "'");
    }
    names_.push_back(name);
    kinds_.push_back(kind);
    return static_cast<NetId>(names_.size() - 1);
  }

  void add(ComponentSpec c) { components_.push_back(std::move(c)); }

  std::size_t net_count() const { return names_.size(); }
  const std::vector<std::string>& net_names() const { return names_; }
  NetKind kind(NetId id) const { return kinds_.at(id); }
  const std::vector<ComponentSpec>& components() const { return components_; }

  NetId id(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return static_cast<NetId>(i);
    }
    throw Error("no net named '" + name + "'");
  }

 private:
  std::vector<std::string> names_;
  std::vector<NetKind> kinds_;
  std::vector<ComponentSpec> components_;
};

// Single-threaded event-driven evaluation of a Netlist. Events at one
// timestamp are applied in delta cycles; components see the pre-delta value
// of their inputs through prev(), which gives flip-flops race-free sampling.
class Simulator {
 public:
  Simulator(const Netlist& netlist, int max_deltas)
      : netlist_(netlist),
        max_deltas_(max_deltas),
        value_(netlist.net_count(), LogicLevel::Unknown),
        prev_(netlist.net_count(), LogicLevel::Unknown),
        projected_(netlist.net_count(), LogicLevel::Unknown),
        changed_stamp_(netlist.net_count(), 0),
        fanout_(netlist.net_count()),
        eval_stamp_(netlist.components().size(), 0),
        reset_state_(netlist.components().size()) {
    for (const auto& name : netlist.net_names()) traces_.add_net(name);
    const auto& comps = netlist.components();
    for (std::size_t c = 0; c < comps.size(); ++c) {
      std::visit([&](const auto& spec) { connect(spec, static_cast<std::uint32_t>(c)); }, comps[c]);
    }
  }

  void inject(const NetEvent& e) { push(e.time_ps, e.net, e.level); }

  SignalTraces run(std::int64_t until) {
    while (!queue_.empty() && queue_.top().time <= until) {
      const std::int64_t t = queue_.top().time;
      int deltas = 0;
      while (!queue_.empty() && queue_.top().time == t) {
        if (++deltas > max_deltas_) {
          throw OscillationError("more than " + std::to_string(max_deltas_) + " delta iterations at t=" +
                                 std::to_string(t) + " ps");
        }
        delta(t);
      }
    }
    traces_.set_horizon(until);
    return std::move(traces_);
  }

 private:
  struct Pending {
    std::int64_t time;
    std::uint64_t seq;
    NetId net;
    LogicLevel level;
    bool operator>(const Pending& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };

  void push(std::int64_t t, NetId net, LogicLevel level) { queue_.push(Pending{t, seq_++, net, level}); }

  void listen(NetId net, std::uint32_t comp) { fanout_[net].push_back(comp); }

  void connect(const BufferSpec& s, std::uint32_t c) { listen(s.in, c); }
  void connect(const FlipFlopSpec& s, std::uint32_t c) {
    listen(s.clock, c);
    if (s.clear) listen(*s.clear, c);
  }
  void connect(const ResetSpec& s, std::uint32_t c) {
    listen(s.dclk, c);
    listen(s.disable, c);
    listen(s.enable, c);
    listen(s.buffered_sel, c);
  }
  void connect(const LatchSpec& s, std::uint32_t c) {
    listen(s.strobe, c);
    listen(s.clear, c);
  }
  void connect(const LineSpec& s, std::uint32_t c) {
    for (auto [sel, bit] : s.taps) {
      listen(sel, c);
      listen(bit, c);
    }
  }

  void delta(std::int64_t t) {
    const std::uint64_t limit = seq_;
    ++stamp_;
    changed_.clear();
    while (!queue_.empty() && queue_.top().time == t && queue_.top().seq < limit) {
      const Pending p = queue_.top();
      queue_.pop();
      if (changed_stamp_[p.net] != stamp_) {
        changed_stamp_[p.net] = stamp_;
        prev_[p.net] = value_[p.net];
        changed_.push_back(p.net);
      }
      value_[p.net] = p.level;
      if (netlist_.kind(p.net) == NetKind::Input) projected_[p.net] = p.level;
    }
    to_eval_.clear();
    for (NetId n : changed_) {
      if (value_[n] != prev_[n]) traces_.record(n, t, value_[n]);
      for (auto c : fanout_[n]) {
        if (eval_stamp_[c] != stamp_) {
          eval_stamp_[c] = stamp_;
          to_eval_.push_back(c);
        }
      }
    }
    std::sort(to_eval_.begin(), to_eval_.end());
    const auto& comps = netlist_.components();
    for (auto c : to_eval_) {
      std::visit([&](const auto& spec) { evaluate(spec, c, t); }, comps[c]);
    }
    for (NetId n : changed_) prev_[n] = value_[n];
  }

  LogicLevel now(NetId n) const { return value_[n]; }
  LogicLevel before(NetId n) const { return changed_stamp_[n] == stamp_ ? prev_[n] : value_[n]; }
  bool changed(NetId n) const { return changed_stamp_[n] == stamp_ && prev_[n] != value_[n]; }

  void drive(NetId net, LogicLevel level, std::int64_t t, std::int64_t delay) {
    if (projected_[net] == level) return;
    projected_[net] = level;
    push(t + delay, net, level);
  }

  ClockEdge edge_of(NetId clk) const {
    if (!changed(clk)) return ClockEdge::None;
    const LogicLevel a = before(clk), b = now(clk);
    if (a == LogicLevel::Low && b == LogicLevel::High) return ClockEdge::Rising;
    if (a == LogicLevel::High && b == LogicLevel::Low) return ClockEdge::Falling;
    return ClockEdge::None;
  }
  // X involved on either side of the transition.
  bool ambiguous_edge(NetId clk) const {
    return changed(clk) && (before(clk) == LogicLevel::Unknown || now(clk) == LogicLevel::Unknown);
  }

  void evaluate(const BufferSpec& s, std::uint32_t, std::int64_t t) {
    const LogicLevel v = s.invert ? logic_not(now(s.in)) : now(s.in);
    drive(s.out, v, t, s.delay_ps);
  }

  void evaluate(const FlipFlopSpec& s, std::uint32_t, std::int64_t t) {
    if (s.clear) {
      const LogicLevel clr = now(*s.clear);
      if (clr == LogicLevel::High) {
        drive(s.q, LogicLevel::Low, t, s.delay_ps);
        return;
      }
      if (clr == LogicLevel::Unknown && projected_[s.q] != LogicLevel::Low) {
        drive(s.q, LogicLevel::Unknown, t, s.delay_ps);
        return;
      }
    }
    const ClockEdge want = s.trigger == Trigger::Falling ? ClockEdge::Falling : ClockEdge::Rising;
    const LogicLevel sample = before(s.data);
    if (edge_of(s.clock) == want) {
      drive(s.q, sample, t, s.delay_ps);
    } else if (ambiguous_edge(s.clock) && sample != projected_[s.q]) {
      drive(s.q, LogicLevel::Unknown, t, s.delay_ps);
    }
  }

  void evaluate(const ResetSpec& s, std::uint32_t c, std::int64_t t) {
    ClockEdge e = edge_of(s.dclk);
    ResetState& st = reset_state_[c];
    const ResetInputs sampled{before(s.disable), before(s.enable), before(s.buffered_sel)};
    if (e == ClockEdge::Rising) {
      st = eval_reset(st, ClockEdge::Rising, sampled).state;
    } else if (e == ClockEdge::Falling) {
      st = eval_reset(st, ClockEdge::Falling, sampled).state;
    } else if (ambiguous_edge(s.dclk)) {
      st = ResetState{};
    }
    const ResetInputs current{now(s.disable), now(s.enable), now(s.buffered_sel)};
    drive(s.start, eval_reset(st, ClockEdge::None, current).start, t, s.delay_ps);
  }

  void evaluate(const LatchSpec& s, std::uint32_t, std::int64_t t) {
    const LogicLevel clr = now(s.clear);
    const bool strobe = edge_of(s.strobe) == ClockEdge::Rising;
    const bool fuzzy = ambiguous_edge(s.strobe);
    for (std::size_t i = 0; i < s.q.size(); ++i) {
      if (clr == LogicLevel::High) {
        drive(s.q[i], LogicLevel::Low, t, s.delay_ps);
      } else if (clr == LogicLevel::Unknown && projected_[s.q[i]] != LogicLevel::Low) {
        drive(s.q[i], LogicLevel::Unknown, t, s.delay_ps);
      } else if (strobe) {
        drive(s.q[i], before(s.d[i]), t, s.delay_ps);
      } else if (fuzzy && before(s.d[i]) != projected_[s.q[i]]) {
        drive(s.q[i], LogicLevel::Unknown, t, s.delay_ps);
      }
    }
  }

  void evaluate(const LineSpec& s, std::uint32_t, std::int64_t t) {
    sel_buf_.clear();
    bit_buf_.clear();
    for (auto [sel, bit] : s.taps) {
      sel_buf_.push_back(now(sel));
      bit_buf_.push_back(s.invert_data ? logic_not(now(bit)) : now(bit));
    }
    drive(s.out, resolve_line(sel_buf_, bit_buf_), t, s.delay_ps);
  }

  const Netlist& netlist_;
  int max_deltas_;
  std::vector<LogicLevel> value_;
  std::vector<LogicLevel> prev_;
  std::vector<LogicLevel> projected_;
  std::vector<std::uint64_t> changed_stamp_;
  std::vector<std::vector<std::uint32_t>> fanout_;
  std::vector<std::uint64_t> eval_stamp_;
  std::vector<ResetState> reset_state_;
  std::vector<NetId> changed_;
  std::vector<std::uint32_t> to_eval_;
  std::vector<LogicLevel> sel_buf_, bit_buf_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t stamp_ = 0;
  SignalTraces traces_;
};

// Runs a netlist against primary-input stimulus up to `until` (inclusive).
inline SignalTraces simulate(const Netlist& netlist, std::span<const NetEvent> stimulus, std::int64_t until,
                             int max_deltas = 1000) {
  std::int64_t last = 0;
  for (const auto& e : stimulus) {
    if (e.net >= netlist.net_count()) throw Error("stimulus on unknown net");
    if (netlist.kind(e.net) != NetKind::Input) {
      throw Error("stimulus on non-input net '" + netlist.net_names()[e.net] + "'");
    }
    if (e.time_ps < last) throw Error("stimulus not time-ordered");
    last = e.time_ps;
  }
  if (until < last) throw Error("horizon precedes last stimulus event");
  Simulator sim(netlist, max_deltas);
  for (const auto& e : stimulus) sim.inject(e);
  return sim.run(until);
}

}  // namespace hdmitx
