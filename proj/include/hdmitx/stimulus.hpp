#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "hdmitx/channel.hpp"
#include "hdmitx/error.hpp"
#include "hdmitx/word.hpp"

namespace hdmitx {

enum class ProtocolAction { EnablePulse, DisableAssert, DisableRelease };

inline const char* action_name(ProtocolAction a) {
  switch (a) {
    case ProtocolAction::EnablePulse: return "ENABLE_PULSE";
    case ProtocolAction::DisableAssert: return "DISABLE_ASSERT";
    case ProtocolAction::DisableRelease: return "DISABLE_RELEASE";
  }
  return "?";
}

inline ProtocolAction parse_action(const std::string& s) {
  if (s == "ENABLE_PULSE") return ProtocolAction::EnablePulse;
  if (s == "DISABLE_ASSERT") return ProtocolAction::DisableAssert;
  if (s == "DISABLE_RELEASE") return ProtocolAction::DisableRelease;
  throw ParseError("unknown protocol action '" + s + "'");
}

struct ScheduledAction {
  std::int64_t time_ps = 0;
  ProtocolAction action = ProtocolAction::EnablePulse;
  std::int64_t width_ps = 0;  // enable pulses only; 0 means one serial period

  friend bool operator==(const ScheduledAction&, const ScheduledAction&) = default;
};

struct ProtocolSchedule {
  std::int64_t power_on_time_ps = 0;
  std::vector<ScheduledAction> actions;

  void validate() const {
    std::int64_t last = power_on_time_ps;
    for (const auto& a : actions) {
      if (a.time_ps < last) throw ConfigError("protocol actions must be time-ordered after power-on");
      if (a.width_ps < 0) throw ConfigError("negative enable pulse width");
      last = a.time_ps;
    }
  }

  friend bool operator==(const ProtocolSchedule&, const ProtocolSchedule&) = default;
};

inline std::int64_t enable_width(const ChannelConfig& c, const ScheduledAction& a) {
  return a.width_ps > 0 ? a.width_ps : c.timebase().floor_period();
}

// Actions placed a quarter period after a Clock falling edge, so an enable
// pulse of one period straddles exactly one rising Dclk edge.
inline std::int64_t action_time(const ChannelConfig& c, std::int64_t cycle) {
  const TimeBase tb = c.timebase();
  return tb.falling(cycle) + tb.floor_period() / 4;
}

// Power-on reset (disable held two pixel periods, then released) followed by
// one enable pulse, `enable_phase` serial cycles later than the base slot.
inline ProtocolSchedule reset_and_enable(const ChannelConfig& c, int enable_phase = 0) {
  const int n = c.word_width;
  ProtocolSchedule s;
  s.actions.push_back({action_time(c, 1), ProtocolAction::DisableAssert, 0});
  s.actions.push_back({action_time(c, 1 + 2 * n), ProtocolAction::DisableRelease, 0});
  s.actions.push_back({action_time(c, 3 + 2 * n + enable_phase), ProtocolAction::EnablePulse, 0});
  return s;
}

inline ProtocolSchedule reset_only(const ChannelConfig& c) {
  ProtocolSchedule s = reset_and_enable(c);
  s.actions.pop_back();
  return s;
}

// Serial clock: LOW at t=0, falling edges at round(k*P) for k >= 1.
inline std::vector<NetEvent> clock_events(const ChannelNetlist& ch, std::int64_t until) {
  const TimeBase tb = ch.config.timebase();
  std::vector<NetEvent> out{{0, ch.clock, LogicLevel::Low}};
  for (std::int64_t k = 0;; ++k) {
    const std::int64_t r = tb.rising(k);
    if (r > until) break;
    out.push_back({r, ch.clock, LogicLevel::High});
    const std::int64_t f = tb.falling(k + 1);
    if (f > until) break;
    out.push_back({f, ch.clock, LogicLevel::Low});
  }
  return out;
}

struct DataChange {
  std::int64_t time_ps = 0;
  Word word;
};

// Full primary-input stimulus. Disable and Enable start LOW at power-on;
// the ring stays UNKNOWN until a disable+enable pair runs.
inline std::vector<NetEvent> build_stimulus(const ChannelNetlist& ch, const ProtocolSchedule& schedule,
                                            const std::vector<DataChange>& data, std::int64_t until) {
  schedule.validate();
  std::vector<NetEvent> ev = clock_events(ch, until);
  const std::int64_t t0 = schedule.power_on_time_ps;
  ev.push_back({t0, ch.disable, LogicLevel::Low});
  ev.push_back({t0, ch.enable, LogicLevel::Low});
  for (const auto& a : schedule.actions) {
    switch (a.action) {
      case ProtocolAction::DisableAssert: ev.push_back({a.time_ps, ch.disable, LogicLevel::High}); break;
      case ProtocolAction::DisableRelease: ev.push_back({a.time_ps, ch.disable, LogicLevel::Low}); break;
      case ProtocolAction::EnablePulse:
        ev.push_back({a.time_ps, ch.enable, LogicLevel::High});
        ev.push_back({a.time_ps + enable_width(ch.config, a), ch.enable, LogicLevel::Low});
        break;
    }
  }
  const Word* last = nullptr;
  for (const auto& d : data) {
    if (d.word.width() != ch.width()) throw ConfigError("word width does not match channel");
    for (int i = 0; i < ch.width(); ++i) {
      if (last && last->bit(i) == d.word.bit(i)) continue;
      ev.push_back({d.time_ps, ch.data[static_cast<std::size_t>(i)], level_of(d.word.bit(i))});
    }
    last = &d.word;
  }
  std::erase_if(ev, [&](const NetEvent& e) { return e.time_ps > until; });
  std::stable_sort(ev.begin(), ev.end(), [](const NetEvent& a, const NetEvent& b) { return a.time_ps < b.time_ps; });
  return ev;
}

struct StreamOptions {
  // Delay after each intake strobe at which the following word is driven;
  // negative selects one serial period minus the strobe delay, which lines
  // the bus change up with the next Sel rise.
  std::int64_t data_offset_ps = -1;
  // Extra time simulated after the final data round.
  std::int64_t tail_ps = 0;
};

struct StreamRun {
  SignalTraces traces;
  std::vector<NetEvent> stimulus;
  std::vector<std::int64_t> intake_times;  // Load rises used for the words
  std::int64_t horizon_ps = 0;
};

namespace detail {
inline std::int64_t default_data_offset(const ChannelNetlist& ch) {
  return ch.config.timebase().floor_period() - 2 * ch.config.buffer_delay_ps;
}
}  // namespace detail

// Streams `words` through the channel under `schedule`. Ring timing does not
// depend on data, so a first run with an idle bus locates the intake strobes
// and the second run drives each word between consecutive strobes. The
// horizon ends with the last complete data round unless `tail_ps` is set.
inline StreamRun simulate_stream(const ChannelNetlist& ch, const ProtocolSchedule& schedule,
                                 const std::vector<Word>& words, const StreamOptions& opt = {}) {
  if (words.empty()) throw ConfigError("stream needs at least one word");
  const TimeBase tb = ch.config.timebase();
  const int n = ch.width();
  std::int64_t first_action = schedule.power_on_time_ps;
  for (const auto& a : schedule.actions) first_action = std::max(first_action, a.time_ps);
  const std::int64_t rounds = static_cast<std::int64_t>(words.size()) + 3;
  const std::int64_t probe_until = first_action + tb.falling(rounds * n + 4 * n);

  const std::vector<DataChange> idle{{0, words.front()}};
  const SignalTraces probe = advance(ch, build_stimulus(ch, schedule, idle, probe_until), probe_until);
  const auto loads = probe.rising_edges("Load");
  const auto last_sel_falls = probe.falling_edges(ch.sel_name(n));
  if (loads.size() < words.size() + 1) {
    throw IncompleteTraceError("channel produced " + std::to_string(loads.size()) + " intake strobes for " +
                               std::to_string(words.size()) + " words");
  }
  const std::int64_t offset = opt.data_offset_ps >= 0 ? opt.data_offset_ps : detail::default_data_offset(ch);

  std::vector<DataChange> data{{0, words.front()}};
  for (std::size_t i = 1; i < words.size(); ++i) data.push_back({loads[i - 1] + offset, words[i]});

  // Word i is serialized in the round after its strobe; that round ends at
  // the first SelN fall after strobe i+1.
  const std::int64_t end_strobe = loads[words.size()];
  auto it = std::upper_bound(last_sel_falls.begin(), last_sel_falls.end(), end_strobe);
  if (it == last_sel_falls.end()) throw IncompleteTraceError("final data round not observed");
  const std::int64_t horizon = *it + opt.tail_ps;

  StreamRun run;
  run.stimulus = build_stimulus(ch, schedule, data, horizon);
  run.traces = advance(ch, run.stimulus, horizon);
  run.intake_times.assign(loads.begin(), loads.begin() + static_cast<std::ptrdiff_t>(words.size()));
  run.horizon_ps = horizon;
  return run;
}

}  // namespace hdmitx

namespace hdmitx {

// Two-pass run to a fixed horizon; words beyond the observed intake strobes
// are never driven.
inline StreamRun simulate_schedule(const ChannelNetlist& ch, const ProtocolSchedule& schedule,
                                   const std::vector<Word>& words, std::int64_t until,
                                   const StreamOptions& opt = {}) {
  const std::vector<DataChange> idle{{0, words.empty() ? Word(0, ch.width()) : words.front()}};
  const SignalTraces probe = advance(ch, build_stimulus(ch, schedule, idle, until), until);
  const auto loads = probe.rising_edges("Load");
  const std::int64_t offset = opt.data_offset_ps >= 0 ? opt.data_offset_ps : detail::default_data_offset(ch);
  std::vector<DataChange> data = idle;
  for (std::size_t i = 1; i < words.size() && i - 1 < loads.size(); ++i) {
    data.push_back({loads[i - 1] + offset, words[i]});
  }
  StreamRun run;
  run.stimulus = build_stimulus(ch, schedule, data, until);
  run.traces = advance(ch, run.stimulus, until);
  const std::size_t used = std::min(loads.size(), words.size());
  run.intake_times.assign(loads.begin(), loads.begin() + static_cast<std::ptrdiff_t>(used));
  run.horizon_ps = until;
  return run;
}

}  // namespace hdmitx
