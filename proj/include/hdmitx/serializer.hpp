#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "hdmitx/config.hpp"
#include "hdmitx/error.hpp"
#include "hdmitx/traces.hpp"
#include "hdmitx/word.hpp"

namespace hdmitx {

// Transmission order within a word. Sel1 selects D0, so D0 leaves first.
inline constexpr bool kD0First = true;

inline BitStream golden_serialize(const std::vector<Word>& words, Rational bit_period = bit_period_from_rate(1.65e9)) {
  if (words.empty()) throw Error("golden_serialize needs at least one word");
  BitStream out;
  out.bit_period = bit_period;
  for (const auto& w : words) {
    for (int i = 0; i < w.width(); ++i) {
      const int b = kD0First ? i : w.width() - 1 - i;
      out.bits.push_back(w.bit(b) ? 1 : 0);
    }
  }
  return out;
}

namespace detail {
struct Slot {
  std::int64_t rise;
  std::int64_t fall;
  int k;
};
}  // namespace detail

// Rebuilds the transmitted bits from the pre-driver lines, one bit per
// complete Sel pulse. Slots before the first data round (the round that
// follows the first intake strobe) carry no input data and are skipped.
inline BitStream extract_serial(const SignalTraces& traces, const ChannelConfig& config) {
  const int n = config.word_width;
  BitStream out;
  out.bit_period = config.bit_period();

  const auto loads = traces.rising_edges("Load");
  if (loads.empty()) return out;
  const auto sel1 = traces.rising_edges("Sel1");
  auto first = std::upper_bound(sel1.begin(), sel1.end(), loads.front());
  if (first == sel1.end()) return out;
  const std::int64_t begin = *first;

  std::vector<detail::Slot> slots;
  for (int k = 1; k <= n; ++k) {
    const NetId id = traces.id("Sel" + std::to_string(k));
    const auto& h = traces.events(id);
    for (std::size_t i = 1; i < h.size(); ++i) {
      if (h[i].level != LogicLevel::High || h[i - 1].level != LogicLevel::Low) continue;
      if (h[i].time_ps < begin) continue;
      if (i + 1 >= h.size()) break;  // still HIGH at the horizon
      slots.push_back({h[i].time_ps, h[i + 1].time_ps, k});
    }
  }
  std::sort(slots.begin(), slots.end(), [](const auto& a, const auto& b) { return a.rise < b.rise; });

  const NetId odd = traces.id("Odd"), nodd = traces.id("nOdd");
  const NetId even = traces.id("Even"), neven = traces.id("nEven");
  for (const auto& s : slots) {
    const std::int64_t mid = s.rise + (s.fall - s.rise) / 2;
    const bool is_odd = (s.k % 2) == 1;
    const LogicLevel line = traces.level_at(is_odd ? odd : even, mid);
    const LogicLevel comp = traces.level_at(is_odd ? nodd : neven, mid);
    if (line == LogicLevel::Low && comp == LogicLevel::High) {
      out.bits.push_back(1);
    } else if (line == LogicLevel::High && comp == LogicLevel::Low) {
      out.bits.push_back(0);
    } else {
      throw FramingError("slot Sel" + std::to_string(s.k) + " at t=" + std::to_string(s.rise) +
                         " ps has line/complement levels " + vcd_char(line) + "/" + vcd_char(comp));
    }
  }

  if (!slots.empty()) {
    const TimeBase tb = config.timebase();
    const std::int64_t sel_offset = config.buffer_delay_ps + config.ff_delay_ps;
    const std::int64_t k = tb.falling_index(slots.front().rise - sel_offset);
    if (k >= 0) {
      out.origin_ps = sel_offset + config.buffer_delay_ps;
      out.index0 = k;
    } else {
      out.origin_ps = slots.front().rise + config.buffer_delay_ps;
    }
  }
  return out;
}

}  // namespace hdmitx
