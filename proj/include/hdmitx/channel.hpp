#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdmitx/config.hpp"
#include "hdmitx/kernel.hpp"

namespace hdmitx {

struct SelectorBlock {
  int slot = 0;  // 1-based; slot k is driven by Sel<k> and carries D<k-1>
  NetId select = 0;
  NetId data = 0;
  NetId line = 0;        // Odd for odd slots, Even for even slots
  NetId complement = 0;  // nOdd / nEven
};

// Gate-level data channel: splitter, flip-flop token ring with the parallel
// iSel1 stage, RESET block, intake register, D8/D9 hold flip-flops and the
// four wired pre-driver lines.
struct ChannelNetlist {
  ChannelConfig config;
  Netlist netlist;

  NetId clock = 0, disable = 0, enable = 0;
  NetId dclk = 0, nclk = 0, start = 0, isel1 = 0, buffered_sel = 0;
  NetId load = 0, show = 0, read = 0;
  NetId odd = 0, even = 0, nodd = 0, neven = 0;
  std::vector<NetId> data;     // D0..D(N-1)
  std::vector<NetId> sel;      // Sel1..SelN at index 0..N-1
  std::vector<NetId> latched;  // intake register outputs L0..L(N-1)
  std::vector<NetId> hold;     // hold flip-flop outputs for the last two bits
  std::vector<SelectorBlock> selectors;

  int width() const { return config.word_width; }
  int ring_flip_flops() const { return width() + 1; }
  int hold_flip_flops() const { return static_cast<int>(hold.size()); }
  int flip_flops() const {
    int n = 0;
    for (const auto& c : netlist.components()) n += std::holds_alternative<FlipFlopSpec>(c) ? 1 : 0;
    return n;
  }
  int splitters() const { return 1; }
  int reset_circuits() const {
    int n = 0;
    for (const auto& c : netlist.components()) n += std::holds_alternative<ResetSpec>(c) ? 1 : 0;
    return n;
  }

  const std::string& name(NetId id) const { return netlist.net_names().at(id); }
  std::string sel_name(int k) const { return "Sel" + std::to_string(k); }
  std::string buffered_sel_name() const { return "Buffered_Sel" + std::to_string(width()); }

  // Sel<k> rises this long after the Clock falling edge that clocks it.
  std::int64_t sel_offset_ps() const { return config.buffer_delay_ps + config.ff_delay_ps; }
  // Pre-driver lines follow their select by one gate delay.
  std::int64_t line_offset_ps() const { return sel_offset_ps() + config.buffer_delay_ps; }
};

inline ChannelNetlist build_channel(const ChannelConfig& config) {
  validate_logic(config);
  ChannelNetlist ch;
  ch.config = config;
  auto& nl = ch.netlist;
  const int n = config.word_width;
  const std::int64_t buf = config.buffer_delay_ps;
  const std::int64_t ff = config.ff_delay_ps;

  ch.clock = nl.add_net("Clock", NetKind::Input);
  ch.disable = nl.add_net("Disable", NetKind::Input);
  ch.enable = nl.add_net("Enable", NetKind::Input);
  for (int i = 0; i < n; ++i) ch.data.push_back(nl.add_net("D" + std::to_string(i), NetKind::Input));

  ch.dclk = nl.add_net("Dclk");
  ch.nclk = nl.add_net("Nclk");
  ch.start = nl.add_net("Start");
  ch.isel1 = nl.add_net("iSel1");
  for (int k = 1; k <= n; ++k) ch.sel.push_back(nl.add_net(ch.sel_name(k)));
  ch.buffered_sel = nl.add_net(ch.buffered_sel_name());
  ch.load = nl.add_net("Load");
  for (int i = 0; i < n; ++i) ch.latched.push_back(nl.add_net("L" + std::to_string(i)));
  ch.show = nl.add_net("Show");
  ch.read = nl.add_net("Read");
  for (int i = n - 2; i < n; ++i) ch.hold.push_back(nl.add_net("Hold" + std::to_string(i)));
  ch.odd = nl.add_net("Odd");
  ch.even = nl.add_net("Even");
  ch.nodd = nl.add_net("nOdd");
  ch.neven = nl.add_net("nEven");

  // SPLITTER
  nl.add(BufferSpec{ch.clock, ch.dclk, buf, false});
  nl.add(BufferSpec{ch.dclk, ch.nclk, config.skew_ps, true});

  // RESET
  nl.add(ResetSpec{ch.dclk, ch.disable, ch.enable, ch.buffered_sel, ch.start, ff});

  // Ring: iSel1 in parallel with Sel1, then Sel(k) -> Sel(k+1).
  nl.add(FlipFlopSpec{ch.dclk, ch.start, ch.isel1, ff, Trigger::Falling, std::nullopt});
  nl.add(FlipFlopSpec{ch.dclk, ch.start, ch.sel[0], ff, Trigger::Falling, std::nullopt});
  for (int k = 1; k < n; ++k) {
    nl.add(FlipFlopSpec{ch.dclk, ch.sel[k - 1], ch.sel[k], ff, Trigger::Falling, std::nullopt});
  }
  nl.add(BufferSpec{ch.sel[n - 1], ch.buffered_sel, config.fo4_stages * buf, false});

  // FD: intake strobe from Sel(N-1)
  nl.add(BufferSpec{ch.sel[n - 2], ch.load, 2 * buf, false});
  nl.add(LatchSpec{ch.load, ch.data, ch.latched, ch.disable, buf});

  // FDL: Show/Read from Sel3, hold flip-flops for the last two bits.
  nl.add(BufferSpec{ch.sel[2], ch.show, 2 * buf, true});
  nl.add(BufferSpec{ch.sel[2], ch.read, 2 * buf, false});
  for (int j = 0; j < 2; ++j) {
    nl.add(FlipFlopSpec{ch.show, ch.latched[n - 2 + j], ch.hold[j], ff, Trigger::Falling, ch.disable});
  }

  // SEL blocks onto the wired lines.
  LineSpec odd{{}, false, ch.odd, buf}, nodd{{}, true, ch.nodd, buf};
  LineSpec even{{}, false, ch.even, buf}, neven{{}, true, ch.neven, buf};
  for (int k = 1; k <= n; ++k) {
    const NetId bit = k <= n - 2 ? ch.latched[k - 1] : ch.hold[k - (n - 1)];
    const bool is_odd = (k % 2) == 1;
    ch.selectors.push_back({k, ch.sel[k - 1], bit, is_odd ? ch.odd : ch.even, is_odd ? ch.nodd : ch.neven});
    (is_odd ? odd : even).taps.emplace_back(ch.sel[k - 1], bit);
    (is_odd ? nodd : neven).taps.emplace_back(ch.sel[k - 1], bit);
  }
  nl.add(std::move(odd));
  nl.add(std::move(even));
  nl.add(std::move(nodd));
  nl.add(std::move(neven));
  return ch;
}

// Simulates the channel on stimulus for Clock, Disable, Enable and D0..D(N-1).
inline SignalTraces advance(const ChannelNetlist& ch, std::span<const NetEvent> stimulus, std::int64_t until) {
  return simulate(ch.netlist, stimulus, until, ch.config.max_delta_iterations);
}

}  // namespace hdmitx
