#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace hdmitx;
using L = LogicLevel;

namespace {
const L kLevels[] = {L::Low, L::High, L::Unknown};

// Kleene truth tables written out independently of the library.
L ref_and(L a, L b) {
  if (a == L::Low || b == L::Low) return L::Low;
  return a == L::High && b == L::High ? L::High : L::Unknown;
}
}  // namespace

TEST(Logic, KleeneTables) {
  EXPECT_EQ(logic_not(L::Low), L::High);
  EXPECT_EQ(logic_not(L::High), L::Low);
  EXPECT_EQ(logic_not(L::Unknown), L::Unknown);
  for (L a : kLevels) {
    for (L b : kLevels) {
      EXPECT_EQ(logic_and(a, b), ref_and(a, b));
      EXPECT_EQ(logic_or(a, b), logic_not(ref_and(logic_not(a), logic_not(b))));
    }
  }
}

TEST(Rational, GridRounding) {
  const Rational p = bit_period_from_rate(1.65e9);
  EXPECT_EQ(p, Rational(20000, 33));
  const TimeBase tb(p);
  EXPECT_EQ(tb.falling(1), 606);
  EXPECT_EQ(tb.falling(2), 1212);
  EXPECT_EQ(tb.falling(33), 20000);
  EXPECT_EQ(tb.rising(0), 303);
  EXPECT_EQ(tb.floor_period(), 606);
  EXPECT_EQ(tb.ceil_period(), 607);
  EXPECT_EQ(tb.falling_index(20000), 33);
  EXPECT_EQ(tb.falling_index(20001), -1);
  EXPECT_EQ(Rational(-7, 2).round(), -3);
  EXPECT_EQ(Rational(-7, 2).floor(), -4);
  EXPECT_THROW(bit_period_from_rate(0), ConfigError);
}

TEST(Rational, NoDriftOverLongRuns) {
  const TimeBase tb(bit_period_from_rate(1.65e9));
  for (std::int64_t k = 0; k < 100000; k += 33) EXPECT_EQ(tb.falling(k), k / 33 * 20000);
}

TEST(Reset, SampledEnableStartsToken) {
  ResetState s;
  s = eval_reset(s, ClockEdge::Rising, {L::Low, L::High, L::Low}).state;
  const auto r = eval_reset(s, ClockEdge::Falling, {L::Low, L::Low, L::Low});
  EXPECT_EQ(r.start, L::High);
  // The next falling edge, with Enable sampled LOW, clears it.
  auto s2 = eval_reset(r.state, ClockEdge::Rising, {L::Low, L::Low, L::Low}).state;
  EXPECT_EQ(eval_reset(s2, ClockEdge::Falling, {L::Low, L::Low, L::Low}).start, L::Low);
}

TEST(Reset, DisableForcesLow) {
  ResetState s;
  for (L en : kLevels) {
    for (L sel : kLevels) {
      s = eval_reset(s, ClockEdge::Rising, {L::High, en, sel}).state;
      EXPECT_EQ(eval_reset(s, ClockEdge::Falling, {L::High, en, sel}).start, L::Low);
    }
  }
}

TEST(Reset, RecirculationFromBufferedSel) {
  ResetState s{L::Low, L::Low, L::Low};
  s = eval_reset(s, ClockEdge::Falling, {L::Low, L::Low, L::High}).state;
  EXPECT_EQ(eval_reset(s, ClockEdge::None, {L::Low, L::Low, L::High}).start, L::High);
  EXPECT_EQ(eval_reset(s, ClockEdge::None, {L::Low, L::Low, L::Low}).start, L::Low);
  EXPECT_EQ(eval_reset(s, ClockEdge::None, {L::Low, L::High, L::High}).start, L::Low);
}

TEST(Reset, UnknownInputsGiveUnknownStart) {
  EXPECT_EQ(eval_reset(ResetState{}, ClockEdge::Falling, {L::Low, L::Low, L::Low}).start, L::Unknown);
  ResetState s{L::Low, L::Low, L::Low};
  EXPECT_EQ(eval_reset(s, ClockEdge::None, {L::Unknown, L::Low, L::High}).start, L::Unknown);
}

TEST(Reset, TotalOverAllInputs) {
  // Property: Start is LOW whenever Disable is HIGH, and known whenever all
  // inputs and state are known.
  for (L sd : kLevels)
    for (L se : kLevels)
      for (L ar : kLevels)
        for (L d : kLevels)
          for (L e : kLevels)
            for (L b : kLevels) {
              const auto r = eval_reset({sd, se, ar}, ClockEdge::None, {d, e, b});
              if (d == L::High) {
                EXPECT_EQ(r.start, L::Low);
              }
              if (is_known(ar) && is_known(d) && is_known(e) && is_known(b)) {
                EXPECT_TRUE(is_known(r.start));
              }
            }
}

TEST(Traces, RecordMergesAndSkips) {
  SignalTraces t;
  const NetId a = t.add_net("a");
  t.record(a, 5, L::High);
  t.record(a, 5, L::Low);
  t.record(a, 7, L::Low);
  ASSERT_EQ(t.events(a).size(), 2u);
  EXPECT_EQ(t.events(a)[1].level, L::Low);
  EXPECT_THROW(t.record(a, 3, L::High), Error);
  EXPECT_THROW(t.add_net("a"), Error);
  EXPECT_EQ(t.level_at(a, 4), L::Unknown);
  EXPECT_EQ(t.level_at(a, 5), L::Low);
}

namespace {
struct Pair {
  Netlist nl;
  NetId in, mid, out;
};
Pair chain(std::int64_t d1, std::int64_t d2, bool invert) {
  Pair p;
  p.in = p.nl.add_net("in", NetKind::Input);
  p.mid = p.nl.add_net("mid");
  p.out = p.nl.add_net("out");
  p.nl.add(BufferSpec{p.in, p.mid, d1, false});
  p.nl.add(BufferSpec{p.mid, p.out, d2, invert});
  return p;
}
}  // namespace

TEST(Kernel, BufferTransportDelay) {
  auto p = chain(15, 20, true);
  const std::vector<NetEvent> st{{0, p.in, L::Low}, {100, p.in, L::High}, {110, p.in, L::Low}};
  const auto tr = simulate(p.nl, st, 200);
  EXPECT_EQ(tr.level_at(p.mid, 114), L::Low);
  EXPECT_EQ(tr.level_at(p.mid, 115), L::High);
  EXPECT_EQ(tr.level_at(p.mid, 125), L::Low);
  EXPECT_EQ(tr.level_at(p.out, 134), L::High);
  EXPECT_EQ(tr.level_at(p.out, 135), L::Low);
  EXPECT_EQ(tr.level_at(p.out, 145), L::High);
  EXPECT_EQ(tr.horizon(), 200);
}

TEST(Kernel, FlipFlopSamplesPreEdgeValue) {
  // Data and clock change at the same instant: the flip-flop sees the old data.
  Netlist nl;
  const NetId clk = nl.add_net("clk", NetKind::Input), d = nl.add_net("d", NetKind::Input), q = nl.add_net("q");
  nl.add(FlipFlopSpec{clk, d, q, 30, Trigger::Falling, std::nullopt});
  const std::vector<NetEvent> st{{0, clk, L::High}, {0, d, L::Low}, {100, clk, L::Low}, {100, d, L::High},
                                 {200, clk, L::High}, {300, clk, L::Low}};
  const auto tr = simulate(nl, st, 400);
  EXPECT_EQ(tr.level_at(q, 129), L::Unknown);
  EXPECT_EQ(tr.level_at(q, 130), L::Low);
  EXPECT_EQ(tr.level_at(q, 329), L::Low);
  EXPECT_EQ(tr.level_at(q, 330), L::High);
}

TEST(Kernel, FlipFlopChangesOnlyAtTriggerEdges) {
  Netlist nl;
  const NetId clk = nl.add_net("clk", NetKind::Input), d = nl.add_net("d", NetKind::Input), q = nl.add_net("q");
  nl.add(FlipFlopSpec{clk, d, q, 30, Trigger::Falling, std::nullopt});
  testing_support::Gen g(7);
  std::vector<NetEvent> st{{0, clk, L::Low}, {0, d, L::Low}};
  std::vector<std::int64_t> falls;
  L c = L::Low;
  for (std::int64_t t = 50; t < 20000; t += 50) {
    if (g.coin()) st.push_back({t, d, level_of(g.coin())});
    if (t % 300 == 0) {
      c = logic_not(c);
      st.push_back({t, clk, c});
      if (c == L::Low) falls.push_back(t);
    }
  }
  const auto tr = simulate(nl, st, 20100);
  for (const auto& e : tr.events(q)) {
    if (e.time_ps == 0) continue;
    EXPECT_TRUE(std::find(falls.begin(), falls.end(), e.time_ps - 30) != falls.end()) << e.time_ps;
  }
}

TEST(Kernel, AsyncClearHasPriority) {
  Netlist nl;
  const NetId clk = nl.add_net("clk", NetKind::Input), d = nl.add_net("d", NetKind::Input);
  const NetId clr = nl.add_net("clr", NetKind::Input), q = nl.add_net("q");
  nl.add(FlipFlopSpec{clk, d, q, 10, Trigger::Rising, clr});
  const std::vector<NetEvent> st{{0, clk, L::Low}, {0, d, L::High}, {0, clr, L::Low}, {100, clk, L::High},
                                 {150, clr, L::High}, {200, clk, L::Low}, {300, clk, L::High}, {350, clr, L::Low}};
  const auto tr = simulate(nl, st, 500);
  EXPECT_EQ(tr.level_at(q, 110), L::High);
  EXPECT_EQ(tr.level_at(q, 160), L::Low);
  EXPECT_EQ(tr.level_at(q, 320), L::Low);  // clock ignored while cleared
}

TEST(Kernel, ZeroDelayLoopHitsOscillationGuard) {
  // Line pulled LOW while En is HIGH and its own buffered copy is HIGH: a
  // ring oscillator with no delay.
  Netlist nl;
  const NetId en = nl.add_net("En", NetKind::Input), a = nl.add_net("A"), b = nl.add_net("B");
  nl.add(LineSpec{{{en, b}}, false, a, 0});
  nl.add(BufferSpec{a, b, 0, false});
  const std::vector<NetEvent> st{{0, en, L::Low}, {10, en, L::High}};
  EXPECT_THROW(simulate(nl, st, 100, 1000), OscillationError);
  const std::vector<NetEvent> calm{{0, en, L::Low}};
  EXPECT_NO_THROW(simulate(nl, calm, 100, 1000));
}

TEST(Kernel, StimulusValidation) {
  auto p = chain(1, 1, false);
  const std::vector<NetEvent> internal{{0, p.mid, L::Low}};
  EXPECT_THROW(simulate(p.nl, internal, 10), Error);
  const std::vector<NetEvent> unordered{{5, p.in, L::Low}, {3, p.in, L::High}};
  EXPECT_THROW(simulate(p.nl, unordered, 10), Error);
  const std::vector<NetEvent> late{{50, p.in, L::Low}};
  EXPECT_THROW(simulate(p.nl, late, 10), Error);
}

TEST(Kernel, EventsAlternateAndAreOrdered) {
  // Property over random buffer chains and random input activity.
  testing_support::Gen g(11);
  for (int c = 0; c < 50; ++c) {
    auto p = chain(g.range(1, 40), g.range(0, 40), g.coin());
    std::vector<NetEvent> st;
    for (std::int64_t t = 0; t < 2000; t += g.range(1, 60)) st.push_back({t, p.in, level_of(g.coin())});
    const auto tr = simulate(p.nl, st, 2500);
    for (NetId id = 0; id < tr.net_count(); ++id) {
      const auto& h = tr.events(id);
      for (std::size_t i = 1; i < h.size(); ++i) {
        ASSERT_LT(h[i - 1].time_ps, h[i].time_ps);
        ASSERT_NE(h[i - 1].level, h[i].level);
      }
    }
  }
}
