#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace hdmitx;
using L = LogicLevel;
using testing_support::idle_lines;

TEST(Synth, StandbyIsFlat) {
  const ChannelConfig c;
  const auto tx = synthesize_tx(idle_lines(20000), c.driver, c.dt_ps, c.bit_period());
  ASSERT_EQ(tx.tx_plus.size(), 2001u);
  for (double v : tx.tx_plus.samples) ASSERT_DOUBLE_EQ(v, 3.299);
  for (double v : tx.tx_minus.samples) ASSERT_DOUBLE_EQ(v, 3.299);
}

TEST(Synth, ContinuousSinkSettlesToLowLevel) {
  const ChannelConfig c;
  auto lines = idle_lines(20000);
  lines.record(lines.id("nOdd"), 1000, L::Low);
  const auto tx = synthesize_tx(lines, c.driver, c.dt_ps, c.bit_period());
  EXPECT_NEAR(tx.tx_plus.samples.back(), 2.8019, 1e-4);
  EXPECT_NEAR(tx.tx_minus.samples.back(), 3.299, 1e-12);
  // Tx- sinks on the true lines.
  auto ones = idle_lines(20000);
  ones.record(ones.id("Even"), 1000, L::Low);
  EXPECT_NEAR(synthesize_tx(ones, c.driver, c.dt_ps, c.bit_period()).tx_minus.samples.back(), 2.8019, 1e-4);
}

TEST(Synth, ExponentialClosedForm) {
  ChannelConfig c;
  c.dt_ps = 1;
  EXPECT_NEAR(exponential_tau_ps(104), 75.0, 0.03);
  EXPECT_NEAR(exponential_tau_ps(104) * std::log(0.8 / 0.2), 104, 1e-12);
  auto lines = idle_lines(3000);
  lines.record(lines.id("nOdd"), 1000, L::Low);
  const auto tx = synthesize_tx(lines, c.driver, c.dt_ps, c.bit_period());
  const double hi = c.driver.high_level_v(), lo = c.driver.low_level_v(), tau = c.driver.t_rf_ps / std::log(4.0);
  for (std::int64_t dt : {0, 10, 75, 200, 500}) {
    EXPECT_NEAR(tx.tx_plus.samples[static_cast<std::size_t>(1000 + dt)], lo + (hi - lo) * std::exp(-dt / tau), 1e-12);
  }
}

TEST(Synth, RaisedCosineDuration) {
  // 20%-80% of 0.5(1 - cos(pi u)) spans 1 - 2 acos(0.6)/pi of the duration.
  const double frac = 1.0 - 2.0 * std::acos(0.6) / M_PI;
  EXPECT_NEAR(raised_cosine_duration_ps(104) * frac, 104, 1e-9);
}

TEST(Synth, EdgeMeasureConsistency) {
  // Property: measured 20-80 time tracks t_rf for both models and a range of dt.
  testing_support::Gen g(31);
  for (int i = 0; i < 40; ++i) {
    ChannelConfig c;
    c.dt_ps = g.range(1, 18);
    c.driver.t_rf_ps = g.uniform(40, 200);
    c.driver.edge_model = g.coin() ? EdgeModel::Exponential : EdgeModel::RaisedCosine;
    auto lines = idle_lines(40000);
    for (int k = 1; k <= 10; ++k) lines.record(lines.id("nOdd"), 3000 * k + g.range(0, 50), k % 2 ? L::Low : L::High);
    const auto tx = synthesize_tx(lines, c.driver, c.dt_ps, c.bit_period());
    const double tol = std::max(1.0, static_cast<double>(c.dt_ps));
    const double r = measure_edge(tx.tx_plus, EdgeKind::Rise), f = measure_edge(tx.tx_plus, EdgeKind::Fall);
    EXPECT_NEAR(r, c.driver.t_rf_ps, tol);
    EXPECT_NEAR(f, c.driver.t_rf_ps, tol);
  }
}

TEST(Synth, SamplingTooCoarse) {
  const ChannelConfig c;
  EXPECT_THROW(synthesize_tx(idle_lines(1000), c.driver, 19, c.bit_period()), SamplingError);
  EXPECT_THROW(synthesize_tx(idle_lines(1000), c.driver, 0, c.bit_period()), SamplingError);
}

TEST(Synth, DifferentialComplementarity) {
  const ChannelConfig c;
  const auto run = simulate_stream(build_channel(c), reset_and_enable(c), testing_support::Gen(4).words(200));
  const auto tx = synthesize_tx(run.traces, c.driver, c.dt_ps, c.bit_period());
  const auto bits = extract_serial(run.traces, c);
  const auto& d = c.driver;
  const double sum = 2 * d.avcc_v - (d.i_sink_a + 2 * d.i_standby_a) * d.r_term_ohm;
  const double tau = exponential_tau_ps(d.t_rf_ps);
  // Settled: at least 3 tau after the last transition on either line.
  std::size_t checked = 0;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    const auto t0 = bits.boundary_ps(static_cast<std::int64_t>(j));
    const auto t1 = bits.boundary_ps(static_cast<std::int64_t>(j) + 1);
    const auto t = t0 + static_cast<std::int64_t>(std::ceil(5 * tau / c.dt_ps)) * c.dt_ps;
    if (t >= t1) continue;
    const auto i = static_cast<std::size_t>(t / c.dt_ps);
    EXPECT_NEAR(tx.tx_plus.samples[i] + tx.tx_minus.samples[i], sum, 1e-3);
    ++checked;
  }
  EXPECT_EQ(checked, bits.size());
}

TEST(Supply, NoTransitionsIsDc) {
  const SpikeModel m;
  const auto tr = supply_current({}, m, 10, 0, 1000);
  for (double v : tr.samples) ASSERT_EQ(v, m.i_dc_a);
}

TEST(Supply, ChargeConservation) {
  // Property: excess charge = q_c per event, for random event placements.
  testing_support::Gen g(13);
  for (int i = 0; i < 100; ++i) {
    SpikeModel m;
    m.w_ps = g.uniform(5, 120);
    m.q_c = g.uniform(1e-15, 1e-13);
    std::vector<std::int64_t> ev;
    const auto n = g.range(1, 30);
    for (int k = 0; k < n; ++k) ev.push_back(g.range(200, 9800));
    const auto dt = g.range(1, 18);
    const auto tr = supply_current(ev, m, dt, 0, static_cast<std::size_t>(10000 / dt));
    EXPECT_NEAR(excess_charge(tr, m.i_dc_a), m.q_c * static_cast<double>(n), 1e-9 * m.q_c * static_cast<double>(n));
    for (double v : tr.samples) ASSERT_GE(v, 0);
  }
}

TEST(Supply, SingleSpikeShape) {
  SpikeModel m;
  const auto tr = supply_current({1000}, m, 1, 0, 2000);
  // Peak of a triangle with charge q and base w is 2q/w.
  const double peak = 2 * m.q_c / (m.w_ps * 1e-12);
  EXPECT_NEAR(tr.samples[1000] - m.i_dc_a, peak, 0.02 * peak);
  EXPECT_EQ(tr.samples[969], m.i_dc_a);
  EXPECT_EQ(tr.samples[1031], m.i_dc_a);
}

TEST(Supply, PseudoShadowSpikesOnBitGrid) {
  const ChannelConfig c;
  const auto ch = build_channel(c);
  for (std::uint64_t seed : {1, 2}) {
    const auto run = simulate_stream(ch, reset_and_enable(c), random_words(103, seed));
    const auto bits = extract_serial(run.traces, c);
    ASSERT_GE(bits.size(), 1024u);
    const auto tr = line_transitions(run.traces);
    for (auto t : tr) {
      if (t < bits.start_time_ps()) continue;
      const auto k = c.timebase().falling_index(t - ch.line_offset_ps());
      EXPECT_GE(k, 0) << t;
    }
    // Two line transitions at every boundary regardless of data.
    std::map<std::int64_t, int> per;
    for (auto t : tr) {
      if (t > bits.start_time_ps() && t < bits.boundary_ps(static_cast<std::int64_t>(bits.size()) - 1)) ++per[t];
    }
    for (const auto& [t, n] : per) EXPECT_EQ(n, 2) << t;
  }
}

TEST(Supply, NaiveConstantStreamIsFlat) {
  const SpikeModel m;
  BitStream b = golden_serialize(std::vector<Word>(20, Word(0x3FF)));
  const auto tr = naive_supply_current(b, m, 10, 0, 2000);
  for (double v : tr.samples) ASSERT_EQ(v, m.i_dc_a);
}

TEST(Supply, NaiveAlternatingMatchesPseudoShadow) {
  const ChannelConfig c;
  const auto ch = build_channel(c);
  const auto run = simulate_stream(ch, reset_and_enable(c), std::vector<Word>(480, Word::from_string("0101010101")));
  const auto bits = extract_serial(run.traces, c);
  const std::size_t n = 1 << 18;
  const std::int64_t t0 = bits.start_time_ps() + 1000;
  auto window = [&](const CurrentTrace& tr) { return power_of_two_window(tr, t0, t0 + n * 10); };
  const auto ps = spectrum(window(supply_current(line_transitions(run.traces), c.spike, 10, 0,
                                                 static_cast<std::size_t>(run.horizon_ps / 10))));
  const auto nv = spectrum(window(naive_supply_current(bits, c.spike, 10, 0,
                                                       static_cast<std::size_t>(run.horizon_ps / 10))));
  ASSERT_EQ(ps.n_fft, n);
  const double floor = 1e-6 * ps.magnitude[0];
  for (std::size_t k = 0; k < ps.magnitude.size(); ++k) {
    if (ps.magnitude[k] < floor && nv.magnitude[k] < floor) continue;
    EXPECT_NEAR(nv.magnitude[k], ps.magnitude[k], 0.01 * ps.magnitude[k] + 1e-3 * floor) << k;
  }
}

TEST(Csv, TraceFormat) {
  CurrentTrace t;
  t.dt_ps = 10;
  t.t0_ps = 20;
  t.samples = {1.005e-3, 0.5};
  EXPECT_EQ(format_csv(t), "time_ps,value\n20,0.001005\n30,0.5\n");
}
