#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace hdmitx;
using L = LogicLevel;

namespace {

WaveformTrace ramp_trace(double v0, double v1, double t_ramp, std::int64_t dt, int edges) {
  WaveformTrace w;
  w.dt_ps = dt;
  const double period = 4000;
  for (double t = 0; t < period * edges; t += static_cast<double>(dt)) {
    const int e = static_cast<int>(t / period);
    const double u = std::clamp((t - e * period - 500) / t_ramp, 0.0, 1.0);
    const double from = e % 2 ? v1 : v0, to = e % 2 ? v0 : v1;
    w.samples.push_back(from + (to - from) * u);
  }
  return w;
}

struct StreamEye {
  TxPair tx;
  BitStream bits;
  std::int64_t horizon;
  EyeGeometry geo;
};

StreamEye stream_eye(const std::vector<Word>& words, const ChannelConfig& c = {}) {
  const auto ch = build_channel(c);
  const auto run = simulate_stream(ch, reset_and_enable(c), words);
  StreamEye s{synthesize_tx(run.traces, c.driver, c.dt_ps, c.bit_period()), extract_serial(run.traces, c),
              run.horizon_ps, {}};
  s.geo.fold_origin = centred_fold_origin(c.bit_period(), ch.line_offset_ps());
  return s;
}

EyeHistogram eye_of(const StreamEye& s, const ChannelConfig& c = {}) {
  const auto b = s.bits.start_time_ps();
  return build_eye(s.tx.tx_plus.slice(b, s.horizon), s.tx.tx_minus.slice(b, s.horizon), c.bit_period(), s.geo);
}

}  // namespace

TEST(MeasureEdge, LinearRamp) {
  for (double t_ramp : {100.0, 173.0, 400.0}) {
    for (std::int64_t dt : {1, 5, 10}) {
      const auto w = ramp_trace(2.8, 3.3, t_ramp, dt, 6);
      EXPECT_NEAR(measure_edge(w, EdgeKind::Rise), 0.6 * t_ramp, static_cast<double>(dt));
      EXPECT_NEAR(measure_edge(w, EdgeKind::Fall), 0.6 * t_ramp, static_cast<double>(dt));
    }
  }
}

TEST(MeasureEdge, IdealStep) {
  ChannelConfig c;
  c.driver.t_rf_ps = 0;
  auto lines = testing_support::idle_lines(12000);
  for (int k = 1; k <= 3; ++k) lines.record(lines.id("nOdd"), 3000 * k + 3, k % 2 ? L::Low : L::High);
  const auto tx = synthesize_tx(lines, c.driver, c.dt_ps, c.bit_period());
  EXPECT_LE(measure_edge(tx.tx_plus, EdgeKind::Fall), 2.0 * c.dt_ps);
  EXPECT_LE(measure_edge(tx.tx_plus, EdgeKind::Rise), 2.0 * c.dt_ps);
}

TEST(MeasureEdge, NoTransition) {
  WaveformTrace w;
  w.samples.assign(500, 3.299);
  EXPECT_THROW(measure_edge(w, EdgeKind::Rise), MeasurementError);
  auto r = ramp_trace(0, 1, 100, 10, 1);  // one rise only
  EXPECT_THROW(measure_edge(r, EdgeKind::Fall), MeasurementError);
}

TEST(MeasureLevels, StreamingDefaults) {
  const auto s = stream_eye(testing_support::Gen(1).words(200));
  const auto lv = measure_levels(s.tx.tx_plus.slice(s.bits.start_time_ps(), s.horizon));
  EXPECT_NEAR(lv.v_high, 3.299, 1e-4);
  EXPECT_NEAR(lv.v_low, 2.8019, 1e-4);
  EXPECT_NEAR(lv.swing, 0.4971, 1e-4);
}

TEST(MeasureLevels, StandbyAndZeroDrive) {
  WaveformTrace w;
  w.samples.assign(1000, 3.299);
  const auto lv = measure_levels(w);
  EXPECT_NEAR(lv.v_high, 3.299, 1e-12);
  EXPECT_NEAR(lv.v_low, 3.299, 1e-12);
  EXPECT_EQ(lv.swing, 0);
  ChannelConfig c;
  c.driver.i_sink_a = 0;
  const auto s = stream_eye(testing_support::Gen(2).words(30), c);
  EXPECT_NEAR(measure_levels(s.tx.tx_plus).swing, 0, 1e-9);
}

TEST(MeasureLevels, NoSettle) {
  WaveformTrace w;
  for (int i = 0; i < 400; ++i) w.samples.push_back(2.8 + 0.5 * i / 400.0);
  EXPECT_THROW(measure_levels(w), MeasurementError);
}

TEST(Eye, ConstantZeroFillsCentreRow) {
  WaveformTrace p, m;
  p.samples.assign(10000, 3.299);
  m.samples = p.samples;
  const auto eye = build_eye(p, m, Rational(20000, 33), {});
  EXPECT_EQ(eye.total(), 10000u);
  std::uint64_t centre = 0;
  for (int t = 0; t < eye.bins_t; ++t) centre += eye.at(t, eye.bins_v / 2);
  EXPECT_EQ(centre, 10000u);
}

TEST(Eye, Errors) {
  WaveformTrace p, m;
  p.samples.assign(10000, 0);
  m.samples.assign(10000, 0);
  m.t0_ps = 10;
  EXPECT_THROW(build_eye(p, m, Rational(20000, 33), {}), AlignmentError);
  m.t0_ps = 0;
  m.dt_ps = 5;
  EXPECT_THROW(build_eye(p, m, Rational(20000, 33), {}), AlignmentError);
  p.samples.resize(1000);
  m = p;
  EXPECT_THROW(build_eye(p, m, Rational(20000, 33), {}), Error);  // under 100 UI
}

TEST(Eye, AlternatingPatternIsOpen) {
  const auto s = stream_eye(std::vector<Word>(200, Word::from_string("0101010101")));
  const auto eye = eye_of(s);
  EXPECT_EQ(occupancy_in_rect(eye, 0.25, 0.2), 0u);
}

TEST(Eye, RandomStreamHeight) {
  const auto s = stream_eye(testing_support::Gen(6).words(1000));
  const auto eye = eye_of(s);
  const double swing = 2 * (3.299 - 2.8019);
  EXPECT_GE(eye_height(eye), 0.9 * swing);
  EXPECT_EQ(eye.total(), s.tx.tx_plus.slice(s.bits.start_time_ps(), s.horizon).size());
}

TEST(Eye, FoldInvarianceUnderTwoUiShifts) {
  // Property: any shift by a whole number of 2-UI windows (here k * 40000 ps,
  // which is 66k UI exactly) leaves the histogram bit-identical.
  const auto s = stream_eye(testing_support::Gen(12).words(300));
  const auto b = s.bits.start_time_ps();
  auto p = s.tx.tx_plus.slice(b, s.horizon), m = s.tx.tx_minus.slice(b, s.horizon);
  const Rational ui(20000, 33);
  const auto base = build_eye(p, m, ui, s.geo);
  testing_support::Gen g(1);
  for (int i = 0; i < 10; ++i) {
    const std::int64_t shift = 40000 * g.range(-50, 50);
    auto ps = p, ms = m;
    ps.t0_ps += shift;
    ms.t0_ps += shift;
    EXPECT_TRUE(build_eye(ps, ms, ui, s.geo) == base) << shift;
  }
  // A shift of one UI (not a whole window) moves the eye.
  auto ps = p, ms = m;
  ps.t0_ps += 20000;
  ms.t0_ps += 20000;
  EXPECT_FALSE(build_eye(ps, ms, ui, s.geo) == base);
}

TEST(Eye, MergeIsAssociative) {
  const auto s = stream_eye(testing_support::Gen(14).words(200));
  const auto b = s.bits.start_time_ps();
  const auto mid = b + 1000 * 606, end = s.horizon;
  const Rational ui(20000, 33);
  auto part = [&](std::int64_t x, std::int64_t y) {
    return build_eye(s.tx.tx_plus.slice(x, y), s.tx.tx_minus.slice(x, y), ui, s.geo);
  };
  auto whole = part(b, end);
  auto merged = part(b, mid);
  merged += part(mid, end);
  EXPECT_TRUE(merged == whole);
  auto other = empty_eye(Rational(1000), s.geo);
  EXPECT_THROW(merged += other, AlignmentError);
}

TEST(Mask, EmptyHistogramPasses) {
  const auto eye = empty_eye(Rational(20000, 33), {});
  const auto r = mask_check(eye, EyeMask{default_mask()});
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.margin_v, 0.75 - 0.2, 1e-12);
}

TEST(Mask, RandomStreamPassesAndTallMaskFails) {
  const auto s = stream_eye(testing_support::Gen(15).words(500));
  const auto eye = eye_of(s);
  const auto ok = mask_check(eye, EyeMask{default_mask()});
  EXPECT_TRUE(ok.pass);
  EXPECT_GT(ok.margin_v, 0);
  const std::vector<MaskVertex> tall{{-0.25, 0}, {-0.15, 0.6}, {0.15, 0.6}, {0.25, 0}, {0.15, -0.6}, {-0.15, -0.6}};
  const auto bad = mask_check(eye, EyeMask{tall});
  EXPECT_FALSE(bad.pass);
  EXPECT_LT(bad.margin_v, 0);
  EXPECT_THROW(mask_check(eye, EyeMask{{{0, 0}, {0.1, 0.9}, {0.2, 0}}}), Error);
}

TEST(Mask, MonotoneUnderEnlargement) {
  // Property: scaling a mask up never turns a fail into a pass.
  const auto s = stream_eye(testing_support::Gen(16).words(200));
  const auto eye = eye_of(s);
  testing_support::Gen g(3);
  for (int i = 0; i < 60; ++i) {
    const double w = g.uniform(0.05, 0.6), h = g.uniform(0.05, 0.6), grow = g.uniform(1.0, 1.2);
    auto mask = [](double a, double b) {
      return EyeMask{{{-a, 0}, {-0.6 * a, b}, {0.6 * a, b}, {a, 0}, {0.6 * a, -b}, {-0.6 * a, -b}}};
    };
    const auto small = mask_check(eye, mask(w, h));
    const auto big = mask_check(eye, mask(std::min(w * grow, 0.99), std::min(h * grow, 0.74)));
    if (!small.pass) {
      EXPECT_FALSE(big.pass);
    }
    EXPECT_LE(big.margin_v, small.margin_v + 1e-12);
  }
}

TEST(Eye, CsvGrid) {
  const auto eye = empty_eye(Rational(20000, 33), {});
  const auto csv = format_eye_csv(eye);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 128);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), ','), 128 * 127);
}

TEST(Spectrum, ConstantTrace) {
  CurrentTrace t;
  t.samples.assign(4096, 1.005e-3);
  const auto s = spectrum(t);
  EXPECT_NEAR(s.magnitude[0], 1.005e-3, 1e-15);
  for (std::size_t k = 1; k < s.magnitude.size(); ++k) ASSERT_LT(s.magnitude[k], 1e-12 * 1.005e-3);
  EXPECT_EQ(low_band_ratio(s, 5e8), 0.0);
}

TEST(Spectrum, BinCentredTone) {
  CurrentTrace t;
  const std::size_t n = 8192;
  const double a = 3e-4;
  for (std::size_t i = 0; i < n; ++i) t.samples.push_back(a * std::sin(2 * M_PI * 100.0 * static_cast<double>(i) / n));
  const auto s = spectrum(t);
  EXPECT_NEAR(s.magnitude[100], a, 1e-15);
  for (std::size_t k = 0; k < s.magnitude.size(); ++k) {
    if (k != 100) {
      ASSERT_LT(s.magnitude[k], 1e-9 * a) << k;
    }
  }
  EXPECT_NEAR(s.freq(100), 100.0 * 1e12 / (8192.0 * 10), 1e-6);
}

TEST(Spectrum, MatchesDirectDftWithPadding) {
  testing_support::Gen g(44);
  CurrentTrace t;
  for (int i = 0; i < 1000; ++i) t.samples.push_back(g.uniform(0, 1e-3));
  const auto s = spectrum(t);
  EXPECT_EQ(s.n_fft, 1024u);
  for (std::size_t k : {0u, 1u, 7u, 100u, 511u, 512u}) {
    EXPECT_NEAR(s.magnitude[k], testing_support::dft_bin(t.samples, 1024, k), 1e-15) << k;
  }
}

TEST(Spectrum, ParsevalProperty) {
  testing_support::Gen g(45);
  for (int i = 0; i < 30; ++i) {
    CurrentTrace t;
    const auto n = g.range(2, 5000);
    for (int j = 0; j < n; ++j) t.samples.push_back(g.uniform(0, 2e-3));
    double ms = 0;
    for (double v : t.samples) ms += v * v;
    ms /= static_cast<double>(n);
    EXPECT_NEAR(spectrum(t).parseval_mean_square(), ms, 1e-6 * ms) << n;
  }
}

TEST(Spectrum, ResolutionTooCoarse) {
  CurrentTrace t;
  t.samples.assign(64, 1.0);  // df = 1.56 GHz
  EXPECT_THROW(low_band_ratio(spectrum(t), 5e8), ResolutionError);
}

TEST(Spectrum, PseudoShadowVersusNaive) {
  const ChannelConfig c;
  const auto ch = build_channel(c);
  const auto run = simulate_stream(ch, reset_and_enable(c), random_words(460, 99));
  const auto bits = extract_serial(run.traces, c);
  ASSERT_GE(bits.size(), 4096u);
  const auto n = static_cast<std::size_t>(run.horizon_ps / c.dt_ps);
  const auto cur = supply_current(line_transitions(run.traces), c.spike, c.dt_ps, 0, n);
  const auto w = power_of_two_window(cur, bits.start_time_ps(), run.horizon_ps);
  EXPECT_LT(low_band_ratio(spectrum(w), 5e8), 0.06);

  const auto pattern = golden_serialize(std::vector<Word>(460, Word::from_string("0000011111")));
  auto naive = naive_supply_current(pattern, c.spike, c.dt_ps, 0, 1 << 18);
  EXPECT_GT(low_band_ratio(spectrum(naive), 5e8), 0.06);
}

TEST(Spectrum, CsvHeader) {
  CurrentTrace t;
  t.samples.assign(4, 1.0);
  const auto csv = format_spectrum_csv(spectrum(t));
  EXPECT_EQ(csv.rfind("freq_hz,magnitude_a\n0,1\n", 0), 0u);
}

TEST(Compliance, DefaultMeasurementsPass) {
  Measurements m;
  m.v_off = 3.299;
  m.v_high = 3.299;
  m.v_low = 2.8019;
  m.v_swing = 0.4971;
  m.rise_ps = 104;
  m.fall_ps = 104;
  m.low_band_ratio = 0.01;
  m.standby_drop_v = 0.001;
  const auto r = compliance_report(m, ChannelConfig{});
  EXPECT_TRUE(r.pass());
  for (const char* n : {"V_off", "V_swing", "V_H", "V_L", "rise", "fall", "low_band_ratio"}) {
    ASSERT_NE(r.find(n), nullptr) << n;
    EXPECT_TRUE(r.find(n)->pass()) << n;
  }
  EXPECT_NE(r.find("V_swing")->note.find("0.660"), std::string::npos);
}

TEST(Compliance, ReportedSwingWouldFail) {
  Measurements m;
  m.v_swing = 0.660;
  EXPECT_FALSE(compliance_report(m, ChannelConfig{}).find("V_swing")->pass());
}

TEST(Compliance, DoubledSinkFailsVL) {
  const ChannelConfig c;
  Measurements m;
  m.v_low = c.driver.avcc_v - 2 * c.driver.i_sink_a * c.driver.r_term_ohm;
  EXPECT_NEAR(*m.v_low, 2.306, 1e-3);
  const auto r = compliance_report(m, c);
  EXPECT_FALSE(r.find("V_L")->pass());
  EXPECT_FALSE(r.pass());
}

TEST(Compliance, BoundsAndStrictRatio) {
  Measurements m;
  m.v_off = 3.290;
  m.rise_ps = 75;
  m.low_band_ratio = 0.06;
  const auto r = compliance_report(m, ChannelConfig{});
  EXPECT_TRUE(r.find("V_off")->pass());
  EXPECT_TRUE(r.find("rise")->pass());
  EXPECT_FALSE(r.find("low_band_ratio")->pass());
}

TEST(Compliance, TotalAndDeterministic) {
  // Property: any finite measurement set yields a report; equal inputs,
  // equal output text.
  testing_support::Gen g(50);
  for (int i = 0; i < 200; ++i) {
    Measurements m;
    if (g.coin()) m.v_off = g.uniform(-10, 10);
    if (g.coin()) m.v_high = g.uniform(-10, 10);
    if (g.coin()) m.v_low = g.uniform(-10, 10);
    if (g.coin()) m.rise_ps = g.uniform(-1e3, 1e3);
    if (g.coin()) m.low_band_ratio = g.uniform(0, 1);
    const auto a = compliance_report(m, ChannelConfig{}), b = compliance_report(m, ChannelConfig{});
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_EQ(to_table(a), to_table(b));
  }
}

TEST(Compliance, JsonShapeEchoesConfig) {
  ChannelConfig c;
  c.skew_ps = 7;
  Measurements m;
  m.v_off = 3.3;
  const auto j = to_json(compliance_report(m, c));
  EXPECT_EQ(j["config"]["skew_ps"], "7");
  const auto& item = j["items"][0];
  EXPECT_EQ(item["item"], "V_off");
  EXPECT_EQ(item["min"], 3.29);
  EXPECT_EQ(item["max"], 3.31);
  EXPECT_EQ(item["achieved"], 3.3);
  EXPECT_EQ(item["pass"], true);
  EXPECT_TRUE(j["items"][1]["achieved"].is_null());
  // The echoed config parses back to the same config.
  std::string text;
  for (const auto& [k, v] : j["config"].items()) text += k + " = " + v.get<std::string>() + "\n";
  EXPECT_TRUE(parse_config(text) == c);
}
