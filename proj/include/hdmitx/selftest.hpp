#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hdmitx/analog.hpp"
#include "hdmitx/channel.hpp"
#include "hdmitx/compliance.hpp"
#include "hdmitx/eye.hpp"
#include "hdmitx/measure.hpp"
#include "hdmitx/prbs.hpp"
#include "hdmitx/serializer.hpp"
#include "hdmitx/spectrum.hpp"
#include "hdmitx/stimulus.hpp"

namespace hdmitx {

struct SelftestResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Quick closed-form checks of each stage against independently derived values.
inline std::vector<SelftestResult> run_selftest(const ChannelConfig& config = {}) {
  std::vector<SelftestResult> out;
  auto check = [&](std::string name, const std::function<std::string()>& body) {
    SelftestResult r{std::move(name), false, {}};
    try {
      r.detail = body();
      r.pass = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    out.push_back(std::move(r));
  };

  check("serializer matches golden model for every enable phase", [&]() -> std::string {
    const auto ch = build_channel(config);
    for (int phase = 0; phase < config.word_width; ++phase) {
      const auto words = random_words(40, config.seed + static_cast<std::uint64_t>(phase), config.word_width);
      const auto run = simulate_stream(ch, reset_and_enable(config, phase), words);
      if (extract_serial(run.traces, config).bits != golden_serialize(words, config.bit_period()).bits) {
        return "mismatch at phase " + std::to_string(phase);
      }
    }
    return {};
  });

  check("PRBS7 and PRBS10 are maximal length", []() -> std::string {
    for (auto [kind, seed] : {std::pair{PrbsKind::Prbs7, 0x7Fu}, std::pair{PrbsKind::Prbs10, 0x3FFu}}) {
      Lfsr a(kind, seed), b(kind, seed);
      std::vector<int> first;
      for (std::uint32_t i = 0; i < a.period(); ++i) first.push_back(a.next());
      for (std::uint32_t i = 0; i < a.period(); ++i) {
        if (a.next() != first[i]) return "sequence does not repeat at the period";
      }
      // No shorter period: the state must not recur early.
      for (std::uint32_t p = 1; p < b.period(); ++p) {
        if (b.period() % p) continue;
        bool same = true;
        for (std::uint32_t i = 0; i + p < first.size() && same; ++i) same = first[i] == first[i + p];
        if (same) return "shorter period " + std::to_string(p);
      }
    }
    return {};
  });

  check("exponential edge has tau = t_rf / ln 4 and measures t_rf", [&]() -> std::string {
    const double tau = exponential_tau_ps(config.driver.t_rf_ps);
    if (std::abs(tau - config.driver.t_rf_ps / std::log(4.0)) > 1e-12) return "tau mismatch";
    SignalTraces lines;
    for (const char* n : {"Odd", "Even", "nOdd", "nEven"}) lines.add_net(n, LogicLevel::High);
    for (int k = 1; k <= 8; ++k) lines.record(lines.id("nOdd"), 3000 * k, k % 2 ? LogicLevel::Low : LogicLevel::High);
    lines.set_horizon(30000);
    const auto tx = synthesize_tx(lines, config.driver, config.dt_ps, config.bit_period());
    const double tol = std::max(1.0, static_cast<double>(config.dt_ps));
    const double rise = measure_edge(tx.tx_plus, EdgeKind::Rise), fall = measure_edge(tx.tx_plus, EdgeKind::Fall);
    if (std::abs(rise - config.driver.t_rf_ps) > tol || std::abs(fall - config.driver.t_rf_ps) > tol) {
      return "rise " + std::to_string(rise) + " fall " + std::to_string(fall);
    }
    return {};
  });

  check("levels follow Ohm's law", [&]() -> std::string {
    const auto& d = config.driver;
    SignalTraces lines;
    for (const char* n : {"Odd", "Even", "nOdd", "nEven"}) lines.add_net(n, LogicLevel::High);
    lines.record(lines.id("nOdd"), 1000, LogicLevel::Low);
    lines.set_horizon(6000);
    const auto tx = synthesize_tx(lines, d, config.dt_ps, config.bit_period());
    const double lo = tx.tx_plus.samples.back(), hi = tx.tx_minus.samples.back();
    if (std::abs(lo - (d.avcc_v - (d.i_sink_a + d.i_standby_a) * d.r_term_ohm)) > 1e-4) return "low level";
    if (std::abs(hi - (d.avcc_v - d.i_standby_a * d.r_term_ohm)) > 1e-4) return "high level";
    return {};
  });

  check("spectrum of a bin-centred tone and a constant", []() -> std::string {
    CurrentTrace tr;
    tr.dt_ps = 10;
    const std::size_t n = 4096;
    for (std::size_t i = 0; i < n; ++i) tr.samples.push_back(1e-3 + 2e-4 * std::cos(2 * M_PI * 37.0 * i / n));
    const auto s = spectrum(tr);
    if (std::abs(s.magnitude[0] - 1e-3) > 1e-15) return "dc bin";
    if (std::abs(s.magnitude[37] - 2e-4) > 1e-13) return "tone bin";
    for (std::size_t k = 1; k < s.magnitude.size(); ++k) {
      if (k != 37 && s.magnitude[k] > 2e-4 * 1e-9) return "leakage at bin " + std::to_string(k);
    }
    double ms = 0;
    for (double v : tr.samples) ms += v * v;
    ms /= static_cast<double>(n);
    if (std::abs(s.parseval_mean_square() - ms) > 1e-6 * ms) return "parseval";
    return {};
  });

  check("eye is invariant under a two-UI shift", [&]() -> std::string {
    const Rational ui = config.bit_period();
    WaveformTrace p, m;
    p.dt_ps = m.dt_ps = config.dt_ps;
    for (int i = 0; i < 20000; ++i) {
      p.samples.push_back(0.25 * std::sin(i * 0.013));
      m.samples.push_back(-0.25 * std::sin(i * 0.013));
    }
    const auto base = build_eye(p, m, ui, {});
    const std::int64_t shift = (ui * 2 * ui.den).round();  // whole number of 2-UI windows
    p.t0_ps = m.t0_ps = shift;
    return build_eye(p, m, ui, {}) == base ? std::string{} : "histogram changed";
  });

  check("doubled sink current fails V_L", [&]() -> std::string {
    DriverParams d = config.driver;
    d.i_sink_a *= 2;
    Measurements meas;
    meas.v_low = d.avcc_v - d.i_sink_a * d.r_term_ohm;
    const auto r = compliance_report(meas, config);
    return r.find("V_L")->pass() ? "V_L passed" : std::string{};
  });
  return out;
}

}  // namespace hdmitx
