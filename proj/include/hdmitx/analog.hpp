#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hdmitx/config.hpp"
#include "hdmitx/error.hpp"
#include "hdmitx/traces.hpp"
#include "hdmitx/word.hpp"

namespace hdmitx {

struct Volts {};
struct Amperes {};

// Uniformly sampled series; sample i sits at t0_ps + i * dt_ps.
template <typename Unit>
struct SampledTrace {
  std::int64_t dt_ps = 10;
  std::int64_t t0_ps = 0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  std::int64_t time(std::size_t i) const { return t0_ps + static_cast<std::int64_t>(i) * dt_ps; }
  std::int64_t end_ps() const { return time(samples.size()); }

  // Samples with time in [begin_ps, end_ps).
  SampledTrace slice(std::int64_t begin_ps, std::int64_t end_ps) const {
    SampledTrace out;
    out.dt_ps = dt_ps;
    const std::int64_t first = std::max<std::int64_t>(0, (begin_ps - t0_ps + dt_ps - 1) / dt_ps);
    const std::int64_t last = std::min<std::int64_t>(static_cast<std::int64_t>(samples.size()),
                                                     (end_ps - t0_ps + dt_ps - 1) / dt_ps);
    out.t0_ps = t0_ps + first * dt_ps;
    if (last > first) out.samples.assign(samples.begin() + first, samples.begin() + last);
    return out;
  }

  friend bool operator==(const SampledTrace&, const SampledTrace&) = default;
};

using WaveformTrace = SampledTrace<Volts>;
using CurrentTrace = SampledTrace<Amperes>;

// 20%-80% span of a first-order settle is tau * ln 4.
inline double exponential_tau_ps(double t_rf_ps) { return t_rf_ps / std::log(4.0); }

// Full duration of a raised-cosine transition with the given 20%-80% time.
inline double raised_cosine_duration_ps(double t_rf_ps) {
  const double frac = (std::numbers::pi - 2.0 * std::acos(0.6)) / std::numbers::pi;
  return t_rf_ps / frac;
}

namespace detail {

struct Switch {
  std::int64_t time;
  bool sinking;
};

inline void check_sampling(std::int64_t dt_ps, Rational bit_period) {
  if (dt_ps <= 0 || Rational{32 * dt_ps} > bit_period) {
    throw SamplingError("dt_ps=" + std::to_string(dt_ps) + " gives fewer than 32 samples per bit");
  }
}

// Renders level switches with the configured edge shape.
inline WaveformTrace render(const std::vector<Switch>& sw, bool initial_sinking, const DriverParams& p,
                            std::int64_t dt_ps, std::int64_t t0_ps, std::size_t n) {
  const double hi = p.high_level_v(), lo = p.low_level_v();
  const double tau = exponential_tau_ps(p.t_rf_ps);
  const double dur = raised_cosine_duration_ps(p.t_rf_ps);
  struct Segment {
    double te;
    double from;
    double to;
  };
  auto eval = [&](const Segment& s, double t) {
    const double dtt = t - s.te;
    if (dtt <= 0) return s.from;
    if (p.t_rf_ps <= 0) return s.to;
    if (p.edge_model == EdgeModel::Exponential) return s.to + (s.from - s.to) * std::exp(-dtt / tau);
    if (dtt >= dur) return s.to;
    return s.from + (s.to - s.from) * 0.5 * (1.0 - std::cos(std::numbers::pi * dtt / dur));
  };
  const double v0 = initial_sinking ? lo : hi;
  Segment seg{static_cast<double>(t0_ps), v0, v0};
  WaveformTrace out;
  out.dt_ps = dt_ps;
  out.t0_ps = t0_ps;
  out.samples.resize(n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(t0_ps + static_cast<std::int64_t>(i) * dt_ps);
    while (next < sw.size() && static_cast<double>(sw[next].time) <= t) {
      const double te = static_cast<double>(sw[next].time);
      seg = Segment{te, eval(seg, te), sw[next].sinking ? lo : hi};
      ++next;
    }
    out.samples[i] = eval(seg, t);
  }
  return out;
}

}  // namespace detail

struct TxPair {
  WaveformTrace tx_plus;
  WaveformTrace tx_minus;
};

// Open-drain differential output. Tx- sinks while Odd or Even is LOW (a
// transmitted 1), Tx+ sinks while nOdd or nEven is LOW. UNKNOWN lines are
// treated as released.
inline TxPair synthesize_tx(const SignalTraces& lines, const DriverParams& params, std::int64_t dt_ps,
                            Rational bit_period, std::int64_t t0_ps = 0,
                            std::optional<std::int64_t> end_ps = std::nullopt) {
  detail::check_sampling(dt_ps, bit_period);
  const std::int64_t end = end_ps.value_or(lines.horizon());
  const NetId odd = lines.id("Odd"), even = lines.id("Even");
  const NetId nodd = lines.id("nOdd"), neven = lines.id("nEven");
  std::vector<std::int64_t> times;
  for (NetId id : {odd, even, nodd, neven}) {
    for (const auto& e : lines.events(id)) times.push_back(e.time_ps);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  auto low = [&](NetId id, std::int64_t t) { return lines.level_at(id, t) == LogicLevel::Low; };
  auto minus_sinks = [&](std::int64_t t) { return low(odd, t) || low(even, t); };
  auto plus_sinks = [&](std::int64_t t) { return low(nodd, t) || low(neven, t); };

  std::vector<detail::Switch> sw_plus, sw_minus;
  bool cur_plus = plus_sinks(t0_ps), cur_minus = minus_sinks(t0_ps);
  const bool init_plus = cur_plus, init_minus = cur_minus;
  for (std::int64_t t : times) {
    if (t <= t0_ps) continue;
    const bool p = plus_sinks(t), m = minus_sinks(t);
    if (p != cur_plus) sw_plus.push_back({t, cur_plus = p});
    if (m != cur_minus) sw_minus.push_back({t, cur_minus = m});
  }
  const std::size_t n = end > t0_ps ? static_cast<std::size_t>((end - t0_ps) / dt_ps + 1) : 0;
  return {detail::render(sw_plus, init_plus, params, dt_ps, t0_ps, n),
          detail::render(sw_minus, init_minus, params, dt_ps, t0_ps, n)};
}

// LOW<->HIGH transition times on the four pre-driver lines.
inline std::vector<std::int64_t> line_transitions(const SignalTraces& lines) {
  std::vector<std::int64_t> out;
  for (const char* name : {"Odd", "Even", "nOdd", "nEven"}) {
    const auto& h = lines.events(name);
    for (std::size_t i = 1; i < h.size(); ++i) {
      if (is_known(h[i - 1].level) && is_known(h[i].level)) out.push_back(h[i].time_ps);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

// Integral of a unit-charge-q triangle of half-width a from -inf to x.
inline double triangle_cdf(double x, double q, double a) {
  if (x <= -a) return 0.0;
  if (x >= a) return q;
  const double h = q / a;
  if (x <= 0) return h * (x + a) * (x + a) / (2.0 * a);
  return q - h * (a - x) * (a - x) / (2.0 * a);
}

// Each sample holds the spike's average over its own dt cell, so the
// sampled charge equals q exactly for spikes fully inside the trace.
inline void add_spike(CurrentTrace& tr, double centre_ps, double q_c, double w_ps) {
  const double a = w_ps / 2.0;
  const double dt = static_cast<double>(tr.dt_ps);
  const double rel0 = centre_ps - static_cast<double>(tr.t0_ps);
  const auto lo = static_cast<std::int64_t>(std::floor((rel0 - a) / dt)) - 1;
  const auto hi = static_cast<std::int64_t>(std::ceil((rel0 + a) / dt)) + 1;
  const double q_per_ps = q_c * 1e12;  // A*ps per coulomb
  for (std::int64_t i = std::max<std::int64_t>(lo, 0); i <= hi && i < static_cast<std::int64_t>(tr.size()); ++i) {
    const double x = static_cast<double>(i) * dt - rel0;
    const double area = triangle_cdf(x + dt / 2, q_per_ps, a) - triangle_cdf(x - dt / 2, q_per_ps, a);
    tr.samples[static_cast<std::size_t>(i)] += area / dt;
  }
}

}  // namespace detail

// i_dc plus one triangular spike of charge q_c per transition event.
inline CurrentTrace supply_current(const std::vector<std::int64_t>& transitions, const SpikeModel& model,
                                   std::int64_t dt_ps, std::int64_t t0_ps, std::size_t n_samples) {
  if (dt_ps <= 0) throw SamplingError("dt_ps must be > 0");
  CurrentTrace tr;
  tr.dt_ps = dt_ps;
  tr.t0_ps = t0_ps;
  tr.samples.assign(n_samples, model.i_dc_a);
  for (std::int64_t t : transitions) detail::add_spike(tr, static_cast<double>(t), model.q_c, model.w_ps);
  return tr;
}

// Baseline with one pre-driver pair switching the whole stream: both the
// true and complement pre-driver toggle at every data transition, so spike
// timing follows the data.
inline CurrentTrace naive_supply_current(const BitStream& bits, const SpikeModel& model, std::int64_t dt_ps,
                                         std::int64_t t0_ps, std::size_t n_samples) {
  std::vector<std::int64_t> events;
  for (std::size_t j = 1; j < bits.size(); ++j) {
    if (bits.bits[j] != bits.bits[j - 1]) {
      const std::int64_t t = bits.boundary_ps(static_cast<std::int64_t>(j));
      events.push_back(t);
      events.push_back(t);
    }
  }
  return supply_current(events, model, dt_ps, t0_ps, n_samples);
}

// Charge above the DC baseline, coulombs.
inline double excess_charge(const CurrentTrace& tr, double i_dc) {
  double s = 0;
  for (double v : tr.samples) s += v - i_dc;
  return s * static_cast<double>(tr.dt_ps) * 1e-12;
}

namespace detail {
inline std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace detail

template <typename Unit>
std::string format_csv(const SampledTrace<Unit>& tr) {
  std::string out = "time_ps,value\n";
  out.reserve(tr.size() * 20);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    out += std::to_string(tr.time(i));
    out += ',';
    out += detail::g6(tr.samples[i]);
    out += '\n';
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace hdmitx
