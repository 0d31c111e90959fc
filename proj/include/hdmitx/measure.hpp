#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hdmitx/analog.hpp"
#include "hdmitx/error.hpp"

namespace hdmitx {

struct Levels {
  double v_high = 0;
  double v_low = 0;
  double swing = 0;
};

namespace detail {

// Mode over 50 uV bins, refined to the mean of the modal bin. Ties go to the
// bin nearest `prefer_high ? max : min`.
inline double modal_level(const std::vector<double>& xs, bool prefer_high) {
  constexpr double kBin = 50e-6;
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *mn;
  const auto nbins = static_cast<std::size_t>((*mx - lo) / kBin) + 1;
  std::vector<std::size_t> count(nbins, 0);
  std::vector<double> sum(nbins, 0.0);
  for (double x : xs) {
    const auto b = std::min(nbins - 1, static_cast<std::size_t>((x - lo) / kBin));
    ++count[b];
    sum[b] += x;
  }
  std::size_t best = prefer_high ? nbins - 1 : 0;
  for (std::size_t i = 0; i < nbins; ++i) {
    const std::size_t b = prefer_high ? nbins - 1 - i : i;
    if (count[b] > count[best]) best = b;
  }
  if (count[best] < 3) throw MeasurementError("no-settle: no settled interval found");
  return sum[best] / static_cast<double>(count[best]);
}

}  // namespace detail

// Settled HIGH/LOW levels by histogram mode on each side of the midpoint.
inline Levels measure_levels(const WaveformTrace& tr) {
  if (tr.samples.size() < 3) throw MeasurementError("no-settle: trace too short");
  const auto [mn, mx] = std::minmax_element(tr.samples.begin(), tr.samples.end());
  if (*mx - *mn < 1e-3) {
    const double v = detail::modal_level(tr.samples, true);
    return {v, v, 0.0};
  }
  const double mid = 0.5 * (*mn + *mx);
  std::vector<double> upper, lower;
  for (double x : tr.samples) (x >= mid ? upper : lower).push_back(x);
  const double hi = detail::modal_level(upper, true);
  const double lo = detail::modal_level(lower, false);
  return {hi, lo, hi - lo};
}

enum class EdgeKind { Rise, Fall };

// Mean 20%-80% duration over every complete transition of one polarity,
// with linear interpolation between samples.
inline double measure_edge(const WaveformTrace& tr, EdgeKind which) {
  const Levels lv = measure_levels(tr);
  if (lv.swing <= 0) throw MeasurementError("no-transition: trace has a single level");
  const double span = lv.v_high - lv.v_low;
  const double th20 = lv.v_low + 0.2 * span;
  const double th80 = lv.v_low + 0.8 * span;
  const bool rise = which == EdgeKind::Rise;
  // Map to a rising problem.
  auto val = [&](std::size_t i) { return rise ? tr.samples[i] : -tr.samples[i]; };
  const double a = rise ? th20 : -th80;  // first threshold crossed
  const double b = rise ? th80 : -th20;  // second
  const double dt = static_cast<double>(tr.dt_ps);
  auto cross = [&](std::size_t i, double th) {
    const double x0 = val(i - 1), x1 = val(i);
    return static_cast<double>(tr.time(i - 1)) + (th - x0) / (x1 - x0) * dt;
  };

  double total = 0;
  int count = 0;
  bool armed = false, in_edge = false;
  double t_a = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double x = val(i);
    if (x < a) {
      armed = true;
      in_edge = false;
      continue;
    }
    if (armed && !in_edge && i > 0 && val(i - 1) < a) {
      t_a = cross(i, a);
      in_edge = true;
      armed = false;
    }
    if (in_edge && x >= b) {
      const double prev = val(i - 1);
      const double t_b = prev >= b ? static_cast<double>(tr.time(i)) : cross(i, b);
      total += t_b - t_a;
      ++count;
      in_edge = false;
    }
  }
  if (count == 0) throw MeasurementError("no-transition: no complete edge found");
  return total / count;
}

}  // namespace hdmitx
