#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hdmitx/analog.hpp"
#include "hdmitx/config.hpp"
#include "hdmitx/error.hpp"
#include "hdmitx/rational.hpp"

namespace hdmitx {

// Differential waveform folded over a two-UI window. Time bins span
// [origin, origin + 2 UI) (modulo 2 UI); the eye centre sits at 1 UI.
struct EyeHistogram {
  Rational ui;
  Rational fold_origin;
  int bins_t = 128;
  int bins_v = 128;
  double v_min = -0.75;
  double v_max = 0.75;
  std::vector<std::uint64_t> counts;  // row-major, counts[v * bins_t + t]

  std::uint64_t at(int t, int v) const { return counts[static_cast<std::size_t>(v) * bins_t + t]; }
  std::uint64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

  // Bin centre, as a fraction of UI relative to the eye centre.
  double x_centre(int t) const { return 2.0 * (t + 0.5) / bins_t - 1.0; }
  double v_centre(int v) const { return v_min + (v + 0.5) * (v_max - v_min) / bins_v; }
  int v_bin(double volts) const {
    const double f = (volts - v_min) / (v_max - v_min);
    return std::clamp(static_cast<int>(std::floor(f * bins_v)), 0, bins_v - 1);
  }
  int t_bin(double x_ui) const {
    return std::clamp(static_cast<int>(std::floor((x_ui + 1.0) / 2.0 * bins_t)), 0, bins_t - 1);
  }

  // Associative merge of two eyes with identical geometry.
  EyeHistogram& operator+=(const EyeHistogram& o) {
    if (!(ui == o.ui) || !(fold_origin == o.fold_origin) || bins_t != o.bins_t || bins_v != o.bins_v ||
        v_min != o.v_min || v_max != o.v_max) {
      throw AlignmentError("eye geometry mismatch");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    return *this;
  }

  friend bool operator==(const EyeHistogram&, const EyeHistogram&) = default;
};

struct EyeGeometry {
  int bins_t = 128;
  int bins_v = 128;
  double v_min = -0.75;
  double v_max = 0.75;
  Rational fold_origin{0};
};

inline EyeHistogram empty_eye(Rational ui, const EyeGeometry& g) {
  if (g.bins_t < 64 || g.bins_v < 64) throw Error("eye grid needs at least 64x64 bins");
  EyeHistogram eye;
  eye.ui = ui;
  eye.fold_origin = g.fold_origin;
  eye.bins_t = g.bins_t;
  eye.bins_v = g.bins_v;
  eye.v_min = g.v_min;
  eye.v_max = g.v_max;
  eye.counts.assign(static_cast<std::size_t>(g.bins_t) * g.bins_v, 0);
  return eye;
}

// Folds tx_plus - tx_minus. Phase arithmetic is exact in integers, so a shift
// by any whole multiple of 2 UI leaves the histogram unchanged.
inline EyeHistogram build_eye(const WaveformTrace& tx_plus, const WaveformTrace& tx_minus, Rational ui,
                              const EyeGeometry& g) {
  if (tx_plus.dt_ps != tx_minus.dt_ps || tx_plus.t0_ps != tx_minus.t0_ps || tx_plus.size() != tx_minus.size()) {
    throw AlignmentError("tx_plus and tx_minus differ in dt, t0 or length");
  }
  if (Rational{static_cast<std::int64_t>(tx_plus.size()) * tx_plus.dt_ps} < ui * 100) {
    throw Error("eye needs at least 100 UI of waveform");
  }
  EyeHistogram eye = empty_eye(ui, g);
  const std::int64_t den = std::lcm(ui.den, g.fold_origin.den);
  const std::int64_t window = 2 * ui.num * (den / ui.den);  // 2 UI in 1/den ps
  const std::int64_t origin = g.fold_origin.num * (den / g.fold_origin.den);
  for (std::size_t i = 0; i < tx_plus.size(); ++i) {
    std::int64_t ph = (tx_plus.time(i) * den - origin) % window;
    if (ph < 0) ph += window;
    const auto tb = static_cast<int>((static_cast<__int128>(ph) * eye.bins_t) / window);
    const int vb = eye.v_bin(tx_plus.samples[i] - tx_minus.samples[i]);
    ++eye.counts[static_cast<std::size_t>(vb) * eye.bins_t + tb];
  }
  return eye;
}

// Window origin that centres the fold on bit centres when bit boundaries fall
// at round(k * UI) + boundary_offset_ps.
inline Rational centred_fold_origin(Rational ui, std::int64_t boundary_offset_ps) {
  return Rational{boundary_offset_ps} - ui / 2;
}

struct EyeMask {
  std::vector<MaskVertex> vertices;
};

struct MaskResult {
  bool pass = true;
  double margin_v = 0;
  std::uint64_t violations = 0;  // occupied bins inside the mask
};

namespace detail {

// Vertical extent of a convex polygon at abscissa x.
inline bool polygon_span(const std::vector<MaskVertex>& poly, double x, double& bottom, double& top) {
  bool hit = false;
  bottom = std::numeric_limits<double>::infinity();
  top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    const double x0 = std::min(a.x_ui, b.x_ui), x1 = std::max(a.x_ui, b.x_ui);
    if (x < x0 || x > x1) continue;
    double y0, y1;
    if (a.x_ui == b.x_ui) {
      y0 = std::min(a.v, b.v);
      y1 = std::max(a.v, b.v);
    } else {
      y0 = y1 = a.v + (b.v - a.v) * (x - a.x_ui) / (b.x_ui - a.x_ui);
    }
    bottom = std::min(bottom, y0);
    top = std::max(top, y1);
    hit = true;
  }
  return hit;
}

}  // namespace detail

// Fails if any occupied bin centre lies strictly inside the mask. The margin
// is the smallest vertical distance from an occupied bin to the mask edge,
// negative when inside.
inline MaskResult mask_check(const EyeHistogram& eye, const EyeMask& mask) {
  const auto& poly = mask.vertices;
  if (poly.size() < 3) throw Error("mask needs at least 3 vertices");
  double mask_top = -std::numeric_limits<double>::infinity(), mask_bottom = std::numeric_limits<double>::infinity();
  for (const auto& p : poly) {
    if (p.v < eye.v_min || p.v > eye.v_max || p.x_ui < -1.0 || p.x_ui > 1.0) {
      throw Error("mask lies outside the eye grid");
    }
    mask_top = std::max(mask_top, p.v);
    mask_bottom = std::min(mask_bottom, p.v);
  }
  MaskResult r;
  bool any = false;
  double margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < eye.bins_t; ++t) {
    double bottom, top;
    if (!detail::polygon_span(poly, eye.x_centre(t), bottom, top)) continue;
    for (int v = 0; v < eye.bins_v; ++v) {
      if (eye.at(t, v) == 0) continue;
      const double y = eye.v_centre(v);
      double d;
      if (y > bottom && y < top) {
        d = -std::min(top - y, y - bottom);
        r.pass = false;
        ++r.violations;
      } else {
        d = y >= top ? y - top : bottom - y;
      }
      margin = std::min(margin, d);
      any = true;
    }
  }
  r.margin_v = any ? margin : std::min(eye.v_max - mask_top, mask_bottom - eye.v_min);
  return r;
}

// Vertical opening at x (fraction of UI from centre): lowest occupied bin
// above 0 V minus highest occupied bin below 0 V.
inline double eye_height(const EyeHistogram& eye, double x_ui = 0.0) {
  const int t = eye.t_bin(x_ui);
  double upper = std::numeric_limits<double>::infinity(), lower = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < eye.bins_v; ++v) {
    if (eye.at(t, v) == 0) continue;
    const double y = eye.v_centre(v);
    if (y > 0) upper = std::min(upper, y);
    if (y < 0) lower = std::max(lower, y);
  }
  if (!std::isfinite(upper) || !std::isfinite(lower)) return 0.0;
  return upper - lower;
}

// Occupied bins whose centres fall in |x| < half_width_ui and |v| < half_height_v.
inline std::uint64_t occupancy_in_rect(const EyeHistogram& eye, double half_width_ui, double half_height_v) {
  std::uint64_t n = 0;
  for (int t = 0; t < eye.bins_t; ++t) {
    if (std::abs(eye.x_centre(t)) >= half_width_ui) continue;
    for (int v = 0; v < eye.bins_v; ++v) {
      if (std::abs(eye.v_centre(v)) < half_height_v) n += eye.at(t, v);
    }
  }
  return n;
}

// Rows are voltage bins (lowest first), columns time bins.
inline std::string format_eye_csv(const EyeHistogram& eye) {
  std::string out;
  for (int v = 0; v < eye.bins_v; ++v) {
    for (int t = 0; t < eye.bins_t; ++t) {
      if (t) out += ',';
      out += std::to_string(eye.at(t, v));
    }
    out += '\n';
  }
  return out;
}

}  // namespace hdmitx
