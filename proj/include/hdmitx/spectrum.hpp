#pragma once

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hdmitx/analog.hpp"
#include "hdmitx/error.hpp"

namespace hdmitx {

// Single-sided amplitude spectrum. magnitude[0] is the trace mean; for
// 0 < k < n_fft/2 a sinusoid of amplitude A centred on bin k reads A.
struct Spectrum {
  double df_hz = 0;
  std::size_t n_samples = 0;  // before zero-padding
  std::size_t n_fft = 0;
  std::vector<double> magnitude;  // n_fft/2 + 1 bins

  double freq(std::size_t k) const { return static_cast<double>(k) * df_hz; }

  // Mean square of the original samples, reconstructed from the bins.
  double parseval_mean_square() const {
    if (magnitude.empty()) return 0;
    double s = magnitude.front() * magnitude.front();
    const std::size_t last = magnitude.size() - 1;
    for (std::size_t k = 1; k < last; ++k) s += 0.5 * magnitude[k] * magnitude[k];
    if (last > 0) s += magnitude[last] * magnitude[last];
    return s * static_cast<double>(n_samples) / static_cast<double>(n_fft);
  }
};

namespace detail {

// Planner calls are not thread-safe in FFTW; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

// Rectangular window, zero-padded to the next power of two.
inline Spectrum spectrum(const CurrentTrace& trace) {
  const std::size_t n = trace.size();
  if (n == 0) throw Error("spectrum of an empty trace");
  const std::size_t nfft = std::bit_ceil(n);
  Spectrum s;
  s.n_samples = n;
  s.n_fft = nfft;
  s.df_hz = 1e12 / (static_cast<double>(nfft) * static_cast<double>(trace.dt_ps));
  s.magnitude.assign(nfft / 2 + 1, 0.0);
  if (nfft == 1) {
    s.magnitude[0] = trace.samples[0];
    return s;
  }

  std::unique_ptr<double, decltype(&fftw_free)> in(fftw_alloc_real(nfft), &fftw_free);
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(fftw_alloc_complex(nfft / 2 + 1), &fftw_free);
  if (!in || !out) throw Error("fft allocation failed");
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.get(), out.get(), FFTW_ESTIMATE);
  }
  if (!plan) throw Error("fft planning failed");
  std::copy(trace.samples.begin(), trace.samples.end(), in.get());
  std::fill(in.get() + n, in.get() + nfft, 0.0);
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double norm = static_cast<double>(n);
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    const double mag = std::hypot(out.get()[k][0], out.get()[k][1]) / norm;
    s.magnitude[k] = (k == 0 || k == nfft / 2) ? mag : 2.0 * mag;
  }
  double mean = 0;
  for (double v : trace.samples) mean += v;
  s.magnitude[0] = mean / norm;
  return s;
}

// Largest power-of-two run of samples starting at begin_ps and ending no
// later than end_ps. Zero-padding a trace with a DC component leaks into
// the low bins, so steady-state measurements should use an exact window.
template <typename Unit>
SampledTrace<Unit> power_of_two_window(const SampledTrace<Unit>& tr, std::int64_t begin_ps, std::int64_t end_ps) {
  auto w = tr.slice(begin_ps, end_ps);
  if (w.samples.empty()) throw SamplingError("window is empty");
  w.samples.resize(std::bit_floor(w.samples.size()));
  return w;
}

// Largest bin in (0, f_cut] relative to the DC bin.
inline double low_band_ratio(const Spectrum& s, double f_cut_hz = 5e8) {
  if (!(s.df_hz < f_cut_hz / 10.0)) throw ResolutionError("spectrum resolution too coarse for f_cut");
  const auto last = std::min(s.magnitude.size() - 1,
                             static_cast<std::size_t>(std::floor(f_cut_hz / s.df_hz * (1 + 1e-12))));
  double peak = 0;
  for (std::size_t k = 1; k <= last; ++k) peak = std::max(peak, s.magnitude[k]);
  const double dc = std::abs(s.magnitude[0]);
  if (dc == 0) return peak == 0 ? 0.0 : INFINITY;
  return peak / dc;
}

inline std::string format_spectrum_csv(const Spectrum& s) {
  std::string out = "freq_hz,magnitude_a\n";
  out.reserve(s.magnitude.size() * 28);
  for (std::size_t k = 0; k < s.magnitude.size(); ++k) {
    out += detail::g6(s.freq(k));
    out += ',';
    out += detail::g6(s.magnitude[k]);
    out += '\n';
  }
  return out;
}

}  // namespace hdmitx
