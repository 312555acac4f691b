#include "hopfrc/dsp.hpp"

#include <cmath>
#include <numbers>

#include "hopfrc/error.hpp"

namespace hopfrc::dsp {

std::vector<double> lowpass_taps(double cutoff_hz, double rate, int taps) {
  require(taps >= 3 && taps % 2 == 1, "lowpass_taps: tap count must be odd and >= 3");
  require(cutoff_hz > 0.0 && cutoff_hz < rate / 2.0, "lowpass_taps: cutoff must be in (0, rate/2)");
  std::vector<double> h(static_cast<std::size_t>(taps));
  const double fc = cutoff_hz / rate;
  const int mid = taps / 2;
  double sum = 0.0;
  for (int i = 0; i < taps; ++i) {
    const int k = i - mid;
    const double sinc =
        k == 0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * k) / (std::numbers::pi * k);
    const double phase = 2.0 * std::numbers::pi * i / (taps - 1);
    const double window = 0.42 - 0.5 * std::cos(phase) + 0.08 * std::cos(2.0 * phase);
    h[static_cast<std::size_t>(i)] = sinc * window;
    sum += h[static_cast<std::size_t>(i)];
  }
  for (double& v : h) v /= sum;
  return h;
}

std::vector<double> bandpass_taps(double low_hz, double high_hz, double rate, int taps) {
  require(low_hz > 0.0 && high_hz > low_hz, "bandpass_taps: need 0 < low < high");
  auto hi = lowpass_taps(high_hz, rate, taps);
  const auto lo = lowpass_taps(low_hz, rate, taps);
  for (std::size_t i = 0; i < hi.size(); ++i) hi[i] -= lo[i];
  return hi;
}

std::vector<double> fir_filter(std::span<const double> x, std::span<const double> taps,
                               std::size_t stride) {
  require(stride >= 1, "fir_filter: stride must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto ntaps = static_cast<std::ptrdiff_t>(taps.size());
  const std::ptrdiff_t mid = ntaps / 2;
  std::vector<double> y((x.size() + stride - 1) / stride);
  for (std::size_t o = 0; o < y.size(); ++o) {
    const auto centre = static_cast<std::ptrdiff_t>(o * stride);
    // Taps k touch x[centre + mid - k]; clip k to keep the index in range.
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, centre + mid - (n - 1));
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(ntaps - 1, centre + mid);
    double acc = 0.0;
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
      acc += taps[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(centre + mid - k)];
    }
    y[o] = acc;
  }
  return y;
}

RealDft::RealDft(std::size_t n) : n_(n), cos_(n), sin_(n) {
  require(n >= 2, "RealDft: length must be >= 2");
  for (std::size_t m = 0; m < n; ++m) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    cos_[m] = std::cos(phase);
    sin_[m] = std::sin(phase);
  }
}

void RealDft::power(std::span<const double> x, std::span<double> out) const {
  require(x.size() == n_ && out.size() == bins(), "RealDft::power: size mismatch");
  for (std::size_t k = 0; k < bins(); ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      re += x[j] * cos_[idx];
      im -= x[j] * sin_[idx];
      idx += k;
      if (idx >= n_) idx -= n_;
    }
    out[k] = re * re + im * im;
  }
}

std::vector<double> dft_magnitude(std::span<const double> x) {
  RealDft dft(x.size());
  std::vector<double> p(dft.bins());
  dft.power(x, p);
  for (double& v : p) v = std::sqrt(v);
  return p;
}

}  // namespace hopfrc::dsp
