#include "hopfrc/audio.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hopfrc/dsp.hpp"
#include "hopfrc/error.hpp"

namespace hopfrc::audio {

AudioClip normalize(const AudioClip& clip) {
  require(!clip.samples.empty(), "normalize: empty clip");
  AudioClip out = clip;
  double peak = 0.0;
  for (double v : clip.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out.samples) v /= peak;
  }
  out.normalized = true;
  return out;
}

bool within_unit_range(const AudioClip& clip) {
  return std::all_of(clip.samples.begin(), clip.samples.end(),
                     [](double v) { return std::abs(v) <= 1.0; });
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  require(clip.rate > 0 && target_rate > 0, "resample: rates must be positive");
  if (clip.rate < target_rate) {
    fail(ErrorKind::kUnsupported, "resample: upsampling " + std::to_string(clip.rate) + " -> " +
                                      std::to_string(target_rate) + " Hz is not supported");
  }
  if (clip.rate == target_rate) {
    AudioClip out = clip;
    out.normalized = false;
    return out;
  }

  std::vector<double> x = clip.samples;
  double rate = clip.rate;
  while (rate >= 4.0 * target_rate) {
    x = dsp::fir_filter(x, dsp::lowpass_taps(0.45 * rate / 2.0, rate), 2);
    rate /= 2.0;
  }
  x = dsp::fir_filter(x, dsp::lowpass_taps(0.45 * target_rate, rate));

  const auto out_len = static_cast<std::size_t>(
      static_cast<std::uint64_t>(clip.samples.size()) * static_cast<std::uint64_t>(target_rate) /
      static_cast<std::uint64_t>(clip.rate));
  AudioClip out;
  out.rate = target_rate;
  out.samples.resize(out_len);
  const double ratio = rate / target_rate;
  for (std::size_t m = 0; m < out_len; ++m) {
    const double pos = static_cast<double>(m) * ratio;
    const auto i0 = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i0);
    const double a = i0 < x.size() ? x[i0] : 0.0;
    const double b = i0 + 1 < x.size() ? x[i0 + 1] : a;
    out.samples[m] = a + frac * (b - a);
  }
  return out;
}

double power(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double v : samples) acc += v * v;
  return acc / static_cast<double>(samples.size());
}

NoisyClip add_white_noise(const AudioClip& clip, double snr_db, std::uint64_t seed) {
  require(clip.normalized, "add_white_noise: clip must be normalized");
  if (std::isinf(snr_db) && snr_db > 0.0) return {clip, kNoNoise};
  if (!std::isfinite(snr_db)) fail(ErrorKind::kNumericDomain, "add_white_noise: snr_db not finite");
  const double signal_power = power(clip.samples);
  require(signal_power > 0.0, "add_white_noise: SNR undefined for a silent clip");

  const double sigma = std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  AudioClip noisy = clip;
  std::vector<double> noise(clip.samples.size());
  for (std::size_t i = 0; i < noise.size(); ++i) {
    noise[i] = gauss(rng);
    noisy.samples[i] += noise[i];
  }
  const double achieved = 10.0 * std::log10(signal_power / power(noise));
  noisy.normalized = false;
  return {normalize(noisy), achieved};
}

}  // namespace hopfrc::audio
