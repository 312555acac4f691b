#include <cmath>
#include <numbers>

#include "hopfrc/dsp.hpp"
#include "hopfrc/error.hpp"
#include "hopfrc/features.hpp"

namespace hopfrc::features {
namespace {

std::vector<double> band_edges_hz(std::size_t n_bands, int rate) {
  const double top = hz_to_mel(rate / 2.0);
  std::vector<double> edges(n_bands + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(n_bands + 1));
  }
  return edges;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> mel_band_centres(std::size_t n_bands, int rate) {
  const auto edges = band_edges_hz(n_bands, rate);
  return {edges.begin() + 1, edges.end() - 1};
}

Grid mel_filterbank(std::size_t n_bands, std::size_t n_fft, int rate) {
  require(n_bands >= 1 && n_fft >= 2 && rate > 0, "mel_filterbank: invalid arguments");
  const auto edges = band_edges_hz(n_bands, rate);
  const std::size_t bins = n_fft / 2 + 1;
  Grid fb(n_bands, bins);
  for (std::size_t b = 0; b < n_bands; ++b) {
    const double lo = edges[b], centre = edges[b + 1], hi = edges[b + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > lo && f <= centre) w = (f - lo) / (centre - lo);
      else if (f > centre && f < hi) w = (hi - f) / (hi - centre);
      fb(b, k) = w;
    }
  }
  return fb;
}

FeatureMap mel_spectrogram(const audio::AudioClip& clip, const MelConfig& cfg) {
  require(!clip.samples.empty(), "mel_spectrogram: empty clip");
  require(cfg.n_bands >= 1 && cfg.hop_s > 0.0, "mel_spectrogram: invalid config");
  const auto frame = static_cast<std::size_t>(std::llround(cfg.hop_s * clip.rate));
  require(frame >= 2 && clip.samples.size() >= frame,
          "mel_spectrogram: clip shorter than one " + std::to_string(cfg.hop_s) + " s frame");
  const std::size_t n_frames = clip.samples.size() / frame;

  const dsp::RealDft dft(frame);
  const Grid fb = mel_filterbank(cfg.n_bands, frame, clip.rate);
  std::vector<double> window(frame);
  for (std::size_t i = 0; i < frame; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(frame));
  }

  Grid energy(n_frames, cfg.n_bands);
  std::vector<double> buf(frame), spec(dft.bins());
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (std::size_t i = 0; i < frame; ++i) buf[i] = clip.samples[t * frame + i] * window[i];
    dft.power(buf, spec);
    for (std::size_t b = 0; b < cfg.n_bands; ++b) {
      double e = 0.0;
      const auto w = fb.row(b);
      for (std::size_t k = 0; k < spec.size(); ++k) e += w[k] * spec[k];
      energy(t, b) = std::log(e + cfg.log_floor);
    }
  }
  FeatureMap map;
  map.kind = MapKind::kMelBands;
  map.grid = minmax_rescale(energy);
  return map;
}

}  // namespace hopfrc::features
