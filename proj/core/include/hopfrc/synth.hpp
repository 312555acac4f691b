#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hopfrc/audio.hpp"

namespace hopfrc::audio {

enum class SynthKind { kTone, kChirp, kAmTone, kNoise, kMixture };

std::string_view to_string(SynthKind kind);
/// Accepts "tone", "chirp", "am", "noise", "mixture". Throws kParse.
SynthKind parse_synth_kind(std::string_view name);

/// Recipe for one synthetic clip. Only the fields relevant to `kind` are read.
struct SynthSpec {
  SynthKind kind = SynthKind::kTone;
  double duration = 1.0;  // seconds
  std::uint64_t seed = 0;
  double gain = 1.0;      // amplitude, also the mixing weight inside a mixture
  double start = 0.0;     // active window inside a mixture [start, end); end <= 0 means "to the end"
  double end = 0.0;

  // tone / am carrier
  double frequency = 440.0;
  double phase = 0.0;

  // chirp: linear sweep f0 -> f1; with sweep_period > 0 the sweep is
  // triangular (f0 -> f1 -> f0) and repeats every sweep_period seconds.
  double f0 = 200.0;
  double f1 = 800.0;
  double sweep_period = 0.0;

  // am: gain * (1 + depth * sin(2 pi mod_rate t)) * sin(2 pi frequency t)
  double mod_rate = 8.0;
  double mod_depth = 0.8;

  // noise: Gaussian noise band-limited to [band_low, band_high]
  double band_low = 300.0;
  double band_high = 1200.0;

  // Optional white background noise at this SNR (dB) on the finished clip.
  std::optional<double> background_snr_db;

  std::vector<SynthSpec> components;  // mixture only

  /// Throws kContract for non-positive duration or frequencies at or above
  /// rate / 2.
  void validate(int rate) const;
};

/// Deterministic generation from `spec.seed`. The result is peak-normalized.
AudioClip synthesize(const SynthSpec& spec, int rate);

}  // namespace hopfrc::audio
