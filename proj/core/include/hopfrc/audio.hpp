#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace hopfrc::audio {

inline constexpr int kReservoirRate = 4000;

/// Mono clip. `normalized` is set only by normalize() / add_white_noise().
struct AudioClip {
  std::vector<double> samples;
  int rate = kReservoirRate;
  bool normalized = false;

  double duration() const { return rate > 0 ? static_cast<double>(samples.size()) / rate : 0.0; }
};

/// Peak normalization into [-1, 1]. A silent clip passes through unchanged
/// but is still flagged normalized. Throws kContract on an empty clip.
AudioClip normalize(const AudioClip& clip);

/// True when every sample lies in [-1, 1].
bool within_unit_range(const AudioClip& clip);

/// Anti-aliased downsampling to `target_rate`.
///
/// The source is halved (127-tap windowed-sinc low-pass, then keep every
/// other sample) while it is at least four times the target rate, a final
/// 127-tap low-pass with cutoff 0.45 * target_rate is applied at the
/// intermediate rate, and the filtered signal is linearly interpolated onto
/// the target grid. Output length is floor(n * target_rate / rate).
/// Upsampling throws kUnsupported.
AudioClip resample(const AudioClip& clip, int target_rate = kReservoirRate);

/// Sentinel for "no noise".
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct NoisyClip {
  AudioClip clip;            // re-peak-normalized signal + noise
  double achieved_snr_db;    // measured on the un-renormalized mixture
};

/// Adds zero-mean Gaussian noise with variance P_signal / 10^(snr_db/10).
/// snr_db == kNoNoise returns the clip unchanged. Requires a normalized,
/// non-silent clip.
NoisyClip add_white_noise(const AudioClip& clip, double snr_db, std::uint64_t seed);

/// Mean of x^2.
double power(const std::vector<double>& samples);

}  // namespace hopfrc::audio
