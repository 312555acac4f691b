#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hopfrc/dataset.hpp"
#include "hopfrc/synth.hpp"

namespace hopfrc::harness {

/// Built-in synthetic stand-ins for the recorded corpora. Every clip is 1 s;
/// its parameters are drawn from per-class ranges using the given seed.
///
///   "A"    tone, chirp (upward), am, noise (band-limited)
///   "B"    dyad (two tones), down-chirp, siren (repeating triangular sweep),
///          rumble (low band noise)
///   "ten"  the classes of A and B plus low-tone and broadband
std::vector<std::string> suite_names();
std::vector<std::string> suite_classes(const std::string& suite);

/// `clips_per_class` clips of every class of `suite`, in class-major order.
/// Throws kContract for an unknown suite name.
audio::DatasetManifest build_suite(const std::string& suite, std::size_t clips_per_class, std::uint64_t seed,
                                   std::optional<double> background_snr_db = 30.0);

/// One clip of class `cls` of `suite` drawn from `seed`.
audio::SynthSpec suite_clip(const std::string& suite, const std::string& cls, std::uint64_t seed,
                            std::optional<double> background_snr_db = 30.0);

/// Siren-like repeating sweep 600 -> 1400 -> 600 Hz, one sweep per second.
audio::SynthSpec siren_spec(double duration = 1.0, double gain = 1.0);

/// The siren with its sweep limits and period jittered by a few percent,
/// random start phase and 30 dB background noise: a recording-to-recording
/// variant of the same sound.
audio::SynthSpec siren_variant(std::uint64_t seed);

/// `duration` seconds: a car-horn-like dyad and a drill-like noise band
/// throughout, and the siren at `dominant_gain` from the midpoint on.
audio::SynthSpec mixed_signal_spec(double duration, double dominant_gain, std::uint64_t seed);

}  // namespace hopfrc::harness
