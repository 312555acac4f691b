#include "hopfrc/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hopfrc/dsp.hpp"
#include "hopfrc/error.hpp"

namespace hopfrc::audio {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> generate(const SynthSpec& spec, int rate, std::size_t n) {
  std::vector<double> x(n, 0.0);
  const double dt = 1.0 / rate;
  switch (spec.kind) {
    case SynthKind::kTone:
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = spec.gain * std::sin(kTwoPi * spec.frequency * static_cast<double>(i) * dt + spec.phase);
      }
      break;
    case SynthKind::kChirp: {
      const double span = spec.sweep_period > 0.0 ? spec.sweep_period : spec.duration;
      double phase = spec.phase;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        double u = std::fmod(t, span) / span;
        if (spec.sweep_period > 0.0) u = u < 0.5 ? 2.0 * u : 2.0 * (1.0 - u);
        const double f = spec.f0 + (spec.f1 - spec.f0) * u;
        x[i] = spec.gain * std::sin(phase);
        phase += kTwoPi * f * dt;
      }
      break;
    }
    case SynthKind::kAmTone:
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double env = 1.0 + spec.mod_depth * std::sin(kTwoPi * spec.mod_rate * t);
        x[i] = spec.gain * env * std::sin(kTwoPi * spec.frequency * t + spec.phase);
      }
      break;
    case SynthKind::kNoise: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> white(n);
      for (double& v : white) v = gauss(rng);
      x = dsp::fir_filter(white, dsp::bandpass_taps(spec.band_low, spec.band_high, rate));
      // Same RMS as a sinusoid of amplitude `gain`.
      const double rms = std::sqrt(power(x));
      if (rms > 0.0) {
        for (double& v : x) v *= spec.gain / (std::sqrt(2.0) * rms);
      }
      break;
    }
    case SynthKind::kMixture:
      for (const SynthSpec& c : spec.components) {
        const auto part = generate(c, rate, n);
        const auto first = static_cast<std::size_t>(std::llround(c.start * rate));
        const std::size_t last =
            c.end > 0.0 ? std::min(n, static_cast<std::size_t>(std::llround(c.end * rate))) : n;
        for (std::size_t i = first; i < last; ++i) x[i] += spec.gain * part[i];
      }
      break;
  }
  return x;
}

}  // namespace

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kTone: return "tone";
    case SynthKind::kChirp: return "chirp";
    case SynthKind::kAmTone: return "am";
    case SynthKind::kNoise: return "noise";
    case SynthKind::kMixture: return "mixture";
  }
  return "unknown";
}

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "tone") return SynthKind::kTone;
  if (name == "chirp") return SynthKind::kChirp;
  if (name == "am") return SynthKind::kAmTone;
  if (name == "noise") return SynthKind::kNoise;
  if (name == "mixture") return SynthKind::kMixture;
  throw ParseError("unknown synth kind '" + std::string(name) + "'", 0);
}

void SynthSpec::validate(int rate) const {
  require(rate > 0, "SynthSpec: rate must be > 0");
  require(duration > 0.0 && std::isfinite(duration), "SynthSpec: duration must be > 0");
  const double nyquist = rate / 2.0;
  auto below_nyquist = [&](double f, const char* what) {
    require(f >= 0.0 && f < nyquist, std::string("SynthSpec: ") + what + " " + std::to_string(f) +
                                         " Hz not below Nyquist " + std::to_string(nyquist) + " Hz");
  };
  switch (kind) {
    case SynthKind::kTone:
      below_nyquist(frequency, "frequency");
      break;
    case SynthKind::kChirp:
      below_nyquist(f0, "f0");
      below_nyquist(f1, "f1");
      break;
    case SynthKind::kAmTone:
      below_nyquist(frequency + mod_rate, "am upper sideband");
      require(mod_depth >= 0.0 && mod_depth <= 1.0, "SynthSpec: mod_depth must be in [0, 1]");
      break;
    case SynthKind::kNoise:
      require(band_low > 0.0 && band_high > band_low, "SynthSpec: need 0 < band_low < band_high");
      below_nyquist(band_high, "band_high");
      break;
    case SynthKind::kMixture:
      require(!components.empty(), "SynthSpec: mixture needs components");
      for (const auto& c : components) c.validate(rate);
      break;
  }
}

AudioClip synthesize(const SynthSpec& spec, int rate) {
  spec.validate(rate);
  const auto n = static_cast<std::size_t>(std::llround(spec.duration * rate));
  AudioClip clip;
  clip.rate = rate;
  clip.samples = generate(spec, rate, n);
  clip = normalize(clip);
  if (spec.background_snr_db) {
    clip = add_white_noise(clip, *spec.background_snr_db, spec.seed ^ 0x9E3779B97F4A7C15ULL).clip;
  }
  return clip;
}

}  // namespace hopfrc::audio
