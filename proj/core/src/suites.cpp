#include "hopfrc/suites.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>

#include "hopfrc/error.hpp"
#include "hopfrc/rng.hpp"

namespace hopfrc::harness {
namespace {

using audio::SynthKind;
using audio::SynthSpec;

const std::vector<std::string> kSuiteA{"tone", "chirp", "am", "noise"};
const std::vector<std::string> kSuiteB{"dyad", "down-chirp", "siren", "rumble"};
const std::vector<std::string> kSuiteTen{"tone",  "chirp",  "am",       "noise",    "dyad",
                                         "down-chirp", "siren", "rumble", "low-tone", "broadband"};

SynthSpec tone(double f, double phase, double gain = 1.0) {
  SynthSpec s;
  s.kind = SynthKind::kTone;
  s.frequency = f;
  s.phase = phase;
  s.gain = gain;
  return s;
}

SynthSpec noise_band(double lo, double hi, std::uint64_t seed) {
  SynthSpec s;
  s.kind = SynthKind::kNoise;
  s.band_low = lo;
  s.band_high = hi;
  s.seed = seed;
  return s;
}

}  // namespace

std::vector<std::string> suite_names() { return {"A", "B", "ten"}; }

std::vector<std::string> suite_classes(const std::string& suite) {
  if (suite == "A") return kSuiteA;
  if (suite == "B") return kSuiteB;
  if (suite == "ten") return kSuiteTen;
  fail(ErrorKind::kContract, "unknown synthetic suite '" + suite + "' (expected A, B or ten)");
}

SynthSpec suite_clip(const std::string& suite, const std::string& cls, std::uint64_t seed,
                     std::optional<double> background_snr_db) {
  const auto classes = suite_classes(suite);
  require(std::find(classes.begin(), classes.end(), cls) != classes.end(),
          "suite " + suite + " has no class '" + cls + "'");
  std::uint64_t rng = seed;
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * next_unit(rng); };
  const double phase = uniform(0.0, 2.0 * std::numbers::pi);

  SynthSpec s;
  if (cls == "tone") {
    s = tone(uniform(300.0, 1200.0), phase);
  } else if (cls == "chirp") {
    s.kind = SynthKind::kChirp;
    s.f0 = uniform(200.0, 400.0);
    s.f1 = s.f0 + uniform(400.0, 1000.0);
    s.phase = phase;
  } else if (cls == "am") {
    s.kind = SynthKind::kAmTone;
    s.frequency = uniform(300.0, 1200.0);
    s.mod_rate = uniform(4.0, 16.0);
    s.mod_depth = 0.8;
    s.phase = phase;
  } else if (cls == "noise") {
    const double lo = uniform(200.0, 500.0);
    s = noise_band(lo, lo + uniform(400.0, 1000.0), next_u64(rng));
  } else if (cls == "dyad") {
    const double f = uniform(300.0, 700.0);
    s.kind = SynthKind::kMixture;
    s.components = {tone(f, phase), tone(f * uniform(1.2, 1.6), uniform(0.0, 2.0 * std::numbers::pi))};
  } else if (cls == "down-chirp") {
    s.kind = SynthKind::kChirp;
    s.f0 = uniform(1000.0, 1600.0);
    s.f1 = s.f0 - uniform(500.0, 800.0);
    s.phase = phase;
  } else if (cls == "siren") {
    s.kind = SynthKind::kChirp;
    s.f0 = uniform(450.0, 700.0);
    s.f1 = s.f0 + uniform(500.0, 900.0);
    s.sweep_period = uniform(0.25, 0.5);
    s.phase = phase;
  } else if (cls == "rumble") {
    const double lo = uniform(40.0, 80.0);
    s = noise_band(lo, lo + uniform(120.0, 240.0), next_u64(rng));
  } else if (cls == "low-tone") {
    s = tone(uniform(80.0, 200.0), phase);
  } else {  // broadband
    s = noise_band(uniform(50.0, 150.0), uniform(1600.0, 1800.0), next_u64(rng));
  }
  s.duration = 1.0;
  s.seed = next_u64(rng);
  s.background_snr_db = background_snr_db;
  return s;
}

audio::DatasetManifest build_suite(const std::string& suite, std::size_t clips_per_class, std::uint64_t seed,
                                   std::optional<double> background_snr_db) {
  audio::DatasetManifest m;
  m.class_names = suite_classes(suite);
  m.seed = seed;
  std::uint64_t rng = seed ^ 0x5A17E5EED0000000ULL;
  for (std::size_t c = 0; c < m.class_names.size(); ++c) {
    for (std::size_t k = 0; k < clips_per_class; ++k) {
      audio::DatasetEntry e;
      e.source = suite_clip(suite, m.class_names[c], next_u64(rng), background_snr_db);
      e.label = static_cast<int>(c);
      char id[96];
      std::snprintf(id, sizeof id, "%s-%s-%03zu", suite.c_str(), m.class_names[c].c_str(), k);
      e.id = id;
      m.entries.push_back(std::move(e));
    }
  }
  return m;
}

SynthSpec siren_spec(double duration, double gain) {
  SynthSpec s;
  s.kind = SynthKind::kChirp;
  s.f0 = 600.0;
  s.f1 = 1400.0;
  s.sweep_period = 1.0;
  s.duration = duration;
  s.gain = gain;
  return s;
}

SynthSpec siren_variant(std::uint64_t seed) {
  std::uint64_t rng = seed;
  auto jitter = [&](double v, double rel) { return v * (1.0 + rel * (2.0 * next_unit(rng) - 1.0)); };
  SynthSpec s = siren_spec();
  s.f0 = jitter(s.f0, 0.03);
  s.f1 = jitter(s.f1, 0.03);
  s.sweep_period = jitter(s.sweep_period, 0.05);
  s.phase = 2.0 * std::numbers::pi * next_unit(rng);
  s.seed = next_u64(rng);
  s.background_snr_db = 30.0;
  return s;
}

SynthSpec mixed_signal_spec(double duration, double dominant_gain, std::uint64_t seed) {
  SynthSpec horn;
  horn.kind = SynthKind::kMixture;
  horn.components = {tone(420.0, 0.0), tone(525.0, 0.0)};
  SynthSpec drill = noise_band(900.0, 1700.0, seed);
  SynthSpec siren = siren_spec(duration, dominant_gain);
  siren.start = duration / 2.0;

  SynthSpec mix;
  mix.kind = SynthKind::kMixture;
  mix.duration = duration;
  mix.seed = seed;
  mix.components = {horn, drill, siren};
  return mix;
}

}  // namespace hopfrc::harness
