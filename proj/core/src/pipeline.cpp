#include "hopfrc/pipeline.hpp"

#include <cmath>

namespace hopfrc::harness {

audio::AudioClip prepare(const audio::AudioClip& raw) {
  return audio::normalize(audio::resample(audio::normalize(raw), audio::kReservoirRate));
}

audio::AudioClip fit_length(const audio::AudioClip& clip, double seconds) {
  audio::AudioClip out = clip;
  out.samples.resize(static_cast<std::size_t>(std::llround(seconds * clip.rate)), 0.0);
  return out;
}

features::FeatureMap hopf_map(const audio::AudioClip& source, const FeatureSettings& s) {
  const auto clip = fit_length(prepare(source));
  return features::assemble_feature_map(reservoir::run_reservoir(clip, s.reservoir), s.activation);
}

std::vector<features::FeatureMap> hopf_maps(const audio::AudioClip& source, const FeatureSettings& s) {
  const auto clip = prepare(source);
  auto windows = audio::segment(clip, 1.0);
  if (windows.empty()) windows.push_back(fit_length(clip));
  std::vector<features::FeatureMap> maps;
  for (const auto& w : windows) {
    maps.push_back(features::assemble_feature_map(reservoir::run_reservoir(w, s.reservoir), s.activation));
  }
  return maps;
}

features::FeatureMap mel_map(const audio::AudioClip& source, const FeatureSettings& s) {
  return features::mel_spectrogram(fit_length(audio::normalize(source)), s.mel);
}

LabeledMaps featurize_manifest(const audio::DatasetManifest& manifest, const FeatureSettings& s, int synth_rate,
                               unsigned threads) {
  const auto per_entry =
      parallel_map<std::vector<features::FeatureMap>>(manifest.entries.size(), threads, [&](std::size_t i) {
        return hopf_maps(audio::load_entry(manifest.entries[i], synth_rate), s);
      });
  LabeledMaps out;
  for (std::size_t i = 0; i < per_entry.size(); ++i) {
    const auto& e = manifest.entries[i];
    for (std::size_t k = 0; k < per_entry[i].size(); ++k) {
      auto map = per_entry[i][k];
      map.source_id = k == 0 ? e.id : e.id + "@" + std::to_string(k);
      out.maps.push_back(std::move(map));
      out.labels.push_back(e.label);
      out.splits.push_back(e.split);
      out.entries.push_back(i);
    }
  }
  return out;
}

unsigned worker_count(bool single_thread) {
  if (single_thread) return 1;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace hopfrc::harness
