#pragma once

#include <algorithm>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "hopfrc/audio.hpp"
#include "hopfrc/dataset.hpp"
#include "hopfrc/features.hpp"
#include "hopfrc/reservoir.hpp"

namespace hopfrc::harness {

struct FeatureSettings {
  reservoir::ReservoirConfig reservoir;
  features::ActivationConfig activation;
  features::MelConfig mel;
};

/// normalize -> resample to 4 kHz -> normalize.
audio::AudioClip prepare(const audio::AudioClip& raw);

/// The first `seconds` of a clip, zero-padded when shorter.
audio::AudioClip fit_length(const audio::AudioClip& clip, double seconds = 1.0);

/// Source clip at any rate -> prepared clip cut (or zero-padded) to 1 s ->
/// reservoir -> 200 x N map.
features::FeatureMap hopf_map(const audio::AudioClip& source, const FeatureSettings& s);
/// One map per non-overlapping 1 s window of the prepared clip (the clip is
/// normalized once, as a whole). A clip shorter than 1 s is zero-padded to a
/// single window; a trailing partial window is dropped.
std::vector<features::FeatureMap> hopf_maps(const audio::AudioClip& source, const FeatureSettings& s);
/// Mel map of the normalized source clip at its own rate, trimmed/padded to 1 s.
features::FeatureMap mel_map(const audio::AudioClip& source, const FeatureSettings& s);

/// One row per 1 s window; windows inherit their clip's label and split.
struct LabeledMaps {
  std::vector<features::FeatureMap> maps;  // source_id: entry id, plus "@k" for window k > 0
  std::vector<int> labels;
  std::vector<audio::Split> splits;
  std::vector<std::size_t> entries;        // index of the source entry
};

/// Hopf maps of every window of every entry, in manifest order.
LabeledMaps featurize_manifest(const audio::DatasetManifest& manifest, const FeatureSettings& s, int synth_rate,
                               unsigned threads);

unsigned worker_count(bool single_thread);

/// out[i] = fn(i) for i in [0, n), computed on up to `threads` workers. The
/// result does not depend on the thread count. The first exception thrown
/// (lowest index) is rethrown.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace hopfrc::harness
