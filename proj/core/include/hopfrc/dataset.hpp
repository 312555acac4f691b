#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hopfrc/synth.hpp"

namespace hopfrc::audio {

enum class Split { kUnassigned, kTrain, kTest };

std::string_view to_string(Split split);

struct DatasetEntry {
  std::variant<std::filesystem::path, SynthSpec> source;
  int label = 0;  // index into DatasetManifest::class_names
  Split split = Split::kUnassigned;
  std::string id;  // stable identifier used in reports and file names
};

struct DatasetManifest {
  std::vector<DatasetEntry> entries;
  std::vector<std::string> class_names;
  std::uint64_t seed = 0;

  /// Throws kContract if any label is out of range.
  void validate() const;
  std::vector<std::size_t> class_counts() const;
};

/// Stratified shuffle split. Each class with n entries contributes
/// round(train_fraction * n) training entries; classes with fewer than
/// `min_per_class` entries are rejected (kContract naming the class).
/// Deterministic in `seed`; entry order is preserved.
DatasetManifest split_dataset(const DatasetManifest& manifest, double train_fraction = 0.8,
                              std::uint64_t seed = 0, std::size_t min_per_class = 5);

/// Reads a manifest CSV:
///
///   # classes: dog,siren,...        (optional; otherwise order of first use)
///   path,label[,split]
///   clips/a.wav,dog
///
/// Relative paths are resolved against the manifest's directory.
DatasetManifest read_manifest(const std::filesystem::path& csv_path);

/// Writes the same format (path entries only; synthetic entries are
/// written with their id as the path).
std::string format_manifest(const DatasetManifest& manifest);

/// Loads the audio of one entry: WAV file or synthesis at `synth_rate`.
AudioClip load_entry(const DatasetEntry& entry, int synth_rate);

/// Cuts a clip into non-overlapping windows of `window_s` seconds; a
/// trailing partial window is dropped.
std::vector<AudioClip> segment(const AudioClip& clip, double window_s = 1.0);

}  // namespace hopfrc::audio
