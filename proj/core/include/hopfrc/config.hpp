#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hopfrc/features.hpp"
#include "hopfrc/model.hpp"
#include "hopfrc/reservoir.hpp"
#include "hopfrc/train.hpp"

namespace hopfrc::harness {

enum class ExperimentKind { kFeaturize, kCompareMel, kNoiseSweep, kClassify, kReconfigure, kMixedSignal };

std::string_view to_string(ExperimentKind kind);
/// "featurize", "compare-mel", "noise-sweep", "classify", "reconfigure",
/// "mixed-signal". Throws kParse.
ExperimentKind parse_experiment_kind(std::string_view name);

/// Where clips come from: a manifest CSV, or a built-in synthetic suite.
struct DatasetSource {
  std::optional<std::filesystem::path> manifest;
  std::string suite = "A";               // see suites.hpp
  std::size_t clips_per_class = 50;
  std::optional<double> background_snr_db = 30.0;
  double train_fraction = 0.8;
  int synth_rate = 16000;                // synthetic clips are generated here, then resampled

  void validate() const;
};

enum class ReadoutKind { kCnn, kRidge };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kClassify;
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";

  reservoir::ReservoirConfig reservoir;
  features::ActivationConfig activation;
  features::MelConfig mel;
  DatasetSource dataset;

  ReadoutKind readout = ReadoutKind::kCnn;
  readout::ArchitectureConfig architecture;
  readout::TrainConfig train;
  double ridge_lambda = 1.0;

  // noise-sweep
  std::vector<double> snr_db{40.0, 30.0, 20.0};
  // compare-mel
  std::size_t variants = 3;
  // reconfigure: base checkpoint (trained on `dataset` when absent) and new task
  std::optional<std::filesystem::path> base_checkpoint;
  DatasetSource task = [] {
    DatasetSource d;
    d.suite = "B";
    return d;
  }();
  std::size_t task_epochs = 20;
  // mixed-signal
  double mixture_duration = 8.0;
  double dominant_gain = 2.0;

  bool single_thread = false;

  /// Throws kContract for inconsistent settings.
  void validate() const;
};

/// Parses the JSON config format (see README). Unknown keys are rejected.
/// Relative paths are resolved against `base_dir`. Throws ParseError with
/// the byte offset of a syntax error.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of every setting that influences results (the output
/// directory and thread mode are left out), keys sorted.
std::string canonical_json(const ExperimentConfig& cfg);
/// 64-bit FNV-1a of canonical_json(), as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace hopfrc::harness
