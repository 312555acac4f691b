#pragma once

#include <optional>

#include "hopfrc/config.hpp"
#include "hopfrc/report.hpp"

namespace hopfrc::harness {

/// Dispatches on cfg.kind after cfg.validate(); fills the config echo, hash
/// and wall-clock time.
Report run_experiment(const ExperimentConfig& cfg);

/// Hopf maps (exported as PGM) and an index table for every dataset clip.
Report run_featurize(const ExperimentConfig& cfg);

/// Hopf and Mel distances from a reference clip to same-class variants,
/// between the variants, and to one clip of another class. Synthetic runs use
/// the siren class; manifest runs use the first entries of classes 0 and 1.
Report run_compare_mel(const ExperimentConfig& cfg);

/// Clean-vs-noisy distances in both feature spaces for each SNR in
/// cfg.snr_db (plus a noiseless row), on the siren-like sweep or the first
/// manifest clip. Both spaces see the same noisy clip.
Report run_noise_sweep(const ExperimentConfig& cfg);

/// split -> featurize -> train (CNN or ridge) -> evaluate.
Report run_classify(const ExperimentConfig& cfg);

/// Freezes the conv blocks of a base model and retrains the head on
/// cfg.task for cfg.task_epochs. The base comes from `base`, else
/// cfg.base_checkpoint, else is trained on cfg.dataset first.
Report run_reconfigure(const ExperimentConfig& cfg, std::optional<readout::ReadoutModel> base = std::nullopt);

/// Per-window distances of the mixed clip to the clean siren map, at
/// cfg.dominant_gain and at twice that gain.
Report run_mixed_signal(const ExperimentConfig& cfg);

}  // namespace hopfrc::harness
