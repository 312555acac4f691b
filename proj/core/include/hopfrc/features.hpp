#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hopfrc/audio.hpp"
#include "hopfrc/grid.hpp"
#include "hopfrc/reservoir.hpp"

namespace hopfrc::features {

enum class MapKind { kHopfVirtualNodes, kMelBands };

/// Time rows x feature columns, every value in [0, 1].
struct FeatureMap {
  Grid grid;
  MapKind kind = MapKind::kHopfVirtualNodes;
  std::string source_id;
};

struct ActivationConfig {
  bool apply_atanh = true;
  double clamp_margin = 1e-3;  // entries are clamped to +/-(1 - clamp_margin) before atanh

  void validate() const;
};

struct MapLayout {
  std::size_t time_rows = 200;
  std::size_t decimation = 20;  // keep every decimation-th reservoir row

  std::size_t input_rows() const { return time_rows * decimation; }
};

/// Scales by 1 / max|m|, clamps to +/-(1 - eps) and applies atanh (or only
/// scales, when apply_atanh is false). An all-zero matrix is returned as is.
Grid atanh_activate(const Grid& m, const ActivationConfig& cfg);

/// Rescales the whole grid to [0, 1]; a constant grid becomes all 0.5.
Grid minmax_rescale(const Grid& m);

/// Keeps rows 0, step, 2*step, ...
Grid decimate_rows(const Grid& m, std::size_t step);

/// decimate -> activate -> min-max rescale, so the activation's peak scale
/// and the [0, 1] range both come from the rows that are kept. Requires
/// resp.matrix.rows() == layout.input_rows() (4000 for 1 s at 4000 Hz).
FeatureMap assemble_feature_map(const reservoir::ReservoirResponse& resp, const ActivationConfig& cfg,
                                const MapLayout& layout = {});

/// mel(f) = 2595 log10(1 + f / 700)
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular Mel filterbank over DFT bins 0..n_fft/2, edges evenly spaced
/// in mel from 0 Hz to Nyquist. Row b holds the weights of band b.
Grid mel_filterbank(std::size_t n_bands, std::size_t n_fft, int rate);
/// Centre frequencies (Hz) of the bands of mel_filterbank().
std::vector<double> mel_band_centres(std::size_t n_bands, int rate);

struct MelConfig {
  std::size_t n_bands = 100;
  double hop_s = 0.025;        // non-overlapping frames of this length
  double log_floor = 1e-10;    // added to band energy before log
};

/// Hann-windowed non-overlapping frames -> power DFT -> Mel filterbank ->
/// log energy -> whole-map min-max rescale. Rows are frames, columns bands.
FeatureMap mel_spectrogram(const audio::AudioClip& clip, const MelConfig& cfg = {});

/// Frobenius norm of a - b. Shapes must match.
double euclidean_distance(const FeatureMap& a, const FeatureMap& b);
double euclidean_distance(const Grid& a, const Grid& b);

/// Distance divided by sqrt(cell count); comparable across map sizes.
double normalized_distance(const FeatureMap& a, const FeatureMap& b);

/// Binary PGM (P5), 8-bit, byte = round(255 v).
std::vector<std::uint8_t> export_pgm(const FeatureMap& map);

/// Comma-separated rows with 17 significant digits.
std::string to_csv(const Grid& grid);

}  // namespace hopfrc::features
