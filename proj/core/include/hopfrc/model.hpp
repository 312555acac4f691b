#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hopfrc/layers.hpp"

namespace hopfrc::readout {

/// Knobs of the default convolutional readout.
struct ArchitectureConfig {
  std::vector<std::size_t> conv_channels{8, 16, 32, 32};  // one block per entry
  std::size_t convs_per_block = 1;                        // conv layers before each 2x2 pool
  std::size_t kernel = 3;
  std::size_t hidden = 16;                                // dense width after flatten
};

/// Ordered layer stack with per-layer freeze flags. Copies are deep.
class ReadoutModel {
 public:
  ReadoutModel() = default;
  ReadoutModel(Shape input, const std::vector<LayerSpec>& specs, std::uint64_t seed);

  ReadoutModel(const ReadoutModel& other);
  ReadoutModel& operator=(const ReadoutModel& other);
  ReadoutModel(ReadoutModel&&) noexcept = default;
  ReadoutModel& operator=(ReadoutModel&&) noexcept = default;

  const Shape& input_shape() const { return input_; }
  Shape output_shape() const;
  std::size_t n_classes() const { return output_shape().channels; }
  std::size_t layer_count() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }
  const Layer& layer(std::size_t i) const { return *layers_[i]; }
  std::vector<LayerSpec> specs() const;

  /// Logits for one sample; caches activations for backward().
  Tensor forward(const Tensor& input);
  /// Forward through layers [first, last).
  Tensor forward_range(const Tensor& input, std::size_t first, std::size_t last);
  /// Accumulates parameter gradients from dL/d(logits), stopping at layer
  /// `stop` (gradients are not propagated into earlier layers).
  void backward(const Tensor& grad_logits, std::size_t stop = 0);

  void zero_grads();
  void scale_grads(double factor);

  std::size_t param_count() const;
  std::size_t trainable_param_count() const;
  /// Index of the Flatten layer (layer_count() if absent).
  std::size_t flatten_index() const;
  /// Index of the first unfrozen layer that has parameters.
  std::size_t first_trainable() const;

  /// Freezes every layer before Flatten.
  void freeze_feature_extractor();
  /// Replaces Flatten-onward layers with freshly initialized ones ending in
  /// `n_classes` outputs; the hidden width is kept.
  void rebuild_head(std::size_t n_classes, std::uint64_t seed);

  /// Adam step counter (incremented once per optimizer step).
  std::uint64_t adam_step = 0;

  /// Appends a layer; shapes must compose.
  void push(std::unique_ptr<Layer> layer);

 private:
  Shape input_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

/// [Conv(k, Swish) x convs_per_block -> MaxPool]* -> Flatten ->
/// Dense(hidden, Swish) -> Dense(n_classes). Input defaults to 200x100x1.
ReadoutModel build_default_model(std::size_t n_classes, std::uint64_t seed, const ArchitectureConfig& arch = {},
                                 Shape input = {200, 100, 1});

/// 2304*16 + 16 + 16*n + n for the default architecture; in general
/// flat*hidden + hidden + hidden*n + n.
std::size_t head_param_count(std::size_t flat_features, std::size_t hidden, std::size_t n_classes);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update of `p` using p.grad, at step t (>= 1).
void adam_update(ParamBlock& p, std::uint64_t t, const AdamConfig& cfg);

/// Increments model.adam_step and updates every non-frozen parameter.
void adam_step(ReadoutModel& model, const AdamConfig& cfg);

}  // namespace hopfrc::readout
