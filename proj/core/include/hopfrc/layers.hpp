#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hopfrc/tensor.hpp"

namespace hopfrc::readout {

// ---------------------------------------------------------------------------
// Elementwise pieces

double sigmoid(double x);
/// x * sigmoid(x)
double swish(double x);
/// sigmoid(x) + x * sigmoid(x) * (1 - sigmoid(x))
double swish_grad(double x);

// ---------------------------------------------------------------------------
// Convolution: stride 1, zero "same" padding, odd square kernel. Weights are
// laid out [kr][kc][in_ch][out_ch]; bias has out_ch entries. The forward map
// is a cross-correlation and returns the pre-activation.

Tensor conv2d_forward(const Tensor& input, std::span<const double> weights, std::span<const double> bias,
                      std::size_t kernel, std::size_t out_channels);

struct ConvGrads {
  Tensor grad_input;
  std::vector<double> grad_weights;
  std::vector<double> grad_bias;
};

/// Exact gradients of conv2d_forward given dL/d(output).
/// With `need_input_grad` false, grad_input is left empty.
ConvGrads conv2d_backward(const Tensor& input, std::span<const double> weights, const Tensor& grad_output,
                          std::size_t kernel, bool need_input_grad = true);

// ---------------------------------------------------------------------------
// 2x2 max pooling, stride 2. Output is floor(rows/2) x floor(cols/2): an odd
// trailing row or column never wins. Ties go to the first window element in
// row-major order.

struct PoolResult {
  Tensor output;
  std::vector<std::uint32_t> argmax;  // flat input index for each output element
};

PoolResult maxpool2x2_forward(const Tensor& input);
Tensor maxpool2x2_backward(const Tensor& grad_output, std::span<const std::uint32_t> argmax,
                           std::size_t in_rows, std::size_t in_cols, std::size_t channels);

// ---------------------------------------------------------------------------
// Dense: y = W x + b, W laid out [out][in].

std::vector<double> dense_forward(std::span<const double> x, std::span<const double> weights,
                                  std::span<const double> bias, std::size_t out);

struct DenseGrads {
  std::vector<double> grad_input;
  std::vector<double> grad_weights;
  std::vector<double> grad_bias;
};

DenseGrads dense_backward(std::span<const double> x, std::span<const double> weights,
                          std::span<const double> grad_output);

Tensor flatten_forward(const Tensor& input);
Tensor flatten_backward(const Tensor& grad_output, std::size_t rows, std::size_t cols, std::size_t channels);

// ---------------------------------------------------------------------------
// Loss

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad_logits;  // softmax(logits) - onehot(label)
  std::vector<double> probabilities;
};

/// Max-subtracted softmax followed by -log p[label].
LossResult softmax_cross_entropy(std::span<const double> logits, int label);

// ---------------------------------------------------------------------------
// Layer objects

/// Trainable array with its gradient accumulator and Adam moments.
struct ParamBlock {
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<double> m;
  std::vector<double> v;

  explicit ParamBlock(std::size_t n = 0) : value(n, 0.0), grad(n, 0.0), m(n, 0.0), v(n, 0.0) {}
  std::size_t size() const { return value.size(); }
};

enum class LayerKind : std::uint8_t { kConv = 1, kMaxPool = 2, kFlatten = 3, kDense = 4 };
enum class Activation : std::uint8_t { kIdentity = 0, kSwish = 1 };

struct Shape {
  std::size_t rows = 0, cols = 0, channels = 0;
  std::size_t size() const { return rows * cols * channels; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Serializable description of one layer.
struct LayerSpec {
  LayerKind kind = LayerKind::kConv;
  std::size_t kernel = 3;
  std::size_t in = 0;   // channels (conv) or features (dense)
  std::size_t out = 0;
  Activation activation = Activation::kSwish;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerSpec spec() const = 0;
  /// Throws kContract if `in` does not compose with this layer.
  virtual Shape output_shape(const Shape& in) const = 0;
  /// Caches what backward() needs.
  virtual Tensor forward(const Tensor& input) = 0;
  /// Accumulates parameter gradients and returns dL/d(input) (empty when
  /// `need_input_grad` is false).
  virtual Tensor backward(const Tensor& grad_output, bool need_input_grad) = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;

  virtual std::span<ParamBlock> params() { return {}; }
  virtual std::span<const ParamBlock> params() const { return {}; }
  std::size_t param_count() const;

  bool frozen() const { return frozen_; }
  void set_frozen(bool f) { frozen_ = f; }

 private:
  bool frozen_ = false;
};

/// Creates a layer from its spec with parameters drawn uniformly from
/// +/- sqrt(6 / (fan_in + fan_out)) using `rng_state` (biases start at 0).
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, std::uint64_t& rng_state);

}  // namespace hopfrc::readout
