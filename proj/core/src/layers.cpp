#include "hopfrc/layers.hpp"

#include <algorithm>
#include <cmath>

#include "hopfrc/error.hpp"
#include "hopfrc/rng.hpp"

namespace hopfrc::readout {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double swish(double x) { return x * sigmoid(x); }

double swish_grad(double x) {
  const double s = sigmoid(x);
  return s + x * s * (1.0 - s);
}

// ---------------------------------------------------------------------------

Tensor conv2d_forward(const Tensor& input, std::span<const double> weights, std::span<const double> bias,
                      std::size_t kernel, std::size_t out_channels) {
  require(kernel % 2 == 1, "conv2d_forward: kernel must be odd");
  const std::size_t rows = input.rows(), cols = input.cols(), in_ch = input.channels();
  require(weights.size() == kernel * kernel * in_ch * out_channels,
          "conv2d_forward: weight count does not match kernel/in/out channels for input " + input.shape_string());
  require(bias.size() == out_channels, "conv2d_forward: bias count must equal out channels");
  const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);

  Tensor out(rows, cols, out_channels);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double* o = out.ptr(r, c);
      std::copy(bias.begin(), bias.end(), o);
      for (std::size_t kr = 0; kr < kernel; ++kr) {
        const std::ptrdiff_t ir = static_cast<std::ptrdiff_t>(r + kr) - pad;
        if (ir < 0 || ir >= static_cast<std::ptrdiff_t>(rows)) continue;
        for (std::size_t kc = 0; kc < kernel; ++kc) {
          const std::ptrdiff_t ic = static_cast<std::ptrdiff_t>(c + kc) - pad;
          if (ic < 0 || ic >= static_cast<std::ptrdiff_t>(cols)) continue;
          const double* x = input.ptr(static_cast<std::size_t>(ir), static_cast<std::size_t>(ic));
          const double* w = weights.data() + (kr * kernel + kc) * in_ch * out_channels;
          for (std::size_t ci = 0; ci < in_ch; ++ci) {
            const double xv = x[ci];
            const double* wr = w + ci * out_channels;
            for (std::size_t co = 0; co < out_channels; ++co) o[co] += xv * wr[co];
          }
        }
      }
    }
  }
  return out;
}

ConvGrads conv2d_backward(const Tensor& input, std::span<const double> weights, const Tensor& grad_output,
                          std::size_t kernel, bool need_input_grad) {
  const std::size_t rows = input.rows(), cols = input.cols(), in_ch = input.channels();
  const std::size_t out_ch = grad_output.channels();
  require(grad_output.rows() == rows && grad_output.cols() == cols,
          "conv2d_backward: grad_output " + grad_output.shape_string() + " does not match input " +
              input.shape_string());
  require(weights.size() == kernel * kernel * in_ch * out_ch, "conv2d_backward: weight count mismatch");
  const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);

  ConvGrads g;
  g.grad_weights.assign(weights.size(), 0.0);
  g.grad_bias.assign(out_ch, 0.0);
  if (need_input_grad) g.grad_input = Tensor(rows, cols, in_ch);

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double* go = grad_output.ptr(r, c);
      for (std::size_t co = 0; co < out_ch; ++co) g.grad_bias[co] += go[co];
      for (std::size_t kr = 0; kr < kernel; ++kr) {
        const std::ptrdiff_t ir = static_cast<std::ptrdiff_t>(r + kr) - pad;
        if (ir < 0 || ir >= static_cast<std::ptrdiff_t>(rows)) continue;
        for (std::size_t kc = 0; kc < kernel; ++kc) {
          const std::ptrdiff_t ic = static_cast<std::ptrdiff_t>(c + kc) - pad;
          if (ic < 0 || ic >= static_cast<std::ptrdiff_t>(cols)) continue;
          const auto iru = static_cast<std::size_t>(ir), icu = static_cast<std::size_t>(ic);
          const double* x = input.ptr(iru, icu);
          const std::size_t woff = (kr * kernel + kc) * in_ch * out_ch;
          double* gw = g.grad_weights.data() + woff;
          const double* w = weights.data() + woff;
          double* gi = need_input_grad ? &g.grad_input.at(iru, icu, 0) : nullptr;
          for (std::size_t ci = 0; ci < in_ch; ++ci) {
            const double xv = x[ci];
            double* gwr = gw + ci * out_ch;
            for (std::size_t co = 0; co < out_ch; ++co) gwr[co] += xv * go[co];
            if (gi) {
              const double* wr = w + ci * out_ch;
              double acc = 0.0;
              for (std::size_t co = 0; co < out_ch; ++co) acc += wr[co] * go[co];
              gi[ci] += acc;
            }
          }
        }
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

PoolResult maxpool2x2_forward(const Tensor& input) {
  const std::size_t rows = input.rows() / 2, cols = input.cols() / 2, ch = input.channels();
  PoolResult res;
  res.output = Tensor(rows, cols, ch);
  res.argmax.resize(rows * cols * ch);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t k = 0; k < ch; ++k) {
        std::size_t best_idx = ((2 * r) * input.cols() + 2 * c) * ch + k;
        double best = input[best_idx];
        // Strict comparison keeps the first maximum in row-major order.
        for (std::size_t w = 1; w < 4; ++w) {
          const std::size_t idx = ((2 * r + w / 2) * input.cols() + (2 * c + w % 2)) * ch + k;
          if (input[idx] > best) {
            best = input[idx];
            best_idx = idx;
          }
        }
        const std::size_t o = (r * cols + c) * ch + k;
        res.output[o] = best;
        res.argmax[o] = static_cast<std::uint32_t>(best_idx);
      }
    }
  }
  return res;
}

Tensor maxpool2x2_backward(const Tensor& grad_output, std::span<const std::uint32_t> argmax, std::size_t in_rows,
                           std::size_t in_cols, std::size_t channels) {
  require(argmax.size() == grad_output.size(), "maxpool2x2_backward: mask size mismatch");
  Tensor g(in_rows, in_cols, channels);
  for (std::size_t o = 0; o < grad_output.size(); ++o) g[argmax[o]] += grad_output[o];
  return g;
}

// ---------------------------------------------------------------------------

std::vector<double> dense_forward(std::span<const double> x, std::span<const double> weights,
                                  std::span<const double> bias, std::size_t out) {
  require(bias.size() == out && weights.size() == out * x.size(),
          "dense_forward: expected " + std::to_string(out) + "x" + std::to_string(x.size()) + " weights");
  std::vector<double> y(out);
  const std::size_t in = x.size();
  for (std::size_t o = 0; o < out; ++o) {
    const double* w = weights.data() + o * in;
    double acc = bias[o];
    for (std::size_t i = 0; i < in; ++i) acc += w[i] * x[i];
    y[o] = acc;
  }
  return y;
}

DenseGrads dense_backward(std::span<const double> x, std::span<const double> weights,
                          std::span<const double> grad_output) {
  const std::size_t in = x.size(), out = grad_output.size();
  require(weights.size() == in * out, "dense_backward: weight count mismatch");
  DenseGrads g;
  g.grad_input.assign(in, 0.0);
  g.grad_weights.assign(in * out, 0.0);
  g.grad_bias.assign(grad_output.begin(), grad_output.end());
  for (std::size_t o = 0; o < out; ++o) {
    const double go = grad_output[o];
    const double* w = weights.data() + o * in;
    double* gw = g.grad_weights.data() + o * in;
    for (std::size_t i = 0; i < in; ++i) {
      gw[i] = go * x[i];
      g.grad_input[i] += go * w[i];
    }
  }
  return g;
}

Tensor flatten_forward(const Tensor& input) { return input.reshaped(1, 1, input.size()); }

Tensor flatten_backward(const Tensor& grad_output, std::size_t rows, std::size_t cols, std::size_t channels) {
  return grad_output.reshaped(rows, cols, channels);
}

// ---------------------------------------------------------------------------

LossResult softmax_cross_entropy(std::span<const double> logits, int label) {
  require(!logits.empty(), "softmax_cross_entropy: empty logits");
  require(label >= 0 && static_cast<std::size_t>(label) < logits.size(),
          "softmax_cross_entropy: label " + std::to_string(label) + " outside [0, " +
              std::to_string(logits.size()) + ")");
  const double peak = *std::max_element(logits.begin(), logits.end());
  LossResult r;
  r.probabilities.resize(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    r.probabilities[i] = std::exp(logits[i] - peak);
    sum += r.probabilities[i];
  }
  for (double& p : r.probabilities) p /= sum;
  const auto y = static_cast<std::size_t>(label);
  r.loss = -(logits[y] - peak - std::log(sum));
  r.grad_logits = r.probabilities;
  r.grad_logits[y] -= 1.0;
  return r;
}

// ---------------------------------------------------------------------------

std::string to_string(const Shape& s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols) + "x" + std::to_string(s.channels);
}

std::size_t Layer::param_count() const {
  std::size_t n = 0;
  for (const auto& p : params()) n += p.size();
  return n;
}

namespace {

void add_into(std::vector<double>& acc, const std::vector<double>& g) {
  for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
}

void init_uniform(ParamBlock& p, double limit, std::uint64_t& rng) {
  for (double& v : p.value) v = (2.0 * next_unit(rng) - 1.0) * limit;
}

class ConvLayer final : public Layer {
 public:
  ConvLayer(const LayerSpec& s, std::uint64_t& rng) : spec_(s), params_{ParamBlock(s.kernel * s.kernel * s.in * s.out), ParamBlock(s.out)} {
    require(s.kernel % 2 == 1 && s.in > 0 && s.out > 0, "ConvLayer: invalid spec");
    const double fan_in = static_cast<double>(s.kernel * s.kernel * s.in);
    const double fan_out = static_cast<double>(s.kernel * s.kernel * s.out);
    init_uniform(params_[0], std::sqrt(6.0 / (fan_in + fan_out)), rng);
  }

  LayerSpec spec() const override { return spec_; }
  Shape output_shape(const Shape& in) const override {
    require(in.channels == spec_.in, "ConvLayer: expects " + std::to_string(spec_.in) + " input channels, got " +
                                         to_string(in));
    return {in.rows, in.cols, spec_.out};
  }
  Tensor forward(const Tensor& input) override {
    output_shape({input.rows(), input.cols(), input.channels()});
    input_ = input;
    pre_ = conv2d_forward(input, params_[0].value, params_[1].value, spec_.kernel, spec_.out);
    Tensor y = pre_;
    if (spec_.activation == Activation::kSwish) {
      for (double& v : y.values()) v = swish(v);
    }
    return y;
  }
  Tensor backward(const Tensor& grad_output, bool need_input_grad) override {
    Tensor g = grad_output;
    if (spec_.activation == Activation::kSwish) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= swish_grad(pre_[i]);
    }
    ConvGrads cg = conv2d_backward(input_, params_[0].value, g, spec_.kernel, need_input_grad);
    if (!frozen()) {
      add_into(params_[0].grad, cg.grad_weights);
      add_into(params_[1].grad, cg.grad_bias);
    }
    return std::move(cg.grad_input);
  }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ConvLayer>(*this); }
  std::span<ParamBlock> params() override { return params_; }
  std::span<const ParamBlock> params() const override { return params_; }

 private:
  LayerSpec spec_;
  std::vector<ParamBlock> params_;
  Tensor input_, pre_;
};

class PoolLayer final : public Layer {
 public:
  LayerSpec spec() const override { return {LayerKind::kMaxPool, 2, 0, 0, Activation::kIdentity}; }
  Shape output_shape(const Shape& in) const override {
    require(in.rows >= 2 && in.cols >= 2, "PoolLayer: input " + to_string(in) + " too small for 2x2 pooling");
    return {in.rows / 2, in.cols / 2, in.channels};
  }
  Tensor forward(const Tensor& input) override {
    output_shape({input.rows(), input.cols(), input.channels()});
    in_shape_ = {input.rows(), input.cols(), input.channels()};
    PoolResult r = maxpool2x2_forward(input);
    argmax_ = std::move(r.argmax);
    return std::move(r.output);
  }
  Tensor backward(const Tensor& grad_output, bool need_input_grad) override {
    if (!need_input_grad) return {};
    return maxpool2x2_backward(grad_output, argmax_, in_shape_.rows, in_shape_.cols, in_shape_.channels);
  }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<PoolLayer>(*this); }

 private:
  Shape in_shape_;
  std::vector<std::uint32_t> argmax_;
};

class FlattenLayer final : public Layer {
 public:
  LayerSpec spec() const override { return {LayerKind::kFlatten, 0, 0, 0, Activation::kIdentity}; }
  Shape output_shape(const Shape& in) const override { return {1, 1, in.size()}; }
  Tensor forward(const Tensor& input) override {
    in_shape_ = {input.rows(), input.cols(), input.channels()};
    return flatten_forward(input);
  }
  Tensor backward(const Tensor& grad_output, bool need_input_grad) override {
    if (!need_input_grad) return {};
    return flatten_backward(grad_output, in_shape_.rows, in_shape_.cols, in_shape_.channels);
  }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<FlattenLayer>(*this); }

 private:
  Shape in_shape_;
};

class DenseLayer final : public Layer {
 public:
  DenseLayer(const LayerSpec& s, std::uint64_t& rng) : spec_(s), params_{ParamBlock(s.in * s.out), ParamBlock(s.out)} {
    require(s.in > 0 && s.out > 0, "DenseLayer: invalid spec");
    init_uniform(params_[0], std::sqrt(6.0 / static_cast<double>(s.in + s.out)), rng);
  }

  LayerSpec spec() const override { return spec_; }
  Shape output_shape(const Shape& in) const override {
    require(in.rows == 1 && in.cols == 1 && in.channels == spec_.in,
            "DenseLayer: expects flat input of " + std::to_string(spec_.in) + ", got " + to_string(in));
    return {1, 1, spec_.out};
  }
  Tensor forward(const Tensor& input) override {
    output_shape({input.rows(), input.cols(), input.channels()});
    input_ = input;
    pre_ = dense_forward(input.values(), params_[0].value, params_[1].value, spec_.out);
    std::vector<double> y = pre_;
    if (spec_.activation == Activation::kSwish) {
      for (double& v : y) v = swish(v);
    }
    return Tensor::from(1, 1, spec_.out, std::move(y));
  }
  Tensor backward(const Tensor& grad_output, bool need_input_grad) override {
    std::vector<double> g(grad_output.values().begin(), grad_output.values().end());
    if (spec_.activation == Activation::kSwish) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= swish_grad(pre_[i]);
    }
    DenseGrads dg = dense_backward(input_.values(), params_[0].value, g);
    if (!frozen()) {
      add_into(params_[0].grad, dg.grad_weights);
      add_into(params_[1].grad, dg.grad_bias);
    }
    if (!need_input_grad) return {};
    return Tensor::from(1, 1, spec_.in, std::move(dg.grad_input));
  }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<DenseLayer>(*this); }
  std::span<ParamBlock> params() override { return params_; }
  std::span<const ParamBlock> params() const override { return params_; }

 private:
  LayerSpec spec_;
  std::vector<ParamBlock> params_;
  Tensor input_;
  std::vector<double> pre_;
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, std::uint64_t& rng_state) {
  switch (spec.kind) {
    case LayerKind::kConv: return std::make_unique<ConvLayer>(spec, rng_state);
    case LayerKind::kMaxPool: return std::make_unique<PoolLayer>();
    case LayerKind::kFlatten: return std::make_unique<FlattenLayer>();
    case LayerKind::kDense: return std::make_unique<DenseLayer>(spec, rng_state);
  }
  fail(ErrorKind::kContract, "make_layer: unknown layer kind");
}

}  // namespace hopfrc::readout
