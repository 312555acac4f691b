#include "hopfrc/model.hpp"

#include <cmath>

#include "hopfrc/error.hpp"

namespace hopfrc::readout {

ReadoutModel::ReadoutModel(Shape input, const std::vector<LayerSpec>& specs, std::uint64_t seed) : input_(input) {
  require(input.size() > 0, "ReadoutModel: empty input shape");
  std::uint64_t rng = seed;
  for (const auto& s : specs) push(make_layer(s, rng));
}

ReadoutModel::ReadoutModel(const ReadoutModel& other) : adam_step(other.adam_step), input_(other.input_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

ReadoutModel& ReadoutModel::operator=(const ReadoutModel& other) {
  if (this != &other) {
    ReadoutModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void ReadoutModel::push(std::unique_ptr<Layer> layer) {
  const Shape in = layers_.empty() ? input_ : output_shape();
  (void)layer->output_shape(in);
  layers_.push_back(std::move(layer));
}

Shape ReadoutModel::output_shape() const {
  Shape s = input_;
  for (const auto& l : layers_) s = l->output_shape(s);
  return s;
}

std::vector<LayerSpec> ReadoutModel::specs() const {
  std::vector<LayerSpec> out;
  for (const auto& l : layers_) out.push_back(l->spec());
  return out;
}

Tensor ReadoutModel::forward(const Tensor& input) { return forward_range(input, 0, layers_.size()); }

Tensor ReadoutModel::forward_range(const Tensor& input, std::size_t first, std::size_t last) {
  require(first <= last && last <= layers_.size(), "ReadoutModel::forward_range: bad range");
  if (first == 0) {
    require(Shape{input.rows(), input.cols(), input.channels()} == input_,
            "ReadoutModel: input " + input.shape_string() + " does not match model input " + to_string(input_));
  }
  Tensor x = input;
  for (std::size_t i = first; i < last; ++i) x = layers_[i]->forward(x);
  return x;
}

void ReadoutModel::backward(const Tensor& grad_logits, std::size_t stop) {
  Tensor g = grad_logits;
  for (std::size_t i = layers_.size(); i-- > stop;) {
    g = layers_[i]->backward(g, i > stop);
  }
}

void ReadoutModel::zero_grads() {
  for (auto& l : layers_) {
    for (auto& p : l->params()) std::fill(p.grad.begin(), p.grad.end(), 0.0);
  }
}

void ReadoutModel::scale_grads(double factor) {
  for (auto& l : layers_) {
    for (auto& p : l->params()) {
      for (double& g : p.grad) g *= factor;
    }
  }
}

std::size_t ReadoutModel::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l->param_count();
  return n;
}

std::size_t ReadoutModel::trainable_param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    if (!l->frozen()) n += l->param_count();
  }
  return n;
}

std::size_t ReadoutModel::flatten_index() const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i]->spec().kind == LayerKind::kFlatten) return i;
  }
  return layers_.size();
}

std::size_t ReadoutModel::first_trainable() const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!layers_[i]->frozen() && layers_[i]->param_count() > 0) return i;
  }
  return layers_.size();
}

void ReadoutModel::freeze_feature_extractor() {
  const std::size_t f = flatten_index();
  require(f < layers_.size(), "freeze_feature_extractor: model has no Flatten layer");
  for (std::size_t i = 0; i < f; ++i) layers_[i]->set_frozen(true);
}

void ReadoutModel::rebuild_head(std::size_t n_classes, std::uint64_t seed) {
  require(n_classes >= 1, "rebuild_head: need at least one class");
  const std::size_t f = flatten_index();
  require(f < layers_.size(), "rebuild_head: model has no Flatten layer");
  std::vector<LayerSpec> head;
  for (std::size_t i = f; i < layers_.size(); ++i) head.push_back(layers_[i]->spec());
  require(head.size() >= 2 && head.back().kind == LayerKind::kDense, "rebuild_head: head must end in Dense");
  head.back().out = n_classes;

  layers_.resize(f);
  std::uint64_t rng = seed;
  for (const auto& s : head) push(make_layer(s, rng));
}

ReadoutModel build_default_model(std::size_t n_classes, std::uint64_t seed, const ArchitectureConfig& arch,
                                 Shape input) {
  require(n_classes >= 1, "build_default_model: need at least one class");
  require(arch.convs_per_block >= 1 && arch.hidden >= 1, "build_default_model: invalid architecture");
  std::vector<LayerSpec> specs;
  Shape s = input;
  for (std::size_t out_ch : arch.conv_channels) {
    for (std::size_t k = 0; k < arch.convs_per_block; ++k) {
      specs.push_back({LayerKind::kConv, arch.kernel, s.channels, out_ch, Activation::kSwish});
      s.channels = out_ch;
    }
    specs.push_back({LayerKind::kMaxPool, 2, 0, 0, Activation::kIdentity});
    require(s.rows >= 2 && s.cols >= 2, "build_default_model: too many pooling blocks for input " + to_string(input));
    s.rows /= 2;
    s.cols /= 2;
  }
  specs.push_back({LayerKind::kFlatten, 0, 0, 0, Activation::kIdentity});
  specs.push_back({LayerKind::kDense, 0, s.size(), arch.hidden, Activation::kSwish});
  specs.push_back({LayerKind::kDense, 0, arch.hidden, n_classes, Activation::kIdentity});
  return ReadoutModel(input, specs, seed);
}

std::size_t head_param_count(std::size_t flat_features, std::size_t hidden, std::size_t n_classes) {
  return flat_features * hidden + hidden + hidden * n_classes + n_classes;
}

void adam_update(ParamBlock& p, std::uint64_t t, const AdamConfig& cfg) {
  require(t >= 1, "adam_update: step must be >= 1");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double g = p.grad[i];
    p.m[i] = cfg.beta1 * p.m[i] + (1.0 - cfg.beta1) * g;
    p.v[i] = cfg.beta2 * p.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = p.m[i] / c1;
    const double v_hat = p.v[i] / c2;
    p.value[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void adam_step(ReadoutModel& model, const AdamConfig& cfg) {
  ++model.adam_step;
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    Layer& l = model.layer(i);
    if (l.frozen()) continue;
    for (auto& p : l.params()) adam_update(p, model.adam_step, cfg);
  }
}

}  // namespace hopfrc::readout
