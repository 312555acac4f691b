#include "hopfrc/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hopfrc/error.hpp"
#include "hopfrc/rng.hpp"

namespace hopfrc::readout {

Tensor to_tensor(const Grid& grid) { return Tensor::from(grid.rows(), grid.cols(), 1, grid.data()); }

void TrainConfig::validate() const {
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "TrainConfig: learning rate must be > 0");
  require(batch_size >= 1, "TrainConfig: batch size must be >= 1");
}

TrainResult train(ReadoutModel& model, const std::vector<Sample>& train_set, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result;
  if (cfg.epochs == 0) return result;
  require(!train_set.empty(), "train: empty training set");
  const std::size_t n_classes = model.n_classes();
  for (const auto& s : train_set) {
    require(s.label >= 0 && static_cast<std::size_t>(s.label) < n_classes,
            "train: label " + std::to_string(s.label) + " outside model's " + std::to_string(n_classes) + " classes");
  }

  // Frozen prefix: evaluate it once per sample.
  const std::size_t start = model.first_trainable();
  require(start < model.layer_count(), "train: every layer is frozen");
  std::vector<Tensor> cached;
  if (start > 0) {
    cached.reserve(train_set.size());
    for (const auto& s : train_set) cached.push_back(model.forward_range(s.input, 0, start));
  }
  auto input_of = [&](std::size_t i) -> const Tensor& { return start > 0 ? cached[i] : train_set[i].input; };

  const AdamConfig adam{cfg.learning_rate};
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t rng = cfg.seed;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[static_cast<std::size_t>(next_below(rng, i + 1))]);
      }
    }
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
      const std::size_t b1 = std::min(order.size(), b0 + cfg.batch_size);
      model.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t k = b0; k < b1; ++k) {
        const std::size_t idx = order[k];
        const Tensor logits = model.forward_range(input_of(idx), start, model.layer_count());
        const LossResult lr = softmax_cross_entropy(logits.values(), train_set[idx].label);
        batch_loss += lr.loss;
        model.backward(Tensor::from(1, 1, lr.grad_logits.size(), lr.grad_logits), start);
      }
      const double inv = 1.0 / static_cast<double>(b1 - b0);
      batch_loss *= inv;
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                  std::to_string(batches),
                              static_cast<double>(epoch), static_cast<long>(batches));
      }
      model.scale_grads(inv);
      adam_step(model, adam);
      loss_sum += batch_loss;
      ++batches;
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(batches));
  }
  return result;
}

void ConfusionMatrix::add(int truth, int predicted) {
  require(truth >= 0 && predicted >= 0 && static_cast<std::size_t>(truth) < n_ &&
              static_cast<std::size_t>(predicted) < n_,
          "ConfusionMatrix::add: class index out of range");
  ++counts_[static_cast<std::size_t>(truth) * n_ + static_cast<std::size_t>(predicted)];
}

std::size_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < n_; ++p) s += at(truth, p);
  return s;
}

std::size_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::size_t s = 0;
  for (std::size_t t = 0; t < n_; ++t) s += at(t, predicted);
  return s;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t n = total();
  if (n == 0) return 0.0;
  std::size_t diag = 0;
  for (std::size_t c = 0; c < n_; ++c) diag += at(c, c);
  return static_cast<double>(diag) / static_cast<double>(n);
}

double ConfusionMatrix::precision(std::size_t c) const {
  const std::size_t col = col_sum(c);
  return col == 0 ? 0.0 : static_cast<double>(at(c, c)) / static_cast<double>(col);
}

double ConfusionMatrix::recall(std::size_t c) const {
  const std::size_t row = row_sum(c);
  return row == 0 ? 0.0 : static_cast<double>(at(c, c)) / static_cast<double>(row);
}

int predict(ReadoutModel& model, const Tensor& input) {
  const Tensor logits = model.forward(input);
  const auto v = logits.values();
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

Evaluation evaluate(ReadoutModel& model, const std::vector<Sample>& test_set) {
  Evaluation ev;
  ev.confusion = ConfusionMatrix(model.n_classes());
  for (const auto& s : test_set) {
    const int p = predict(model, s.input);
    ev.predictions.push_back(p);
    ev.confusion.add(s.label, p);
  }
  ev.accuracy = ev.confusion.accuracy();
  return ev;
}

ReconfigureResult freeze_and_retrain_head(ReadoutModel& model, std::size_t n_classes,
                                          const std::vector<Sample>& task_set, const TrainConfig& cfg) {
  model.freeze_feature_extractor();
  model.rebuild_head(n_classes, cfg.seed ^ 0xC0FFEEULL);
  // Fresh optimizer for the new head.
  model.adam_step = 0;
  ReconfigureResult r;
  r.trainable_params = model.trainable_param_count();
  r.history = train(model, task_set, cfg);
  return r;
}

double gradcheck(ReadoutModel& model, const Sample& sample, double h, double floor) {
  auto loss_at = [&]() {
    const Tensor logits = model.forward(sample.input);
    return softmax_cross_entropy(logits.values(), sample.label).loss;
  };

  model.zero_grads();
  {
    const Tensor logits = model.forward(sample.input);
    const LossResult lr = softmax_cross_entropy(logits.values(), sample.label);
    model.backward(Tensor::from(1, 1, lr.grad_logits.size(), lr.grad_logits));
  }

  double worst = 0.0;
  for (std::size_t li = 0; li < model.layer_count(); ++li) {
    Layer& layer = model.layer(li);
    if (layer.frozen()) continue;
    for (auto& p : layer.params()) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p.value[i];
        p.value[i] = saved + h;
        const double up = loss_at();
        p.value[i] = saved - h;
        const double down = loss_at();
        p.value[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = p.grad[i];
        const double denom = std::max(std::abs(analytic) + std::abs(numeric), floor);
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
      }
    }
  }
  model.zero_grads();
  return worst;
}

}  // namespace hopfrc::readout
