#pragma once

#include <cstdint>
#include <vector>

#include "hopfrc/grid.hpp"
#include "hopfrc/model.hpp"

namespace hopfrc::readout {

struct Sample {
  Tensor input;
  int label = 0;
};

/// Wraps a feature-map grid as a rows x cols x 1 tensor.
Tensor to_tensor(const Grid& grid);

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 5;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  bool shuffle = true;

  void validate() const;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean of batch-mean losses per epoch
};

/// Mini-batch training with Adam. Gradients are averaged over each batch and
/// the optimizer steps once per batch; epochs are shuffled from `cfg.seed`.
/// Layers that are frozen are skipped; when a whole prefix of the model is
/// frozen its outputs are computed once and reused. Throws DivergenceError on
/// a non-finite loss (message names the epoch and batch). `epochs == 0`
/// leaves the model untouched.
TrainResult train(ReadoutModel& model, const std::vector<Sample>& train_set, const TrainConfig& cfg);

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes = 0) : n_(n_classes), counts_(n_classes * n_classes, 0) {}

  void add(int truth, int predicted);
  std::size_t n_classes() const { return n_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * n_ + predicted]; }
  std::size_t total() const;
  std::size_t row_sum(std::size_t truth) const;
  std::size_t col_sum(std::size_t predicted) const;
  double accuracy() const;
  /// NaN-free: a class with no predictions (or no samples) reports 0.
  double precision(std::size_t c) const;
  double recall(std::size_t c) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

struct Evaluation {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::vector<int> predictions;
};

int predict(ReadoutModel& model, const Tensor& input);
Evaluation evaluate(ReadoutModel& model, const std::vector<Sample>& test_set);

struct ReconfigureResult {
  TrainResult history;
  std::size_t trainable_params = 0;
};

/// Freezes every layer before Flatten, reinitializes Flatten-onward layers
/// for `n_classes` outputs (from `cfg.seed`), and trains them.
ReconfigureResult freeze_and_retrain_head(ReadoutModel& model, std::size_t n_classes,
                                          const std::vector<Sample>& task_set, const TrainConfig& cfg);

/// Largest relative error |a - n| / max(|a| + |n|, floor) between analytic
/// parameter gradients and central differences (step `h`) of the loss on one
/// sample, over every parameter of every non-frozen layer.
double gradcheck(ReadoutModel& model, const Sample& sample, double h = 1e-5, double floor = 1e-6);

}  // namespace hopfrc::readout
