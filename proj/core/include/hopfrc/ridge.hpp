#pragma once

#include <vector>

#include "hopfrc/grid.hpp"

namespace hopfrc::readout {

/// One-vs-all linear readout on flattened maps: scores = W x + b.
struct RidgeModel {
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::vector<double> weights;  // n_classes x n_features, row-major
  std::vector<double> bias;     // n_classes

  std::vector<double> scores(const Grid& map) const;
};

/// Minimizes sum |y_i - W x_i - b|^2 + lambda |W|^2 with one-hot targets y_i;
/// the bias is unpenalized (handled by centering). Solved in the dual
/// (n_samples x n_samples) form. All maps must share one shape.
RidgeModel ridge_fit(const std::vector<Grid>& maps, const std::vector<int>& labels, std::size_t n_classes,
                     double lambda);

/// Index of the largest score; ties go to the lowest index.
int ridge_predict(const RidgeModel& model, const Grid& map);

}  // namespace hopfrc::readout
