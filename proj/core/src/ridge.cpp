#include "hopfrc/ridge.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "hopfrc/error.hpp"

namespace hopfrc::readout {

std::vector<double> RidgeModel::scores(const Grid& map) const {
  require(map.data().size() == n_features, "ridge: map has " + std::to_string(map.data().size()) +
                                               " cells, model expects " + std::to_string(n_features));
  std::vector<double> s(bias);
  const auto x = map.data();
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double* w = weights.data() + c * n_features;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_features; ++j) acc += w[j] * x[j];
    s[c] += acc;
  }
  return s;
}

RidgeModel ridge_fit(const std::vector<Grid>& maps, const std::vector<int>& labels, std::size_t n_classes,
                     double lambda) {
  require(!maps.empty(), "ridge_fit: no training maps");
  require(maps.size() == labels.size(), "ridge_fit: maps and labels differ in length");
  require(n_classes >= 1, "ridge_fit: need at least one class");
  require(lambda > 0.0 && std::isfinite(lambda), "ridge_fit: lambda must be finite and > 0");
  const std::size_t n = maps.size();
  const std::size_t d = maps.front().data().size();
  for (std::size_t i = 0; i < n; ++i) {
    require(maps[i].rows() == maps.front().rows() && maps[i].cols() == maps.front().cols(),
            "ridge_fit: map " + std::to_string(i) + " has a different shape");
    require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < n_classes,
            "ridge_fit: label out of range at sample " + std::to_string(i));
  }

  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Mat X(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = maps[i].data();
    std::copy(v.begin(), v.end(), X.row(static_cast<Eigen::Index>(i)).data());
  }
  Mat Y = Mat::Zero(n, n_classes);
  for (std::size_t i = 0; i < n; ++i) Y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;

  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const Eigen::RowVectorXd y_mean = Y.colwise().mean();
  X.rowwise() -= x_mean;
  Y.rowwise() -= y_mean;

  // W^T = Xc^T (Xc Xc^T + lambda I)^-1 Yc
  Eigen::MatrixXd K = X * X.transpose();
  K.diagonal().array() += lambda;
  const Eigen::MatrixXd alpha = K.ldlt().solve(Eigen::MatrixXd(Y));
  const Eigen::MatrixXd Wt = X.transpose() * alpha;  // d x C
  if (!Wt.allFinite()) fail(ErrorKind::kNumericDomain, "ridge_fit: solve produced non-finite weights");

  RidgeModel m;
  m.n_features = d;
  m.n_classes = n_classes;
  m.weights.resize(n_classes * d);
  m.bias.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < d; ++j) m.weights[c * d + j] = Wt(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
    m.bias[c] = y_mean(static_cast<Eigen::Index>(c)) - x_mean.dot(Wt.col(static_cast<Eigen::Index>(c)));
  }
  return m;
}

int ridge_predict(const RidgeModel& model, const Grid& map) {
  const auto s = model.scores(map);
  return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
}

}  // namespace hopfrc::readout
