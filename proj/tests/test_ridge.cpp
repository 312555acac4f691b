#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hopfrc/error.hpp"
#include "hopfrc/ridge.hpp"

using namespace hopfrc;
using namespace hopfrc::readout;

namespace {

std::vector<Grid> random_maps(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Grid> maps;
  for (std::size_t i = 0; i < n; ++i) {
    Grid g(3, 2);
    for (double& v : g.data()) v = u(rng);
    maps.push_back(g);
  }
  return maps;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap(A[c], A[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

double residual(const RidgeModel& m, const std::vector<Grid>& maps, const std::vector<int>& labels) {
  double r = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto s = m.scores(maps[i]);
    for (std::size_t c = 0; c < s.size(); ++c) {
      const double y = labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
      r += (y - s[c]) * (y - s[c]);
    }
  }
  return r;
}

}  // namespace

TEST(Ridge, MatchesNormalEquations) {
  const auto maps = random_maps(10, 1);
  const std::vector<int> labels{0, 1, 2, 0, 1, 2, 0, 1, 2, 0};
  const double lambda = 0.3;
  const auto m = ridge_fit(maps, labels, 3, lambda);

  // Augmented primal problem: unknowns [w (6), b], bias unpenalized.
  const std::size_t d = 6;
  for (int c = 0; c < 3; ++c) {
    std::vector<std::vector<double>> A(d + 1, std::vector<double>(d + 1, 0.0));
    std::vector<double> rhs(d + 1, 0.0);
    for (std::size_t i = 0; i < maps.size(); ++i) {
      std::vector<double> x(maps[i].data());
      x.push_back(1.0);
      const double y = labels[i] == c ? 1.0 : 0.0;
      for (std::size_t a = 0; a <= d; ++a) {
        rhs[a] += x[a] * y;
        for (std::size_t b = 0; b <= d; ++b) A[a][b] += x[a] * x[b];
      }
    }
    for (std::size_t a = 0; a < d; ++a) A[a][a] += lambda;
    const auto w = solve(A, rhs);
    for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(m.weights[c * d + j], w[j], 1e-10) << c << "," << j;
    EXPECT_NEAR(m.bias[c], w[d], 1e-10);
  }
}

TEST(Ridge, HugeLambdaPredictsMajorityClass) {
  const auto maps = random_maps(8, 2);
  const std::vector<int> labels{1, 1, 1, 1, 1, 0, 2, 0};
  const auto m = ridge_fit(maps, labels, 3, 1e12);
  for (double w : m.weights) EXPECT_LT(std::abs(w), 1e-10);
  EXPECT_NEAR(m.bias[1], 5.0 / 8, 1e-9);
  for (const auto& g : random_maps(5, 3)) EXPECT_EQ(ridge_predict(m, g), 1);
}

TEST(Ridge, OrthogonalOneHotMapsRecoveredExactly) {
  Grid a(1, 2), b(1, 2);
  a(0, 0) = 1;
  b(0, 1) = 1;
  const auto m = ridge_fit({a, b}, {0, 1}, 2, 1e-6);
  const auto sa = m.scores(a), sb = m.scores(b);
  EXPECT_NEAR(sa[0], 1, 1e-5);
  EXPECT_NEAR(sa[1], 0, 1e-5);
  EXPECT_NEAR(sb[0], 0, 1e-5);
  EXPECT_NEAR(sb[1], 1, 1e-5);
  EXPECT_EQ(ridge_predict(m, a), 0);
  EXPECT_EQ(ridge_predict(m, b), 1);
}

TEST(Ridge, ResidualNoWorseThanZeroOrBiasOnlyModel) {
  const auto maps = random_maps(12, 4);
  const std::vector<int> labels{0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 1, 1};
  const auto m = ridge_fit(maps, labels, 2, 0.1);
  RidgeModel zero{6, 2, std::vector<double>(12, 0.0), {0.0, 0.0}};
  RidgeModel bias_only{6, 2, std::vector<double>(12, 0.0), {5.0 / 12, 7.0 / 12}};
  EXPECT_LE(residual(m, maps, labels), residual(zero, maps, labels));
  EXPECT_LE(residual(m, maps, labels), residual(bias_only, maps, labels));
}

TEST(Ridge, TiesGoToLowestIndex) {
  RidgeModel m{1, 3, {0, 0, 0}, {0.5, 0.5, 0.2}};
  EXPECT_EQ(ridge_predict(m, Grid(1, 1, 1.0)), 0);
}

TEST(Ridge, Preconditions) {
  const auto maps = random_maps(3, 5);
  EXPECT_THROW(ridge_fit({}, {}, 2, 1), Error);
  EXPECT_THROW(ridge_fit(maps, {0, 1}, 2, 1), Error);
  EXPECT_THROW(ridge_fit(maps, {0, 1, 2}, 2, 1), Error);
  EXPECT_THROW(ridge_fit(maps, {0, 1, 1}, 2, 0), Error);
  EXPECT_THROW(ridge_fit({Grid(1, 2), Grid(2, 1)}, {0, 1}, 2, 1), Error);
}
