#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "hopfrc/error.hpp"
#include "hopfrc/layers.hpp"

using namespace hopfrc;
using namespace hopfrc::readout;

namespace {

std::vector<double> randv(std::size_t n, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

Tensor rand_tensor(std::size_t r, std::size_t c, std::size_t ch, unsigned seed) {
  return Tensor::from(r, c, ch, randv(r * c * ch, seed));
}

// Direct cross-correlation with zero padding.
double naive_conv_at(const Tensor& in, const std::vector<double>& w, const std::vector<double>& b, std::size_t k,
                     std::size_t out_ch, std::size_t r, std::size_t c, std::size_t o) {
  const long pad = static_cast<long>(k / 2);
  double acc = b[o];
  for (std::size_t kr = 0; kr < k; ++kr) {
    for (std::size_t kc = 0; kc < k; ++kc) {
      const long rr = static_cast<long>(r + kr) - pad, cc = static_cast<long>(c + kc) - pad;
      if (rr < 0 || cc < 0 || rr >= static_cast<long>(in.rows()) || cc >= static_cast<long>(in.cols())) continue;
      for (std::size_t i = 0; i < in.channels(); ++i) {
        acc += in.at(rr, cc, i) * w[((kr * k + kc) * in.channels() + i) * out_ch + o];
      }
    }
  }
  return acc;
}

// Central difference of a scalar function of one coordinate of `x`.
double numeric_grad(std::vector<double>& x, std::size_t i, const std::function<double()>& f, double h = 1e-6) {
  const double keep = x[i];
  x[i] = keep + h;
  const double up = f();
  x[i] = keep - h;
  const double down = f();
  x[i] = keep;
  return (up - down) / (2 * h);
}

double rel_err(double a, double n) { return std::abs(a - n) / std::max(std::abs(a) + std::abs(n), 1e-8); }

// Weighted sum sum_i g_i y_i, whose gradient wrt y is g.
double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST(Swish, Values) {
  EXPECT_EQ(swish(0.0), 0.0);
  EXPECT_NEAR(swish(1.0), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(swish(1.0), 0.731058578630005, 1e-12);
  EXPECT_NEAR(sigmoid(-800.0), 0.0, 1e-300);
  EXPECT_TRUE(std::isfinite(swish(-800.0)));
}

TEST(Swish, GradientMatchesFiniteDifference) {
  for (double x : {-2.0, 0.5, 3.0}) {
    const double h = 1e-5;
    EXPECT_NEAR(swish_grad(x), (swish(x + h) - swish(x - h)) / (2 * h), 1e-8) << x;
  }
}

TEST(Conv, IdentityKernel) {
  const auto in = rand_tensor(4, 5, 1, 1);
  const auto out = conv2d_forward(in, std::vector<double>{1.0}, std::vector<double>{0.0}, 1, 1);
  EXPECT_EQ(out, in);
}

TEST(Conv, OnesKernelOnTwoByTwo) {
  const auto in = Tensor::from(2, 2, 1, {1, 2, 3, 4});
  const auto out = conv2d_forward(in, std::vector<double>(9, 1.0), std::vector<double>{0.0}, 3, 1);
  // Every 3x3 window centred on a 2x2 cell covers all four cells.
  EXPECT_EQ(out, Tensor::from(2, 2, 1, {10, 10, 10, 10}));
}

TEST(Conv, OnesKernelOnThreeByThree) {
  const auto in = Tensor::from(3, 3, 1, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto out = conv2d_forward(in, std::vector<double>(9, 1.0), std::vector<double>{0.5}, 3, 1);
  EXPECT_EQ(out, Tensor::from(3, 3, 1, {12.5, 21.5, 16.5, 27.5, 45.5, 33.5, 24.5, 39.5, 28.5}));
}

TEST(Conv, MatchesNaiveMultiChannel) {
  const std::size_t k = 3, out_ch = 4;
  const auto in = rand_tensor(6, 7, 3, 2);
  const auto w = randv(k * k * 3 * out_ch, 3), b = randv(out_ch, 4);
  const auto out = conv2d_forward(in, w, b, k, out_ch);
  ASSERT_EQ(out.rows(), 6u);
  ASSERT_EQ(out.cols(), 7u);
  ASSERT_EQ(out.channels(), out_ch);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 7; ++c)
      for (std::size_t o = 0; o < out_ch; ++o) EXPECT_NEAR(out.at(r, c, o), naive_conv_at(in, w, b, k, out_ch, r, c, o), 1e-13);
}

TEST(Conv, GradientsMatchFiniteDifferences) {
  const std::size_t k = 3, out_ch = 3;
  auto in = rand_tensor(6, 6, 2, 5);
  auto w = randv(k * k * 2 * out_ch, 6), b = randv(out_ch, 7);
  const auto g = randv(6 * 6 * out_ch, 8);
  auto loss = [&] { return dot(conv2d_forward(in, w, b, k, out_ch).values(), g); };
  const auto grads = conv2d_backward(in, w, Tensor::from(6, 6, out_ch, g), k);
  double worst = 0;
  for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, rel_err(grads.grad_weights[i], numeric_grad(w, i, loss)));
  for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, rel_err(grads.grad_bias[i], numeric_grad(b, i, loss)));
  for (std::size_t i = 0; i < in.size(); ++i) {
    worst = std::max(worst, rel_err(grads.grad_input[i], numeric_grad(in.storage(), i, loss)));
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Conv, InputGradSkippedOnRequest) {
  const auto in = rand_tensor(4, 4, 1, 1);
  const auto w = randv(9, 2);
  const auto grads = conv2d_backward(in, w, rand_tensor(4, 4, 1, 3), 3, false);
  EXPECT_EQ(grads.grad_input.size(), 0u);
  EXPECT_EQ(grads.grad_weights.size(), 9u);
}

TEST(Pool, PicksMaximum) {
  const auto r = maxpool2x2_forward(Tensor::from(2, 2, 1, {1, 2, 3, 4}));
  EXPECT_EQ(r.output, Tensor::from(1, 1, 1, {4}));
  EXPECT_EQ(r.argmax, (std::vector<std::uint32_t>{3}));
}

TEST(Pool, TiesGoToFirstElement) {
  const auto r = maxpool2x2_forward(Tensor(2, 2, 1, 7.0));
  EXPECT_EQ(r.argmax, (std::vector<std::uint32_t>{0}));
  const auto g = maxpool2x2_backward(Tensor::from(1, 1, 1, {1.5}), r.argmax, 2, 2, 1);
  EXPECT_EQ(g, Tensor::from(2, 2, 1, {1.5, 0, 0, 0}));
}

TEST(Pool, ShapesFloorOddDims) {
  EXPECT_EQ(maxpool2x2_forward(Tensor(200, 100, 1)).output.rows(), 100u);
  const auto odd = maxpool2x2_forward(Tensor(25, 13, 2));
  EXPECT_EQ(odd.output.rows(), 12u);
  EXPECT_EQ(odd.output.cols(), 6u);
  EXPECT_EQ(odd.output.channels(), 2u);
}

TEST(Pool, BackwardIsAdjointOfForwardSelection) {
  // <pool(x), g> == <x, pool_backward(g)> for the fixed selection.
  const auto x = rand_tensor(7, 6, 3, 9);
  const auto r = maxpool2x2_forward(x);
  const auto g = rand_tensor(r.output.rows(), r.output.cols(), 3, 10);
  const auto back = maxpool2x2_backward(g, r.argmax, 7, 6, 3);
  EXPECT_NEAR(dot(r.output.values(), g.values()), dot(x.values(), back.values()), 1e-12);
  // Independent oracle for the maximum.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t c = 0; c < 3; ++c) {
        const double m = std::max({x.at(2 * i, 2 * j, c), x.at(2 * i, 2 * j + 1, c), x.at(2 * i + 1, 2 * j, c),
                                   x.at(2 * i + 1, 2 * j + 1, c)});
        EXPECT_EQ(r.output.at(i, j, c), m);
      }
}

TEST(Dense, IdentityWeights) {
  const std::vector<double> x{1, -2, 3};
  std::vector<double> w(9, 0.0);
  for (int i = 0; i < 3; ++i) w[i * 3 + i] = 1;
  EXPECT_EQ(dense_forward(x, w, std::vector<double>(3, 0.0), 3), x);
}

TEST(Dense, GradientsMatchFiniteDifferences) {
  auto x = randv(10, 1), w = randv(70, 2), b = randv(7, 3);
  const auto g = randv(7, 4);
  auto loss = [&] { return dot(dense_forward(x, w, b, 7), g); };
  const auto grads = dense_backward(x, w, g);
  double worst = 0;
  for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, rel_err(grads.grad_weights[i], numeric_grad(w, i, loss)));
  for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, rel_err(grads.grad_bias[i], numeric_grad(b, i, loss)));
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, rel_err(grads.grad_input[i], numeric_grad(x, i, loss)));
  EXPECT_LT(worst, 1e-5);
}

TEST(Flatten, DefaultArchitectureWidth) {
  const auto t = rand_tensor(12, 6, 32, 5);
  const auto f = flatten_forward(t);
  EXPECT_EQ(f.size(), 2304u);
  EXPECT_EQ(f.rows(), 1u);
  EXPECT_EQ(flatten_backward(f, 12, 6, 32), t);
}

TEST(Softmax, UniformLogits) {
  for (int c : {2, 4, 10}) {
    const auto r = softmax_cross_entropy(std::vector<double>(c, 0.3), 1);
    EXPECT_NEAR(r.loss, std::log(c), 1e-14);
  }
}

TEST(Softmax, LargeLogitsStable) {
  const auto r = softmax_cross_entropy(std::vector<double>{1000, 0}, 0);
  EXPECT_TRUE(std::isfinite(r.loss));
  EXPECT_NEAR(r.loss, 0.0, 1e-300);
  const auto wrong = softmax_cross_entropy(std::vector<double>{1000, 0}, 1);
  EXPECT_NEAR(wrong.loss, 1000.0, 1e-9);
}

TEST(Softmax, GradientProperties) {
  const auto logits = randv(6, 11, 3.0);
  const auto r = softmax_cross_entropy(logits, 2);
  double sum = 0, psum = 0;
  for (double g : r.grad_logits) sum += g;
  for (double p : r.probabilities) psum += p;
  EXPECT_NEAR(sum, 0.0, 1e-15);
  EXPECT_NEAR(psum, 1.0, 1e-15);
  auto l = logits;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double n = numeric_grad(l, i, [&] { return softmax_cross_entropy(l, 2).loss; });
    EXPECT_NEAR(r.grad_logits[i], n, 1e-8);
  }
}

TEST(Softmax, LabelOutOfRange) {
  EXPECT_THROW(softmax_cross_entropy(std::vector<double>{0, 0}, 2), Error);
  EXPECT_THROW(softmax_cross_entropy(std::vector<double>{0, 0}, -1), Error);
}

TEST(MakeLayer, GlorotRangeAndZeroBias) {
  std::uint64_t state = 42;
  const auto conv = make_layer({LayerKind::kConv, 3, 4, 8, Activation::kSwish}, state);
  const double limit = std::sqrt(6.0 / (3 * 3 * 4 + 3 * 3 * 8));
  const auto params = std::as_const(*conv).params();
  ASSERT_EQ(params.size(), 2u);
  for (double v : params[0].value) ASSERT_LE(std::abs(v), limit);
  for (double v : params[1].value) ASSERT_EQ(v, 0.0);
  EXPECT_EQ(conv->param_count(), 3u * 3 * 4 * 8 + 8);
}
