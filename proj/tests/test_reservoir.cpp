#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hopfrc/error.hpp"
#include "hopfrc/reservoir.hpp"

using namespace hopfrc;
using namespace hopfrc::reservoir;

namespace {

constexpr double kPi = std::numbers::pi;

HopfParams params(double mu, double omega0, double amp, double omega_f) {
  HopfParams p;
  p.mu = mu;
  p.omega0 = omega0;
  p.amp = amp;
  p.omega_f = omega_f;
  return p;
}

// Integrates with rk4_step over [0, T] in n equal steps.
OscState integrate(OscState s, const HopfParams& p, double T, int n, double f = 1.0) {
  const double h = T / n;
  for (int i = 0; i < n; ++i) s = rk4_step(s, h, p, f, (i + 1) * h);
  return s;
}

}  // namespace

TEST(HopfDerivative, OriginIsFixedPoint) {
  const auto d = hopf_derivative({0, 0, 0}, params(1, 1, 0, 1), 1.0);
  EXPECT_EQ(d.dx, 0.0);
  EXPECT_EQ(d.dy, 0.0);
}

TEST(HopfDerivative, OnUnitCircleOnlyRotationRemains) {
  const auto d = hopf_derivative({1, 0, 0}, params(1, 1, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(d.dx, 0.0);
  EXPECT_DOUBLE_EQ(d.dy, 1.0);
}

TEST(HopfDerivative, ForcingAtQuarterPeriod) {
  const auto d = hopf_derivative({0, 0, kPi / 2}, params(1, 1, 2, 1), 1.0);
  EXPECT_NEAR(d.dx, 2.0, 1e-15);
  EXPECT_EQ(d.dy, 0.0);
}

TEST(HopfDerivative, ForcingScalesWithDrive) {
  // x' = (mu f - r^2) x - w y + A f sin(W t) by hand at (0.5, -0.25), t = 0.3
  const HopfParams p = params(2, 3, 0.7, 5);
  const double x = 0.5, y = -0.25, t = 0.3, f = 1.4;
  const double r2 = x * x + y * y;
  const auto d = hopf_derivative({x, y, t}, p, f);
  EXPECT_NEAR(d.dx, (2 * f - r2) * x - 3 * y + 0.7 * f * std::sin(5 * t), 1e-14);
  EXPECT_NEAR(d.dy, (2 * f - r2) * y + 3 * x, 1e-14);
}

TEST(HopfDerivative, NonFiniteStateRejected) {
  try {
    hopf_derivative({std::nan(""), 0, 0}, params(1, 1, 0, 1), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumericDomain);
  }
}

TEST(DriveSignal, OffsetsAudioByOne) {
  EXPECT_EQ(drive_signal(0.0), 1.0);
  EXPECT_EQ(drive_signal(-1.0), 0.0);
  EXPECT_EQ(drive_signal(0.25), 1.25);
  EXPECT_EQ(drive_signal(1.0), 2.0);
}

TEST(DriveSignal, OutOfRangeIsNormalizationError) {
  for (double a : {1.0001, -1.5, std::nan("")}) {
    try {
      drive_signal(a);
      FAIL() << a;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kNormalization);
    }
  }
}

TEST(Rk4, StaysOnLimitCycle) {
  const auto s = rk4_step({1, 0, 0}, 1e-4, params(1, 1, 0, 1), 1.0);
  EXPECT_LT(std::abs(s.radius() - 1.0), 1e-6);
}

TEST(Rk4, SingleStepMatchesHandRk4) {
  // Linear rotation (mu f = r^2 on the unit circle is not linear, so use
  // the classical tableau directly on the full right-hand side).
  const HopfParams p = params(1.5, 2.0, 0.3, 4.0);
  const OscState s{0.4, -0.2, 0.1};
  const double h = 0.05, f = 0.8;
  auto F = [&](double x, double y, double t) {
    const double r2 = x * x + y * y;
    return std::pair{(p.mu * f - r2) * x - p.omega0 * y + p.amp * f * std::sin(p.omega_f * t),
                     (p.mu * f - r2) * y + p.omega0 * x};
  };
  const auto [a1, b1] = F(s.x, s.y, s.t);
  const auto [a2, b2] = F(s.x + h / 2 * a1, s.y + h / 2 * b1, s.t + h / 2);
  const auto [a3, b3] = F(s.x + h / 2 * a2, s.y + h / 2 * b2, s.t + h / 2);
  const auto [a4, b4] = F(s.x + h * a3, s.y + h * b3, s.t + h);
  const auto n = rk4_step(s, h, p, f);
  EXPECT_NEAR(n.x, s.x + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4), 1e-15);
  EXPECT_NEAR(n.y, s.y + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4), 1e-15);
  EXPECT_DOUBLE_EQ(n.t, s.t + h);
}

TEST(Rk4, ConvergenceOrderIsFour) {
  const double w = 2 * kPi * 1000;
  const HopfParams p = params(1, w, 1, w);
  const double T = 1e-3;
  const int n0 = 32;
  const OscState start{1, 0, 0};
  const OscState ref = integrate(start, p, T, n0 * 64);
  auto err = [&](int n) {
    const auto s = integrate(start, p, T, n);
    return std::hypot(s.x - ref.x, s.y - ref.y);
  };
  const double e1 = err(n0), e2 = err(2 * n0), e4 = err(4 * n0);
  const double order1 = std::log2(e1 / e2), order2 = std::log2(e2 / e4);
  EXPECT_GE(order1, 3.7);
  EXPECT_LE(order1, 4.3);
  EXPECT_GE(order2, 3.7);
  EXPECT_LE(order2, 4.3);
}

TEST(Rk4, SmallStartIsAttractedToCycle) {
  const HopfParams p = params(1, 1, 0, 1);
  const auto s = integrate({0.01, 0, 0}, p, 50 * 2 * kPi, 50 * 200);
  EXPECT_NEAR(s.radius(), 1.0, 0.01);
}

TEST(Rk4, RejectsBadStep) {
  EXPECT_THROW(rk4_step({1, 0, 0}, 0.0, params(1, 1, 0, 1), 1.0), Error);
  EXPECT_THROW(rk4_step({1, 0, 0}, -1e-3, params(1, 1, 0, 1), 1.0), Error);
}

TEST(Rk4, BlowUpIsDivergence) {
  // A huge step on a large state sends the cubic term to infinity.
  try {
    OscState s{1e100, 1e100, 0};
    for (int i = 0; i < 10; ++i) s = rk4_step(s, 10.0, params(1, 1, 0, 1), 1.0);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivergence);
  }
}

struct CycleCase {
  double mu;
  double hz;
};

class LimitCycle : public ::testing::TestWithParam<CycleCase> {};

TEST_P(LimitCycle, RadiusAndFrequencyMatchAnalytic) {
  const auto [mu, hz] = GetParam();
  const auto est = estimate_limit_cycle(params(mu, 2 * kPi * hz, 0, 1), 50.0 / hz);
  EXPECT_NEAR(est.radius, std::sqrt(mu), 0.01 * std::sqrt(mu));
  EXPECT_NEAR(est.frequency, hz, 0.005 * hz);
}

INSTANTIATE_TEST_SUITE_P(Cases, LimitCycle,
                         ::testing::Values(CycleCase{1, 1000}, CycleCase{4, 500}, CycleCase{0.25, 2000}));

TEST(LimitCycleEstimate, OnCycleDriftIsTiny) {
  const auto est = estimate_limit_cycle(params(1, 2 * kPi * 1000, 0, 1), 20e-3);
  EXPECT_LT(std::abs(est.radius - 1.0), 1e-4);
}

TEST(LimitCycleEstimate, FromOffCycleStart) {
  const auto est = estimate_limit_cycle(params(1, 1, 0, 1), 100 * 2 * kPi, OscState{0.01, 0, 0});
  EXPECT_NEAR(est.radius, 1.0, 0.01);
}

TEST(LimitCycleEstimate, RejectsForcingAndShortRuns) {
  EXPECT_THROW(estimate_limit_cycle(params(1, 1, 1, 1), 1000), Error);
  EXPECT_THROW(estimate_limit_cycle(params(1, 2 * kPi, 0, 1), 5), Error);
}

TEST(RunReservoir, OneSecondGivesOneRowPerSample) {
  audio::AudioClip clip;
  clip.rate = 4000;
  for (int i = 0; i < 4000; ++i) clip.samples.push_back(0.5 * std::sin(2 * kPi * 300 * i / 4000.0));
  const auto resp = run_reservoir(clip, {});
  EXPECT_EQ(resp.matrix.rows(), 4000u);
  EXPECT_EQ(resp.matrix.cols(), 100u);
  EXPECT_EQ(resp.audio_rate, 4000);
  for (double v : resp.matrix.data()) ASSERT_TRUE(std::isfinite(v));
}

TEST(RunReservoir, EmptyClipGivesEmptyResponse) {
  audio::AudioClip clip;
  const auto resp = run_reservoir(clip, {});
  EXPECT_EQ(resp.matrix.rows(), 0u);
}

TEST(RunReservoir, SilentClipMatchesAutonomousTrace) {
  ReservoirConfig cfg;
  audio::AudioClip clip;
  clip.samples.assign(40, 0.0);
  const auto resp = run_reservoir(clip, cfg);

  // Same trajectory computed step by step.
  const double h = 1.0 / (4000.0 * 100 * 4);
  const long washout = std::lround(0.05 / h);
  OscState s{std::sqrt(cfg.hopf.mu), 0, 0};
  long n = 0;
  for (; n < washout; ++n) s = rk4_step(s, h, cfg.hopf, 1.0, (n + 1) * h);
  const double scale = std::sqrt(cfg.hopf.mu);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t k = 0; k < 100; ++k) {
      for (int j = 0; j < 4; ++j, ++n) s = rk4_step({s.x, s.y, n * h}, h, cfg.hopf, 1.0);
      ASSERT_NEAR(resp.matrix(i, k), s.x, 1e-9 * scale) << i << "," << k;
    }
  }
}

TEST(RunReservoir, SilentClipRowsArePeriodic) {
  // Forcing at 1 kHz, 4 audio samples per forcing period.
  ReservoirConfig cfg;
  audio::AudioClip clip;
  clip.samples.assign(400, 0.0);
  const auto resp = run_reservoir(clip, cfg);
  const double scale = resp.matrix.peak_abs();
  for (std::size_t i = 200; i + 4 < 400; ++i) {
    for (std::size_t k = 0; k < 100; ++k) {
      ASSERT_NEAR(resp.matrix(i, k), resp.matrix(i + 4, k), 1e-3 * scale) << i << "," << k;
    }
  }
}

TEST(RunReservoir, UnnormalizedAudioRejectedBeforeIntegrating) {
  audio::AudioClip clip;
  clip.samples = {0.1, 1.2};
  try {
    run_reservoir(clip, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNormalization);
  }
}

TEST(RunReservoir, RateMismatchIsContractError) {
  audio::AudioClip clip;
  clip.rate = 8000;
  clip.samples = {0.0};
  try {
    run_reservoir(clip, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kContract);
  }
}

TEST(RunReservoir, Deterministic) {
  audio::AudioClip clip;
  for (int i = 0; i < 100; ++i) clip.samples.push_back(std::sin(0.37 * i));
  EXPECT_EQ(run_reservoir(clip, {}).matrix, run_reservoir(clip, {}).matrix);
}

TEST(ReservoirConfig, StepLength) {
  ReservoirConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.step(), 1.0 / 1.6e6);
}

TEST(HopfParams, Validation) {
  EXPECT_THROW(params(0, 1, 0, 1).validate(), Error);
  EXPECT_THROW(params(1, -1, 0, 1).validate(), Error);
  EXPECT_THROW(params(1, 1, -1, 1).validate(), Error);
  EXPECT_NO_THROW(params(1, 1, 0, 1).validate());
}
