#include "hopfrc/reservoir.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "hopfrc/error.hpp"

namespace hopfrc::reservoir {
namespace {

bool finite(double v) { return std::isfinite(v); }

// Unchecked right-hand side for the inner integration loop.
inline Derivative rhs(double x, double y, double t, double mu, double omega0, double amp,
                      double omega_f, double f) {
  const double radial = mu * f - (x * x + y * y);
  return {radial * x - omega0 * y + amp * f * std::sin(omega_f * t), radial * y + omega0 * x};
}

struct Stepper {
  double mu, omega0, amp, omega_f;

  // Advances (x, y) from t to t + h with drive f held constant.
  inline void step(double& x, double& y, double t, double h, double f) const {
    const double half = 0.5 * h;
    const Derivative k1 = rhs(x, y, t, mu, omega0, amp, omega_f, f);
    const Derivative k2 =
        rhs(x + half * k1.dx, y + half * k1.dy, t + half, mu, omega0, amp, omega_f, f);
    const Derivative k3 =
        rhs(x + half * k2.dx, y + half * k2.dy, t + half, mu, omega0, amp, omega_f, f);
    const Derivative k4 = rhs(x + h * k3.dx, y + h * k3.dy, t + h, mu, omega0, amp, omega_f, f);
    x += h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    y += h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
  }
};

Stepper make_stepper(const HopfParams& p) {
  return {p.mu, p.omega0, p.forcing_amplitude(), p.omega_f};
}

}  // namespace

void HopfParams::validate() const {
  require(mu > 0.0 && finite(mu), "HopfParams: mu must be > 0");
  require(omega0 > 0.0 && finite(omega0), "HopfParams: omega0 must be > 0");
  require(omega_f > 0.0 && finite(omega_f), "HopfParams: omega_f must be > 0");
  require(amp >= 0.0 && finite(amp), "HopfParams: amp must be >= 0");
  require(amp_scale > 0.0 && finite(amp_scale), "HopfParams: amp_scale must be > 0");
}

double OscState::radius() const { return std::hypot(x, y); }

void IntegratorConfig::validate() const {
  require(substeps >= 1, "IntegratorConfig: substeps must be >= 1");
  require(n_virtual >= 2, "IntegratorConfig: n_virtual must be >= 2");
}

void ReservoirConfig::validate() const {
  hopf.validate();
  integrator.validate();
  require(washout_s >= 0.0 && finite(washout_s), "ReservoirConfig: washout must be >= 0");
  require(audio_rate > 0, "ReservoirConfig: audio_rate must be > 0");
}

double ReservoirConfig::step() const {
  return 1.0 / (static_cast<double>(audio_rate) * integrator.n_virtual * integrator.substeps);
}

Derivative hopf_derivative(const OscState& s, const HopfParams& p, double drive) {
  if (!finite(s.x) || !finite(s.y) || !finite(s.t) || !finite(drive)) {
    fail(ErrorKind::kNumericDomain, "hopf_derivative: non-finite state or drive");
  }
  return rhs(s.x, s.y, s.t, p.mu, p.omega0, p.forcing_amplitude(), p.omega_f, drive);
}

double drive_signal(double audio_sample) {
  if (!(std::abs(audio_sample) <= 1.0)) {
    fail(ErrorKind::kNormalization,
         "drive_signal: audio sample " + std::to_string(audio_sample) + " outside [-1, 1]");
  }
  return 1.0 + audio_sample;
}

OscState rk4_step(const OscState& s, double h, const HopfParams& p, double drive,
                  std::optional<double> t_end) {
  require(h > 0.0 && finite(h), "rk4_step: step must be > 0");
  // Validates the inputs.
  (void)hopf_derivative(s, p, drive);
  OscState next = s;
  make_stepper(p).step(next.x, next.y, s.t, h, drive);
  next.t = t_end.value_or(s.t + h);
  if (!finite(next.x) || !finite(next.y)) {
    throw DivergenceError("rk4_step: non-finite state at t=" + std::to_string(next.t), next.t);
  }
  return next;
}

ReservoirResponse run_reservoir(const audio::AudioClip& clip, const ReservoirConfig& cfg) {
  cfg.validate();
  require(clip.rate == cfg.audio_rate, "run_reservoir: clip rate " + std::to_string(clip.rate) +
                                           " != reservoir rate " +
                                           std::to_string(cfg.audio_rate));
  const std::size_t n_samples = clip.samples.size();
  const auto n_virtual = static_cast<std::size_t>(cfg.integrator.n_virtual);
  const auto substeps = static_cast<std::size_t>(cfg.integrator.substeps);

  // Check the whole clip before spending time integrating.
  std::vector<double> drive(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) drive[i] = drive_signal(clip.samples[i]);

  ReservoirResponse out;
  out.audio_rate = cfg.audio_rate;
  out.params_used = cfg.hopf;
  out.matrix = Grid(n_samples, n_virtual);
  if (n_samples == 0) return out;

  const Stepper stepper = make_stepper(cfg.hopf);
  const double h = cfg.step();
  double x = std::sqrt(cfg.hopf.mu);
  double y = 0.0;

  // Time is recomputed from the global step index so it never drifts.
  const auto washout_steps = static_cast<std::uint64_t>(std::llround(cfg.washout_s / h));
  std::uint64_t n = 0;
  for (; n < washout_steps; ++n) stepper.step(x, y, static_cast<double>(n) * h, h, 1.0);
  if (!finite(x) || !finite(y)) {
    throw DivergenceError("run_reservoir: diverged during washout",
                          static_cast<double>(n) * h);
  }

  for (std::size_t i = 0; i < n_samples; ++i) {
    const double f = drive[i];
    auto row = out.matrix.row(i);
    for (std::size_t k = 0; k < n_virtual; ++k) {
      for (std::size_t j = 0; j < substeps; ++j, ++n) {
        stepper.step(x, y, static_cast<double>(n) * h, h, f);
      }
      row[k] = x;
    }
    if (!finite(x) || !finite(y)) {
      throw DivergenceError("run_reservoir: diverged at audio sample " + std::to_string(i),
                            static_cast<double>(n) * h, static_cast<long>(i));
    }
  }
  return out;
}

LimitCycleEstimate estimate_limit_cycle(const HopfParams& p, double duration,
                                        std::optional<OscState> initial, int steps_per_period) {
  p.validate();
  require(p.forcing_amplitude() == 0.0, "estimate_limit_cycle: requires unforced oscillator (A=0)");
  require(steps_per_period >= 8, "estimate_limit_cycle: steps_per_period must be >= 8");
  const double period = 2.0 * std::numbers::pi / p.omega0;
  require(duration >= 20.0 * period,
          "estimate_limit_cycle: duration must cover at least 20 periods");

  const double h = period / steps_per_period;
  const auto n_steps = static_cast<std::uint64_t>(std::ceil(duration / h));
  const std::uint64_t half = n_steps / 2;
  const Stepper stepper = make_stepper(p);

  OscState s = initial.value_or(OscState{std::sqrt(p.mu), 0.0, 0.0});
  double x = s.x, y = s.y;
  const double t0 = s.t;

  double radius_sum = 0.0;
  std::uint64_t radius_count = 0;
  double first_crossing = 0.0, last_crossing = 0.0;
  std::uint64_t crossings = 0;

  for (std::uint64_t n = 0; n < n_steps; ++n) {
    const double t = t0 + static_cast<double>(n) * h;
    const double x_prev = x;
    stepper.step(x, y, t, h, 1.0);
    if (!finite(x) || !finite(y)) {
      throw DivergenceError("estimate_limit_cycle: diverged", t + h);
    }
    if (n >= half) {
      radius_sum += std::hypot(x, y);
      ++radius_count;
      if (x_prev < 0.0 && x >= 0.0) {
        // Linear interpolation of the crossing instant inside the step.
        const double tc = t + h * (-x_prev) / (x - x_prev);
        if (crossings == 0) first_crossing = tc;
        last_crossing = tc;
        ++crossings;
      }
    }
  }

  LimitCycleEstimate est;
  est.radius = radius_sum / static_cast<double>(radius_count);
  require(crossings >= 2, "estimate_limit_cycle: too few zero crossings to estimate frequency");
  est.frequency = static_cast<double>(crossings - 1) / (last_crossing - first_crossing);
  return est;
}

}  // namespace hopfrc::reservoir
