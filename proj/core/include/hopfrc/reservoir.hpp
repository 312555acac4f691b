#pragma once

#include <numbers>
#include <optional>

#include "hopfrc/audio.hpp"
#include "hopfrc/grid.hpp"

namespace hopfrc::reservoir {

/// Parameters of the audio-driven Hopf oscillator
///
///   x' = (mu f - (x^2 + y^2)) x - omega0 y + A f sin(omega_f t)
///   y' = (mu f - (x^2 + y^2)) y + omega0 x
///
/// with A = amp * amp_scale and drive f = 1 + a(t). The defaults keep
/// A / mu^1.5 = 1 (the mu = 1, A = 1 oscillator after rescaling x by sqrt(mu)
/// and t by mu) while making the radial relaxation rate 2 mu fast enough to
/// follow 4 kHz audio.
struct HopfParams {
  double mu = 1000.0;
  double omega0 = 2.0 * std::numbers::pi * 1000.0;
  double amp = 31622.776601683792;  // 1000^1.5
  double omega_f = 2.0 * std::numbers::pi * 1000.0;
  double amp_scale = 1.0;

  double forcing_amplitude() const { return amp * amp_scale; }
  /// Throws kContract unless mu, omega0, omega_f, amp_scale > 0 and amp >= 0.
  void validate() const;
};

struct OscState {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  double radius() const;
};

struct Derivative {
  double dx = 0.0;
  double dy = 0.0;
};

struct IntegratorConfig {
  int substeps = 4;     // RK4 steps between consecutive emitted outputs
  int n_virtual = 100;  // outputs per held audio sample

  void validate() const;
};

struct ReservoirConfig {
  HopfParams hopf;
  IntegratorConfig integrator;
  double washout_s = 0.05;  // f = 1 drive before each clip, discarded
  int audio_rate = audio::kReservoirRate;

  void validate() const;
  /// RK4 step length: 1 / (audio_rate * n_virtual * substeps).
  double step() const;
};

/// x-state samples: one row per audio sample, one column per virtual node.
struct ReservoirResponse {
  Grid matrix;
  int audio_rate = audio::kReservoirRate;
  HopfParams params_used;
};

/// Right-hand side of the driven oscillator. Throws kNumericDomain on
/// non-finite state or drive.
Derivative hopf_derivative(const OscState& s, const HopfParams& p, double drive);

/// f = 1 + a. Throws kNormalization when |a| > 1 (or a is not finite).
double drive_signal(double audio_sample);

/// One classical RK4 step with the drive held constant. The caller may pass
/// the end time explicitly (`t_end`) so long runs do not accumulate t += h
/// rounding. Throws DivergenceError if the new state is not finite.
OscState rk4_step(const OscState& s, double h, const HopfParams& p, double drive,
                  std::optional<double> t_end = std::nullopt);

/// Simulates the oscillator over a normalized clip. State starts at
/// (sqrt(mu), 0), runs `washout_s` seconds at f = 1, then each audio sample
/// is held for 1 / audio_rate seconds while n_virtual x-values are emitted at
/// the ends of equal sub-intervals. Deterministic; state is not shared
/// between calls.
ReservoirResponse run_reservoir(const audio::AudioClip& clip, const ReservoirConfig& cfg);

struct LimitCycleEstimate {
  double radius = 0.0;     // mean radius over the second half of the run
  double frequency = 0.0;  // Hz, from mean spacing of upward zero crossings of x
};

/// Integrates the unforced oscillator (A must be 0, f = 1) for `duration`
/// seconds from `initial` (default: on the analytic cycle, (sqrt(mu), 0)).
/// Requires duration to cover at least 20 periods of omega0.
LimitCycleEstimate estimate_limit_cycle(const HopfParams& p, double duration,
                                        std::optional<OscState> initial = std::nullopt,
                                        int steps_per_period = 200);

}  // namespace hopfrc::reservoir
