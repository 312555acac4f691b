#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Small signal-processing helpers shared by the audio, synthesis and Mel code.
namespace hopfrc::dsp {

/// Blackman-windowed sinc low-pass, unit DC gain, odd tap count.
std::vector<double> lowpass_taps(double cutoff_hz, double rate, int taps = 127);

/// Band-pass as the difference of two low-passes (unit gain at band centre
/// for wide bands).
std::vector<double> bandpass_taps(double low_hz, double high_hz, double rate, int taps = 127);

/// Centered FIR filtering with zero padding; output sample o is the
/// filtered value at input index o * stride.
std::vector<double> fir_filter(std::span<const double> x, std::span<const double> taps,
                               std::size_t stride = 1);

/// |X[k]| for k = 0 .. n/2 of the length-n real DFT (direct evaluation).
std::vector<double> dft_magnitude(std::span<const double> x);

/// Precomputed direct real DFT for repeated transforms of one length.
class RealDft {
 public:
  explicit RealDft(std::size_t n);
  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }
  /// Power |X[k]|^2 for k = 0 .. n/2.
  void power(std::span<const double> x, std::span<double> out) const;

 private:
  std::size_t n_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace hopfrc::dsp
