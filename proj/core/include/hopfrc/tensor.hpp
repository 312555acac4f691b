#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hopfrc::readout {

/// rows x cols x channels, channel-fastest (HWC) layout. A flat vector is
/// represented as 1 x 1 x len.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, std::size_t channels, double fill = 0.0)
      : rows_(rows), cols_(cols), channels_(channels), data_(rows * cols * channels, fill) {}

  static Tensor flat(std::size_t len, double fill = 0.0) { return Tensor(1, 1, len, fill); }
  static Tensor from(std::size_t rows, std::size_t cols, std::size_t channels, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& at(std::size_t r, std::size_t c, std::size_t ch) { return data_[(r * cols_ + c) * channels_ + ch]; }
  double at(std::size_t r, std::size_t c, std::size_t ch) const {
    return data_[(r * cols_ + c) * channels_ + ch];
  }
  double* ptr(std::size_t r, std::size_t c, std::size_t ch = 0) { return &data_[(r * cols_ + c) * channels_ + ch]; }
  const double* ptr(std::size_t r, std::size_t c, std::size_t ch = 0) const {
    return &data_[(r * cols_ + c) * channels_ + ch];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  bool same_shape(const Tensor& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && channels_ == o.channels_;
  }
  /// Same data, new shape with equal element count.
  Tensor reshaped(std::size_t rows, std::size_t cols, std::size_t channels) const;
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

}  // namespace hopfrc::readout
