#include "hopfrc/tensor.hpp"

#include "hopfrc/error.hpp"

namespace hopfrc::readout {

Tensor Tensor::from(std::size_t rows, std::size_t cols, std::size_t channels, std::vector<double> data) {
  require(data.size() == rows * cols * channels, "Tensor::from: data length does not match shape");
  Tensor t;
  t.rows_ = rows;
  t.cols_ = cols;
  t.channels_ = channels;
  t.data_ = std::move(data);
  return t;
}

Tensor Tensor::reshaped(std::size_t rows, std::size_t cols, std::size_t channels) const {
  require(rows * cols * channels == data_.size(),
          "Tensor::reshaped: " + shape_string() + " cannot become " + std::to_string(rows) + "x" +
              std::to_string(cols) + "x" + std::to_string(channels));
  return from(rows, cols, channels, data_);
}

std::string Tensor::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_) + "x" + std::to_string(channels_);
}

}  // namespace hopfrc::readout
