#include "hopfrc/grid.hpp"

#include <algorithm>
#include <cmath>

#include "hopfrc/error.hpp"

namespace hopfrc {

Grid Grid::slice_rows(std::size_t first, std::size_t count) const {
  require(first + count <= rows_, "Grid::slice_rows: range exceeds row count");
  Grid out(count, cols_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_), count * cols_,
              out.data_.begin());
  return out;
}

double Grid::min() const {
  require(!data_.empty(), "Grid::min on empty grid");
  return *std::min_element(data_.begin(), data_.end());
}

double Grid::max() const {
  require(!data_.empty(), "Grid::max on empty grid");
  return *std::max_element(data_.begin(), data_.end());
}

double Grid::peak_abs() const {
  double peak = 0.0;
  for (double v : data_) peak = std::max(peak, std::abs(v));
  return peak;
}

}  // namespace hopfrc
