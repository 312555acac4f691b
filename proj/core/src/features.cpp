#include "hopfrc/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hopfrc/error.hpp"

namespace hopfrc::features {

void ActivationConfig::validate() const {
  require(clamp_margin > 0.0 && clamp_margin < 1.0, "ActivationConfig: clamp margin must be in (0, 1)");
}

Grid atanh_activate(const Grid& m, const ActivationConfig& cfg) {
  cfg.validate();
  for (double v : m.data()) {
    if (!std::isfinite(v)) fail(ErrorKind::kNumericDomain, "atanh_activate: non-finite entry");
  }
  const double peak = m.peak_abs();
  if (peak == 0.0) return m;
  Grid out = m;
  const double limit = 1.0 - cfg.clamp_margin;
  for (double& v : out.data()) {
    v /= peak;
    if (cfg.apply_atanh) v = std::atanh(std::clamp(v, -limit, limit));
  }
  return out;
}

Grid minmax_rescale(const Grid& m) {
  if (m.empty()) return m;
  const double lo = m.min();
  const double hi = m.max();
  Grid out = m;
  if (!(hi > lo)) {
    std::fill(out.data().begin(), out.data().end(), 0.5);
    return out;
  }
  const double inv = 1.0 / (hi - lo);
  for (double& v : out.data()) v = (v - lo) * inv;
  return out;
}

Grid decimate_rows(const Grid& m, std::size_t step) {
  require(step >= 1, "decimate_rows: step must be >= 1");
  const std::size_t rows = (m.rows() + step - 1) / step;
  Grid out(rows, m.cols());
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(m.row(r * step).begin(), m.row(r * step).end(), out.row(r).begin());
  }
  return out;
}

FeatureMap assemble_feature_map(const reservoir::ReservoirResponse& resp, const ActivationConfig& cfg,
                                const MapLayout& layout) {
  require(resp.matrix.rows() == layout.input_rows(),
          "assemble_feature_map: expected " + std::to_string(layout.input_rows()) + " response rows, got " +
              std::to_string(resp.matrix.rows()));
  FeatureMap map;
  map.kind = MapKind::kHopfVirtualNodes;
  map.grid = minmax_rescale(atanh_activate(decimate_rows(resp.matrix, layout.decimation), cfg));
  return map;
}

double euclidean_distance(const Grid& a, const Grid& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "euclidean_distance: shape mismatch " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
              " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double euclidean_distance(const FeatureMap& a, const FeatureMap& b) {
  return euclidean_distance(a.grid, b.grid);
}

double normalized_distance(const FeatureMap& a, const FeatureMap& b) {
  const double d = euclidean_distance(a, b);
  return a.grid.empty() ? 0.0 : d / std::sqrt(static_cast<double>(a.grid.size()));
}

std::vector<std::uint8_t> export_pgm(const FeatureMap& map) {
  const std::string header =
      "P5 " + std::to_string(map.grid.cols()) + " " + std::to_string(map.grid.rows()) + " 255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + map.grid.size());
  for (double v : map.grid.data()) {
    out.push_back(static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0))));
  }
  return out;
}

std::string to_csv(const Grid& grid) {
  std::string out;
  char buf[32];
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", grid(r, c));
      if (c) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace hopfrc::features
