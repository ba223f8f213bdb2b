// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sodkit/error.hpp"
#include "sodkit/geometry.hpp"

namespace sodkit {

/// One pyramid level: anchors are tiled every `stride` pixels with the
/// Cartesian product of `scales` x `ratios` at each location.
struct PyramidLevel {
  int stride = 8;
  double base_size = 8.0;
  std::vector<double> scales{1.0};
  std::vector<double> ratios{1.0};

  std::size_t anchors_per_location() const noexcept { return scales.size() * ratios.size(); }
  friend bool operator==(const PyramidLevel&, const PyramidLevel&) = default;
};

struct PyramidSpec {
  int image_h = 0;
  int image_w = 0;
  std::vector<PyramidLevel> levels;

  friend bool operator==(const PyramidSpec&, const PyramidSpec&) = default;
};

struct PriorSet {
  std::vector<Box> boxes;
  std::vector<std::uint8_t> level_index;

  std::size_t size() const noexcept { return boxes.size(); }
};

inline void validate(const PyramidSpec& spec) {
  if (spec.image_h <= 0 || spec.image_w <= 0) {
    throw ConfigError("pyramid spec: image size must be positive, got " +
                      std::to_string(spec.image_h) + "x" + std::to_string(spec.image_w));
  }
  if (spec.levels.empty()) throw ConfigError("pyramid spec: at least one level is required");
  if (spec.levels.size() > 255) throw ConfigError("pyramid spec: at most 255 levels");
  int prev = 0;
  for (const auto& lvl : spec.levels) {
    if (lvl.stride <= prev) throw ConfigError("pyramid spec: strides must be strictly increasing");
    prev = lvl.stride;
    if (!(lvl.base_size > 0.0)) throw ConfigError("pyramid spec: base_size must be positive");
    if (lvl.scales.empty() || lvl.ratios.empty()) {
      throw ConfigError("pyramid spec: scales and ratios must be non-empty");
    }
    for (double s : lvl.scales)
      if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("pyramid spec: scales must be > 0");
    for (double r : lvl.ratios)
      if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("pyramid spec: ratios must be > 0");
  }
}

/// Number of anchors generate_priors() will emit for `spec`.
inline std::size_t prior_count(const PyramidSpec& spec) {
  std::size_t n = 0;
  for (const auto& lvl : spec.levels) {
    const std::size_t rows = (spec.image_h + lvl.stride - 1) / lvl.stride;
    const std::size_t cols = (spec.image_w + lvl.stride - 1) / lvl.stride;
    n += rows * cols * lvl.anchors_per_location();
  }
  return n;
}

/// Dense anchors centered at cell centers, unclipped. Order is level-major,
/// then row-major over locations, then scale-major over (scale, ratio).
inline PriorSet generate_priors(const PyramidSpec& spec) {
  validate(spec);
  PriorSet out;
  const std::size_t total = prior_count(spec);
  out.boxes.reserve(total);
  out.level_index.reserve(total);

  for (std::size_t l = 0; l < spec.levels.size(); ++l) {
    const auto& lvl = spec.levels[l];
    std::vector<std::pair<double, double>> shapes;  // (w, h) per anchor at one location
    shapes.reserve(lvl.anchors_per_location());
    for (double s : lvl.scales) {
      for (double r : lvl.ratios) {
        const double side = lvl.base_size * s;
        const double root = std::sqrt(r);
        shapes.emplace_back(side * root, side / root);
      }
    }
    const int rows = (spec.image_h + lvl.stride - 1) / lvl.stride;
    const int cols = (spec.image_w + lvl.stride - 1) / lvl.stride;
    for (int y = 0; y < rows; ++y) {
      const double cy = lvl.stride * (y + 0.5);
      for (int x = 0; x < cols; ++x) {
        const double cx = lvl.stride * (x + 0.5);
        for (const auto& [w, h] : shapes) {
          out.boxes.push_back(to_box(CenterSize{cx, cy, w, h}));
          out.level_index.push_back(static_cast<std::uint8_t>(l));
        }
      }
    }
  }
  return out;
}

/// Dense one-stage configuration: strides 8..128, base 4*stride,
/// three octave scales, ratios {0.5, 1, 2}.
inline PyramidSpec one_stage_spec(int image_h, int image_w) {
  PyramidSpec spec{image_h, image_w, {}};
  for (int stride : {8, 16, 32, 64, 128}) {
    spec.levels.push_back({stride,
                           4.0 * stride,
                           {1.0, std::pow(2.0, 1.0 / 3.0), std::pow(2.0, 2.0 / 3.0)},
                           {0.5, 1.0, 2.0}});
  }
  return spec;
}

/// Region-proposal configuration: strides 4..64, base = stride, scale 8,
/// ratios {0.5, 1, 2}.
inline PyramidSpec two_stage_spec(int image_h, int image_w) {
  PyramidSpec spec{image_h, image_w, {}};
  for (int stride : {4, 8, 16, 32, 64}) {
    spec.levels.push_back({stride, static_cast<double>(stride), {8.0}, {0.5, 1.0, 2.0}});
  }
  return spec;
}

}  // namespace sodkit
