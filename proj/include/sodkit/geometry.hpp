// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "sodkit/error.hpp"
#include "sodkit/matrix.hpp"

namespace sodkit {

/// Axis-aligned box in continuous pixel coordinates, corner form.
template <std::floating_point T>
struct BasicBox {
  T x1{}, y1{}, x2{}, y2{};

  constexpr T width() const noexcept { return x2 - x1; }
  constexpr T height() const noexcept { return y2 - y1; }
  constexpr T area() const noexcept { return width() * height(); }

  friend constexpr bool operator==(const BasicBox&, const BasicBox&) = default;
};

/// Center/extent form; one row of a box matrix, columns (cx, cy, w, h).
template <std::floating_point T>
struct BasicCenterSize {
  T cx{}, cy{}, w{}, h{};

  friend constexpr bool operator==(const BasicCenterSize&, const BasicCenterSize&) = default;
};

using Box = BasicBox<double>;
using CenterSize = BasicCenterSize<double>;
using BoxMatrix = std::vector<CenterSize>;

template <std::floating_point T>
constexpr bool is_valid(const BasicBox<T>& b) noexcept {
  return std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) &&
         std::isfinite(b.y2) && b.x2 >= b.x1 && b.y2 >= b.y1;
}

template <std::floating_point T>
void validate(const BasicBox<T>& b) {
  if (!is_valid(b)) {
    throw ValidationError("invalid box (" + std::to_string(b.x1) + ", " + std::to_string(b.y1) +
                          ", " + std::to_string(b.x2) + ", " + std::to_string(b.y2) + ")");
  }
}

template <std::floating_point T>
constexpr BasicCenterSize<T> to_center_size(const BasicBox<T>& b) noexcept {
  return {(b.x1 + b.x2) / 2, (b.y1 + b.y2) / 2, b.x2 - b.x1, b.y2 - b.y1};
}

template <std::floating_point T>
constexpr BasicBox<T> to_box(const BasicCenterSize<T>& c) noexcept {
  return {c.cx - c.w / 2, c.cy - c.h / 2, c.cx + c.w / 2, c.cy + c.h / 2};
}

template <std::floating_point T>
std::vector<BasicCenterSize<T>> to_box_matrix(std::span<const BasicBox<T>> boxes) {
  std::vector<BasicCenterSize<T>> rows;
  rows.reserve(boxes.size());
  for (const auto& b : boxes) rows.push_back(to_center_size(b));
  return rows;
}

/// Jaccard overlap of two boxes. Zero when the boxes are disjoint, touch only
/// along an edge, or when the union has zero area.
template <std::floating_point T>
constexpr T iou(const BasicBox<T>& a, const BasicBox<T>& b) noexcept {
  const T iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const T ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= T(0) || ih <= T(0)) return T(0);
  const T inter = iw * ih;
  const T uni = a.area() + b.area() - inter;
  if (uni <= T(0)) return T(0);
  return inter / uni;
}

/// m x n IoU matrix. An empty ground-truth or proposal set yields an empty
/// matrix that keeps the proposal count as its column count, so assigners
/// can label every proposal negative.
inline ScoreMatrix iou_matrix(std::span<const Box> gts, std::span<const Box> proposals) {
  ScoreMatrix out(gts.size(), proposals.size());
  for (std::size_t i = 0; i < gts.size(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < proposals.size(); ++j) row[j] = iou(gts[i], proposals[j]);
  }
  return out;
}

/// IoU of two side x side squares offset by `shift` along the x axis.
/// Evaluated through box construction; the closed form is (n - d) / (n + d).
inline double iou_under_shift(double side, double shift) {
  if (!(side > 0.0) || !(shift >= 0.0)) {
    throw ConfigError("iou_under_shift requires side > 0 and shift >= 0");
  }
  const Box a{0.0, 0.0, side, side};
  const Box b{shift, 0.0, shift + side, side};
  return iou(a, b);
}

/// IoU of an inner square centered inside an outer square.
/// Evaluated through box construction; the closed form is inner^2 / outer^2.
inline double iou_contained(double inner, double outer) {
  if (!(inner > 0.0) || !(inner <= outer)) {
    throw ConfigError("iou_contained requires 0 < inner <= outer");
  }
  const double off = (outer - inner) / 2.0;
  const Box g{0.0, 0.0, outer, outer};
  const Box p{off, off, off + inner, off + inner};
  return iou(p, g);
}

}  // namespace sodkit
