// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sodkit/geometry.hpp"

using namespace sodkit;

TEST(Iou, IdenticalBoxes) { EXPECT_DOUBLE_EQ(iou(Box{0, 0, 10, 10}, Box{0, 0, 10, 10}), 1.0); }

TEST(Iou, TouchingCornerIsZero) { EXPECT_EQ(iou(Box{0, 0, 10, 10}, Box{10, 10, 20, 20}), 0.0); }

TEST(Iou, HalfShift) { EXPECT_DOUBLE_EQ(iou(Box{0, 0, 10, 10}, Box{5, 0, 15, 10}), 1.0 / 3.0); }

TEST(Iou, DegenerateBoxesGiveZero) {
  EXPECT_EQ(iou(Box{5, 5, 5, 5}, Box{5, 5, 5, 5}), 0.0);
  EXPECT_EQ(iou(Box{0, 0, 0, 10}, Box{0, 0, 10, 10}), 0.0);
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5000; ++t) {
    const auto a = oracle::random_box(rng), b = oracle::random_box(rng);
    const double ab = iou(a, b);
    EXPECT_EQ(ab, iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(Iou, OneOnlyForIdenticalBoxes) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 2000; ++t) {
    const auto a = oracle::random_box(rng);
    if (a.area() <= 0) continue;
    EXPECT_NEAR(iou(a, a), 1.0, 1e-9);
    auto b = a;
    b.x2 += 0.5;
    EXPECT_LT(iou(a, b), 1.0 - 1e-9);
  }
}

TEST(IouMatrix, DuplicatedProposal) {
  const std::vector<Box> g{{0, 0, 10, 10}};
  const std::vector<Box> p{{0, 0, 10, 10}, {0, 0, 10, 10}};
  const auto m = iou_matrix(g, p);
  ASSERT_EQ(m.rows(), 1u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_EQ(m(0, 0), 1.0);
  EXPECT_EQ(m(0, 1), 1.0);
}

TEST(IouMatrix, MatchesScalarLoop) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto g = oracle::random_boxes(rng, 5), p = oracle::random_boxes(rng, 7);
    const auto m = iou_matrix(g, p);
    const auto ref = oracle::iou_grid(g, p);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 7; ++j) {
        EXPECT_EQ(m(i, j), iou(g[i], p[j]));
        EXPECT_NEAR(m(i, j), ref[i][j], 1e-15);
      }
  }
}

TEST(IouMatrix, EmptyInputs) {
  const std::vector<Box> none;
  const std::vector<Box> p{{0, 0, 1, 1}, {1, 1, 2, 2}};
  const auto m = iou_matrix(none, p);
  EXPECT_EQ(m.rows(), 0u);
  EXPECT_EQ(m.cols(), 2u);
  EXPECT_TRUE(m.empty());
}

TEST(CenterSize, RoundTrip) {
  const Box b{1.5, 2.25, 9.75, 4.5};
  const auto c = to_center_size(b);
  EXPECT_EQ(c.cx, (1.5 + 9.75) / 2);
  EXPECT_EQ(c.w, 9.75 - 1.5);
  EXPECT_EQ(to_box(c), b);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> q(-4000, 4000);
  for (int t = 0; t < 1000; ++t) {
    // dyadic values round-trip exactly
    double v[4];
    for (double& x : v) x = q(rng) / 8.0;
    const Box r{std::min(v[0], v[1]), std::min(v[2], v[3]), std::max(v[0], v[1]), std::max(v[2], v[3])};
    EXPECT_EQ(to_box(to_center_size(r)), r);
  }
}

TEST(CenterSize, BoxMatrixColumns) {
  const std::vector<Box> boxes{{0, 0, 4, 2}, {10, 10, 12, 20}};
  const auto m = to_box_matrix(std::span<const Box>(boxes));
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[1], (CenterSize{11, 15, 2, 10}));
}

TEST(Validate, RejectsInvertedAndNonFinite) {
  EXPECT_THROW(validate(Box{2, 0, 1, 1}), ValidationError);
  EXPECT_THROW(validate(Box{0, 0, std::nan(""), 1}), ValidationError);
  EXPECT_NO_THROW(validate(Box{0, 0, 0, 0}));
}

TEST(Analytic, ShiftExamples) {
  EXPECT_DOUBLE_EQ(iou_under_shift(10, 0), 1.0);
  EXPECT_DOUBLE_EQ(iou_under_shift(10, 2), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(iou_under_shift(4, 2), 1.0 / 3.0);
  EXPECT_EQ(iou_under_shift(4, 5), 0.0);
  EXPECT_THROW(iou_under_shift(0, 1), ConfigError);
}

TEST(Analytic, ContainedExamples) {
  EXPECT_DOUBLE_EQ(iou_contained(8, 8), 1.0);
  EXPECT_DOUBLE_EQ(iou_contained(5, 10), 0.25);
  EXPECT_NEAR(iou_contained(3, 30), 0.01, 1e-15);
  EXPECT_THROW(iou_contained(11, 10), ConfigError);
}

TEST(Analytic, ShiftIncreasesWithSide) {
  for (double d : {0.5, 1.0, 2.0, 4.0}) {
    double prev = -1;
    for (double n = d + 0.25; n < 64; n += 0.25) {
      const double v = iou_under_shift(n, d);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}
