// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

// Small tour: score one GT against two proposals, assign a handful of tiny
// GTs on a real anchor set, and purify a random feature map.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "sodkit/assign.hpp"
#include "sodkit/freq.hpp"
#include "sodkit/priors.hpp"

int main() {
  using namespace sodkit;

  const std::vector<Box> gt{{0, 0, 10, 10}};
  const std::vector<Box> props{{0, 0, 10, 10}, {20, 20, 30, 30}};
  const auto s = mcla_scores(gt, props);
  std::printf("mcla scores: %.4f %.4f\n", s(0, 0), s(0, 1));

  const auto priors = generate_priors(two_stage_spec(256, 256));
  const std::vector<Box> tiny{{40, 40, 48, 48}, {100, 90, 114, 110}, {200, 10, 230, 34}};
  const auto maxiou = two_stage_maxiou(tiny, priors.boxes);
  AssignConfig loose{0.5, 0.5, false, 0.5};
  const auto mcla = mcla_assign(tiny, priors.boxes, {}, loose);
  std::printf("%zu anchors; positives maxiou=%zu mcla=%zu\n", priors.boxes.size(),
              maxiou.num_positive(), mcla.num_positive());

  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  FeatureTensor x(32, 32, 4);
  for (auto& v : x.data()) v = nd(rng);
  const auto y = hfp_purify(x, 0);
  double diff = 0;
  for (std::size_t i = 0; i < x.data().size(); ++i) diff = std::max(diff, std::abs(y.data()[i] - x.data()[i]));
  std::printf("hfp_purify level 0: max |y - x| = %.4f\n", diff);
  return 0;
}
