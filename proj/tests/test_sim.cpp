// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "sodkit/coco.hpp"
#include "sodkit/sim.hpp"

using namespace sodkit;

namespace {

SimConfig small_config(int n_gts = 300, int trials = 2) {
  SimConfig cfg;
  cfg.n_gts = n_gts;
  cfg.trials = trials;
  return cfg;
}

double share(const SimReport& r, std::string_view assigner, std::initializer_list<const char*> bins) {
  double s = 0;
  for (const char* b : bins) s += r.assigner(assigner).bin(b).share_pct;
  return s;
}

}  // namespace

TEST(GtSize, Examples) {
  EXPECT_DOUBLE_EQ(gt_size(Box{0, 0, 12, 12}), 12.0);
  EXPECT_DOUBLE_EQ(gt_size(Box{0, 0, 9, 16}), 12.0);
  EXPECT_DOUBLE_EQ(gt_size(Box{0, 0, 64, 1}), 8.0);
}

TEST(SizeBins, LowerEdgeInclusive) {
  const SizeBins b;
  EXPECT_EQ(b.bin_of(0.0), 0u);
  EXPECT_EQ(b.bin_of(11.999), 0u);
  EXPECT_EQ(b.bin_of(12.0), 1u);
  EXPECT_EQ(b.bin_of(20.0), 2u);
  EXPECT_EQ(b.bin_of(32.0), 3u);
  EXPECT_EQ(b.bin_of(1e9), 3u);
  EXPECT_THROW(validate(SizeBins{{12, 12, 32}, {"a", "b", "c", "d"}}), ConfigError);
  EXPECT_THROW(validate(SizeBins{{12}, {"a"}}), ConfigError);
}

TEST(SampleGts, ConstraintsHold) {
  SimConfig cfg;
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    for (const auto& b : sample_gts(cfg, seed)) {
      EXPECT_LE(std::max(b.width(), b.height()), 64.0 + 1e-9);
      EXPECT_GE(b.x1, 0.0);
      EXPECT_GE(b.y1, 0.0);
      EXPECT_LE(b.x2, 800.0);
      EXPECT_LE(b.y2, 800.0);
      EXPECT_GT(b.width(), 0.0);
      const double a = b.width() / b.height();
      EXPECT_GE(a, 0.5 - 1e-9);
      EXPECT_LE(a, 2.0 + 1e-9);
    }
  }
}

TEST(SampleGts, Deterministic) {
  SimConfig cfg;
  EXPECT_EQ(sample_gts(cfg, 42), sample_gts(cfg, 42));
  EXPECT_NE(sample_gts(cfg, 42), sample_gts(cfg, 43));
}

TEST(SampleGts, MeanSizeMatchesUniformMean) {
  SimConfig cfg;
  cfg.n_gts = 100000;
  cfg.max_dim = 200;  // no shrinking, so sqrt(w*h) is the sampled size
  double sum = 0;
  for (const auto& b : sample_gts(cfg, 5)) sum += gt_size(b);
  const double mean = sum / cfg.n_gts;
  const double analytic = (cfg.size_lo + cfg.size_hi) / 2;
  EXPECT_NEAR(mean / analytic, 1.0, 0.01);
}

TEST(SampleGts, InfeasibleConfig) {
  SimConfig cfg;
  cfg.max_dim = 900;
  EXPECT_THROW(sample_gts(cfg, 0), ConfigError);
  cfg = SimConfig{};
  cfg.size_hi = 80;
  EXPECT_THROW(sample_gts(cfg, 0), ConfigError);
  cfg = SimConfig{};
  cfg.aspect_lo = 0;
  EXPECT_THROW(sample_gts(cfg, 0), ConfigError);
}

TEST(Simulation, AnchorExactGtIsPositiveEverywhere) {
  const Box gt{372, 372, 436, 436};  // a 64 px two-stage anchor at stride 8
  const auto two = generate_priors(two_stage_spec(800, 800));
  ASSERT_NE(std::find(two.boxes.begin(), two.boxes.end(), gt), two.boxes.end());
  for (const auto& a : default_sim_assigners()) {
    const auto priors = generate_priors(make_pyramid(a.priors, 800, 800));
    const std::vector<Box> gts{gt};
    EXPECT_GE(run_assigner(a.assigner, gts, priors.boxes).num_positive(), 1u) << a.name();
  }
}

TEST(Simulation, SharesSumToHundred) {
  const auto r = run_simulation(small_config());
  for (const auto& a : r.assigners) {
    double s = 0;
    std::int64_t p = 0;
    for (const auto& b : a.bins) {
      s += b.share_pct;
      p += b.positives;
      EXPECT_GE(b.positives, 0);
    }
    if (a.total_positives > 0) {
      EXPECT_NEAR(s, 100.0, 1e-9);
    }
    EXPECT_EQ(p, a.total_positives);
  }
}

TEST(Simulation, BitReproducibleAndJobInvariant) {
  const auto cfg = small_config(200, 2);
  const auto a = run_simulation(cfg, 1);
  EXPECT_EQ(run_simulation(cfg, 1), a);
  EXPECT_EQ(run_simulation(cfg, 3), a);
}

TEST(Simulation, MetadataRecordsSetup) {
  const auto r = run_simulation(small_config(50, 3));
  EXPECT_EQ(r.meta.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
  ASSERT_TRUE(r.meta.simulation.has_value());
  EXPECT_EQ(r.meta.simulation->n_gts, 50);
  EXPECT_FALSE(r.meta.priors_clipped);
  EXPECT_EQ(r.assigner("one_stage_maxiou").setup.priors, PriorScheme::one_stage);
  EXPECT_EQ(r.assigner("mcla").setup.priors, PriorScheme::two_stage);
  for (const auto& a : r.assigners) EXPECT_EQ(a.per_trial_positives.size(), 3u);
}

TEST(Simulation, MaxIouPositivesPerGtNonDecreasingOverBins) {
  auto cfg = small_config(2000, 2);
  cfg.assigners.pop_back();  // MaxIoU only
  const auto r = run_simulation(cfg);
  for (const auto& a : r.assigners) {
    for (std::size_t b = 1; b < a.bins.size(); ++b) {
      EXPECT_GE(a.bins[b].positives_per_gt, a.bins[b - 1].positives_per_gt)
          << a.name() << " bin " << a.bins[b].label;
    }
  }
}

TEST(Simulation, McLaSmallShareExceedsMaxIouOnEverySeed) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto cfg = small_config(500, 1);
    cfg.seed = seed;
    const auto r = run_simulation(cfg);
    const double mcla = share(r, "mcla", {"eS", "rS"});
    EXPECT_GT(mcla, share(r, "one_stage_maxiou", {"eS", "rS"})) << seed;
    EXPECT_GT(mcla, share(r, "two_stage_maxiou", {"eS", "rS"})) << seed;
  }
}

TEST(Simulation, AssignerSubset) {
  auto cfg = small_config(50, 1);
  cfg.assigners = {cfg.assigners[2]};
  const auto r = run_simulation(cfg);
  ASSERT_EQ(r.assigners.size(), 1u);
  EXPECT_EQ(r.assigners[0].name(), "mcla");
}

// --- dataset statistics --------------------------------------------------------------

namespace {

Dataset dataset_from(const std::vector<std::vector<Box>>& images, int h = 800, int w = 800) {
  Dataset ds;
  std::int64_t ann = 1;
  for (std::size_t i = 0; i < images.size(); ++i) {
    ds.images.push_back({static_cast<std::int64_t>(i + 1), w, h, "img" + std::to_string(i)});
    for (const auto& b : images[i]) ds.annotations.push_back({ann++, static_cast<std::int64_t>(i + 1), 1, b, false});
  }
  ds.categories.push_back({1, "object"});
  return ds;
}

}  // namespace

TEST(DatasetStats, ReproducesSimulationCounts) {
  const auto cfg = small_config(300, 2);
  const auto sim = run_simulation(cfg);
  const auto ds = dataset_from({sample_gts(cfg, 0), sample_gts(cfg, 1)});
  const auto st = dataset_assignment_stats(ds, {});
  ASSERT_EQ(st.assigners.size(), sim.assigners.size());
  for (std::size_t a = 0; a < sim.assigners.size(); ++a) {
    EXPECT_EQ(st.assigners[a].per_trial_positives, sim.assigners[a].per_trial_positives);
    EXPECT_EQ(st.assigners[a].total_positives, sim.assigners[a].total_positives);
    for (std::size_t b = 0; b < 4; ++b) {
      EXPECT_EQ(st.assigners[a].bins[b].gts, sim.assigners[a].bins[b].gts);
      EXPECT_EQ(st.assigners[a].bins[b].share_pct, sim.assigners[a].bins[b].share_pct);
    }
  }
  EXPECT_EQ(st.meta.source, "dataset");
  EXPECT_EQ(st.meta.images, 2);
}

TEST(DatasetStats, SingleAnchorExactGt) {
  const auto ds = dataset_from({{Box{372, 372, 436, 436}}});
  const auto st = dataset_assignment_stats(ds, {});
  for (const auto& a : st.assigners) EXPECT_GE(a.total_positives, 1) << a.name();
}

TEST(DatasetStats, AdditiveOverImages) {
  const auto gts = sample_gts(small_config(), 9);
  const auto one = dataset_assignment_stats(dataset_from({gts}, 800, 800), {});
  const auto two = dataset_assignment_stats(dataset_from({gts, gts}, 800, 800), {});
  for (std::size_t a = 0; a < one.assigners.size(); ++a) {
    EXPECT_EQ(two.assigners[a].total_positives, 2 * one.assigners[a].total_positives);
    for (std::size_t b = 0; b < 4; ++b) {
      EXPECT_EQ(two.assigners[a].bins[b].positives, 2 * one.assigners[a].bins[b].positives);
      EXPECT_EQ(two.assigners[a].bins[b].gts, 2 * one.assigners[a].bins[b].gts);
    }
  }
}

TEST(DatasetStats, EmptyImagesAndDataset) {
  const auto empty = dataset_assignment_stats(Dataset{}, {});
  for (const auto& a : empty.assigners) EXPECT_EQ(a.total_positives, 0);
  const auto blank = dataset_assignment_stats(dataset_from({{}, {}}, 300, 200), {});
  for (const auto& a : blank.assigners) {
    EXPECT_EQ(a.total_positives, 0);
    EXPECT_EQ(a.per_trial_positives.size(), 2u);
  }
}

TEST(DatasetStats, PerImageAnchorsFollowImageSize) {
  // a GT near the right edge of a wide image only matches anchors generated for that width
  const Box gt{1180, 20, 1212, 52};
  const auto st = dataset_assignment_stats(dataset_from({{gt}}, 100, 1220), {});
  EXPECT_GE(st.assigner("mcla").total_positives, 1);
}

TEST(DatasetStats, CustomLevels) {
  DatasetStatsConfig cfg;
  cfg.levels = std::vector<PyramidLevel>{{16, 16.0, {1.0}, {1.0}}};
  const auto st = dataset_assignment_stats(dataset_from({{Box{0, 0, 16, 16}}}, 64, 64), cfg);
  EXPECT_EQ(st.assigner("two_stage_maxiou").total_positives, 1);
}
