// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sodkit/assign.hpp"
#include "sodkit/error.hpp"
#include "sodkit/geometry.hpp"
#include "sodkit/priors.hpp"

namespace sodkit {

// ---------------------------------------------------------------------------
// Size bins

/// Lower-inclusive bins over the GT size sqrt(w*h). The defaults are the
/// small-object tiers 0-12 (eS), 12-20 (rS), 20-32 (gS), and everything above.
struct SizeBins {
  std::vector<double> edges{12.0, 20.0, 32.0};
  std::vector<std::string> labels{"eS", "rS", "gS", "larger"};

  std::size_t count() const noexcept { return labels.size(); }

  std::size_t bin_of(double size) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), size) -
                                    edges.begin());
  }
  double lower(std::size_t b) const noexcept { return b == 0 ? 0.0 : edges[b - 1]; }
  /// Upper edge, or `cap` for the open last bin.
  double upper(std::size_t b, double cap) const noexcept {
    return b < edges.size() ? edges[b] : cap;
  }
  friend bool operator==(const SizeBins&, const SizeBins&) = default;
};

inline void validate(const SizeBins& bins) {
  if (bins.labels.size() != bins.edges.size() + 1) {
    throw ConfigError("size bins need exactly one more label than edges");
  }
  for (std::size_t i = 0; i < bins.edges.size(); ++i) {
    if (!(bins.edges[i] > 0.0) || (i > 0 && !(bins.edges[i] > bins.edges[i - 1]))) {
      throw ConfigError("size bin edges must be positive and strictly increasing");
    }
  }
}

/// Binning key: geometric mean of the box extents.
inline double gt_size(const Box& b) noexcept { return std::sqrt(b.width() * b.height()); }

// ---------------------------------------------------------------------------
// Configuration

enum class PriorScheme { one_stage, two_stage };

inline std::string_view to_string(PriorScheme s) noexcept {
  return s == PriorScheme::one_stage ? "one_stage" : "two_stage";
}

inline PriorScheme parse_prior_scheme(std::string_view name) {
  if (name == "one_stage") return PriorScheme::one_stage;
  if (name == "two_stage") return PriorScheme::two_stage;
  throw ConfigError("unknown prior scheme '" + std::string(name) + "' (expected one_stage|two_stage)");
}

inline PyramidSpec make_pyramid(PriorScheme s, int image_h, int image_w) {
  return s == PriorScheme::one_stage ? one_stage_spec(image_h, image_w)
                                     : two_stage_spec(image_h, image_w);
}

/// One simulated assigner together with the anchors it is evaluated on.
struct SimAssigner {
  AssignerSpec assigner;
  PriorScheme priors = PriorScheme::two_stage;

  std::string name() const { return std::string(to_string(assigner.strategy)); }
  friend bool operator==(const SimAssigner&, const SimAssigner&) = default;
};

/// Thresholds used when counting simulated positives: the IoU/quality
/// threshold alone, without the low-quality rescue pass.
inline AssignConfig sim_one_stage_config() { return {0.5, 0.4, false, 0.0}; }
inline AssignConfig sim_two_stage_config() { return {0.7, 0.3, false, 0.3}; }
inline AssignConfig sim_mcla_config() { return {0.5, 0.5, false, 0.5}; }

inline std::vector<SimAssigner> default_sim_assigners() {
  return {
      {{Strategy::one_stage_maxiou, sim_one_stage_config(), {}}, PriorScheme::one_stage},
      {{Strategy::two_stage_maxiou, sim_two_stage_config(), {}}, PriorScheme::two_stage},
      {{Strategy::mcla, sim_mcla_config(), {}}, PriorScheme::two_stage},
  };
}

struct SimConfig {
  int image_h = 800;
  int image_w = 800;
  int n_gts = 2000;
  double max_dim = 64.0;
  std::uint64_t seed = 0;
  int trials = 5;
  double aspect_lo = 0.5;
  double aspect_hi = 2.0;
  double size_lo = 2.0;   ///< exclusive
  double size_hi = 64.0;  ///< inclusive
  SizeBins bins{};
  std::vector<SimAssigner> assigners = default_sim_assigners();

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

inline void validate(const SimConfig& c) {
  if (c.image_h <= 0 || c.image_w <= 0) throw ConfigError("simulation: image size must be positive");
  if (c.n_gts < 0) throw ConfigError("simulation: n_gts must be >= 0");
  if (c.trials < 1) throw ConfigError("simulation: trials must be >= 1");
  if (!(c.max_dim > 0.0) || c.max_dim > std::min(c.image_h, c.image_w)) {
    throw ConfigError("simulation: max_dim must be positive and fit inside the image");
  }
  if (!(c.size_lo >= 0.0) || !(c.size_hi > c.size_lo) || c.size_hi > c.max_dim) {
    throw ConfigError("simulation: size range must satisfy 0 <= lo < hi <= max_dim");
  }
  if (!(c.aspect_lo > 0.0) || !(c.aspect_hi >= c.aspect_lo) || !std::isfinite(c.aspect_hi)) {
    throw ConfigError("simulation: aspect range must satisfy 0 < lo <= hi");
  }
  validate(c.bins);
  if (c.assigners.empty()) throw ConfigError("simulation: no assigners selected");
  for (const auto& a : c.assigners) {
    validate(a.assigner.config);
    validate(a.assigner.weights);
  }
}

// ---------------------------------------------------------------------------
// Ground-truth sampling

/// Uniform double in [0, 1) from the top 53 bits; portable across standard
/// library implementations, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Draws cfg.n_gts boxes: size s ~ U(lo, hi], aspect a ~ U[lo, hi],
/// (w, h) = (s*sqrt(a), s/sqrt(a)) shrunk so that max(w, h) <= max_dim, and a
/// position uniform over placements fully inside the image.
inline std::vector<Box> sample_gts(const SimConfig& cfg, std::mt19937_64& rng) {
  validate(cfg);
  std::vector<Box> out;
  out.reserve(static_cast<std::size_t>(cfg.n_gts));
  const double img_w = cfg.image_w, img_h = cfg.image_h;
  for (int n = 0; n < cfg.n_gts; ++n) {
    const double s = cfg.size_hi - (cfg.size_hi - cfg.size_lo) * uniform01(rng);
    const double a = cfg.aspect_lo + (cfg.aspect_hi - cfg.aspect_lo) * uniform01(rng);
    double w = s * std::sqrt(a);
    double h = s / std::sqrt(a);
    const double longest = std::max(w, h);
    if (longest > cfg.max_dim) {
      w *= cfg.max_dim / longest;
      h *= cfg.max_dim / longest;
    }
    const double x1 = (img_w - w) * uniform01(rng);
    const double y1 = (img_h - h) * uniform01(rng);
    out.push_back({x1, y1, std::min(x1 + w, img_w), std::min(y1 + h, img_h)});
  }
  return out;
}

inline std::vector<Box> sample_gts(const SimConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_gts(cfg, rng);
}

// ---------------------------------------------------------------------------
// Reports

struct BinStats {
  std::string label;
  double lower_px = 0.0;
  double upper_px = 0.0;
  std::int64_t gts = 0;
  std::int64_t positives = 0;
  double mean_positives = 0.0;    ///< per trial (or per run)
  double positives_per_gt = 0.0;  ///< positives / gts in this bin
  double share_pct = 0.0;         ///< share of all positives of this assigner

  friend bool operator==(const BinStats&, const BinStats&) = default;
};

struct AssignerReport {
  SimAssigner setup;
  std::int64_t total_positives = 0;
  std::vector<BinStats> bins;
  /// positives[trial][bin]
  std::vector<std::vector<std::int64_t>> per_trial_positives;

  std::string name() const { return setup.name(); }
  const BinStats& bin(std::string_view label) const {
    for (const auto& b : bins)
      if (b.label == label) return b;
    throw ConfigError("no bin named '" + std::string(label) + "'");
  }
  friend bool operator==(const AssignerReport&, const AssignerReport&) = default;
};

struct ReportMetadata {
  std::string source = "simulation";  ///< "simulation" or "dataset"
  std::optional<SimConfig> simulation;
  std::vector<std::uint64_t> seeds;
  std::string dataset;
  std::int64_t images = 0;
  bool priors_clipped = false;
  int runs = 1;  ///< trials (simulation) or 1 (dataset)

  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct SimReport {
  ReportMetadata meta;
  std::vector<AssignerReport> assigners;

  const AssignerReport& assigner(std::string_view name) const {
    for (const auto& a : assigners)
      if (a.name() == name) return a;
    throw ConfigError("report has no assigner '" + std::string(name) + "'");
  }
  friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// Accumulates per-run bin counts; finalize() derives means and shares.
class BinAccumulator {
 public:
  BinAccumulator(SizeBins bins, double cap) : bins_(std::move(bins)), cap_(cap) {}

  /// Adds one run: GT counts per bin and the positives of every assigner.
  void add_run(std::span<const Box> gts, std::span<const AssignResult> results) {
    if (runs_.empty()) assigner_count_ = results.size();
    if (results.size() != assigner_count_) throw ConfigError("inconsistent assigner count");
    std::vector<std::size_t> bin_of_gt(gts.size());
    Run run{std::vector<std::int64_t>(bins_.count(), 0), {}};
    for (std::size_t g = 0; g < gts.size(); ++g) {
      bin_of_gt[g] = bins_.bin_of(gt_size(gts[g]));
      ++run.gts[bin_of_gt[g]];
    }
    for (const auto& r : results) {
      std::vector<std::int64_t> pos(bins_.count(), 0);
      for (std::int32_t l : r.labels)
        if (l >= 0) ++pos[bin_of_gt[static_cast<std::size_t>(l)]];
      run.positives.push_back(std::move(pos));
    }
    runs_.push_back(std::move(run));
  }

  std::size_t runs() const noexcept { return runs_.size(); }

  std::vector<AssignerReport> finalize(std::span<const SimAssigner> setups) const {
    if (!runs_.empty() && setups.size() != assigner_count_) {
      throw ConfigError("assigner setup count does not match accumulated results");
    }
    const std::size_t nb = bins_.count();
    std::vector<std::int64_t> gts(nb, 0);
    for (const auto& run : runs_)
      for (std::size_t b = 0; b < nb; ++b) gts[b] += run.gts[b];

    std::vector<AssignerReport> out;
    for (std::size_t a = 0; a < setups.size(); ++a) {
      AssignerReport rep;
      rep.setup = setups[a];
      std::vector<std::int64_t> pos(nb, 0);
      for (const auto& run : runs_) {
        rep.per_trial_positives.push_back(run.positives[a]);
        for (std::size_t b = 0; b < nb; ++b) pos[b] += run.positives[a][b];
      }
      for (auto p : pos) rep.total_positives += p;
      const double n_runs = std::max<std::size_t>(1, runs_.size());
      for (std::size_t b = 0; b < nb; ++b) {
        BinStats s;
        s.label = bins_.labels[b];
        s.lower_px = bins_.lower(b);
        s.upper_px = bins_.upper(b, cap_);
        s.gts = gts[b];
        s.positives = pos[b];
        s.mean_positives = static_cast<double>(pos[b]) / n_runs;
        s.positives_per_gt = gts[b] > 0 ? static_cast<double>(pos[b]) / static_cast<double>(gts[b]) : 0.0;
        s.share_pct = rep.total_positives > 0 ? 100.0 * static_cast<double>(pos[b]) /
                                                    static_cast<double>(rep.total_positives)
                                              : 0.0;
        rep.bins.push_back(std::move(s));
      }
      out.push_back(std::move(rep));
    }
    return out;
  }

 private:
  struct Run {
    std::vector<std::int64_t> gts;
    std::vector<std::vector<std::int64_t>> positives;  // [assigner][bin]
  };
  SizeBins bins_;
  double cap_;
  std::size_t assigner_count_ = 0;
  std::vector<Run> runs_;
};

/// Generates one GT set per trial (seed = cfg.seed + trial), assigns it with
/// every configured assigner on that assigner's native anchors, and bins the
/// positives by the size of the GT they were matched to.
inline SimReport run_simulation(const SimConfig& cfg, unsigned jobs = 1) {
  validate(cfg);
  std::map<PriorScheme, PriorSet> priors;
  for (const auto& a : cfg.assigners) {
    if (!priors.contains(a.priors)) {
      priors.emplace(a.priors, generate_priors(make_pyramid(a.priors, cfg.image_h, cfg.image_w)));
    }
  }

  SimReport report;
  report.meta.source = "simulation";
  report.meta.simulation = cfg;
  report.meta.runs = cfg.trials;
  report.meta.images = cfg.trials;
  report.meta.priors_clipped = false;

  BinAccumulator acc(cfg.bins, cfg.max_dim);
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(t);
    report.meta.seeds.push_back(seed);
    const auto gts = sample_gts(cfg, seed);
    std::vector<AssignResult> results;
    for (const auto& a : cfg.assigners) {
      results.push_back(run_assigner(a.assigner, gts, priors.at(a.priors).boxes, jobs));
    }
    acc.add_run(gts, results);
  }
  report.assigners = acc.finalize(cfg.assigners);
  return report;
}

}  // namespace sodkit
