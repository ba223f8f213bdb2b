// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sodkit/error.hpp"
#include "sodkit/geometry.hpp"
#include "sodkit/matrix.hpp"
#include "sodkit/parallel.hpp"

namespace sodkit {

// ---------------------------------------------------------------------------
// Configuration

/// Weights of the multi-criteria score. The score is the weighted mean of
/// IoU, the position-offset criterion and the shape-constraint criterion.
struct MclaWeights {
  double iou = 1.0;
  double poc = 3.0;
  double scc = 1.0;
  double c_poc = 20.0;   ///< gain inside the position-offset mapping
  double c_scc = 0.25;   ///< gain inside the shape-constraint mapping

  friend bool operator==(const MclaWeights&, const MclaWeights&) = default;
};

inline void validate(const MclaWeights& w) {
  for (double v : {w.iou, w.poc, w.scc}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("mcla weights must be finite and >= 0");
  }
  if (!(w.iou + w.poc + w.scc > 0.0)) throw ConfigError("mcla weights must not all be zero");
  if (!(w.c_poc > 0.0) || !(w.c_scc > 0.0) || !std::isfinite(w.c_poc) || !std::isfinite(w.c_scc)) {
    throw ConfigError("mcla gains c_poc and c_scc must be positive");
  }
}

/// Thresholding protocol shared by every assigner.
struct AssignConfig {
  double pos_thr = 0.7;
  double neg_thr = 0.3;
  bool match_low_quality = true;
  double min_pos_quality = 0.3;

  friend bool operator==(const AssignConfig&, const AssignConfig&) = default;
};

inline void validate(const AssignConfig& c) {
  if (!(0.0 <= c.neg_thr && c.neg_thr <= c.pos_thr && c.pos_thr <= 1.0)) {
    throw ConfigError("assign config requires 0 <= neg_thr <= pos_thr <= 1");
  }
  if (!(0.0 <= c.min_pos_quality && c.min_pos_quality <= 1.0)) {
    throw ConfigError("assign config requires min_pos_quality in [0, 1]");
  }
}

/// Dense one-stage detector thresholds.
inline AssignConfig one_stage_config() { return {0.5, 0.4, true, 0.0}; }
/// Region-proposal thresholds.
inline AssignConfig two_stage_config() { return {0.7, 0.3, true, 0.3}; }

// ---------------------------------------------------------------------------
// Results

inline constexpr std::int32_t kNegative = -1;
inline constexpr std::int32_t kIgnored = -2;

struct AssignResult {
  /// Per proposal: kNegative, kIgnored, or the index of the matched GT.
  std::vector<std::int32_t> labels;
  /// Per proposal: best score over all GTs (0 when there are no GTs).
  std::vector<double> max_quality;

  std::size_t num_positive() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.end(), [](std::int32_t l) { return l >= 0; }));
  }
  friend bool operator==(const AssignResult&, const AssignResult&) = default;
};

// ---------------------------------------------------------------------------
// Criteria

inline double center_distance(const CenterSize& g, const CenterSize& p) noexcept {
  const double dx = g.cx - p.cx;
  const double dy = g.cy - p.cy;
  return std::sqrt(dx * dx + dy * dy);
}

inline double shape_sqdiff(const CenterSize& g, const CenterSize& p) noexcept {
  const double dw = g.w - p.w;
  const double dh = g.h - p.h;
  return dw * dw + dh * dh;
}

inline double normalize_distance(double d, double lo, double hi) noexcept {
  const double range = hi - lo;
  return range > 0.0 ? (d - lo) / range : 0.0;
}

inline double poc_score(double e1_norm, double gain) noexcept {
  return 1.0 / (1.0 + std::sqrt(gain * e1_norm));
}

inline double scc_score(double e2, double gain) noexcept {
  return 1.0 / (1.0 + std::sqrt(gain * e2));
}

inline double combine_scores(const MclaWeights& w, double s_iou, double s_poc,
                             double s_scc) noexcept {
  return (w.iou * s_iou + w.poc * s_poc + w.scc * s_scc) / (w.iou + w.poc + w.scc);
}

/// Euclidean distance between centers (pixels), m x n.
inline Matrix<double> center_mse_matrix(const BoxMatrix& gts, const BoxMatrix& proposals) {
  Matrix<double> out(gts.size(), proposals.size());
  for (std::size_t i = 0; i < gts.size(); ++i)
    for (std::size_t j = 0; j < proposals.size(); ++j)
      out(i, j) = center_distance(gts[i], proposals[j]);
  return out;
}

/// Squared Euclidean distance between (w, h) extents, m x n.
inline Matrix<double> shape_mse_matrix(const BoxMatrix& gts, const BoxMatrix& proposals) {
  Matrix<double> out(gts.size(), proposals.size());
  for (std::size_t i = 0; i < gts.size(); ++i)
    for (std::size_t j = 0; j < proposals.size(); ++j)
      out(i, j) = shape_sqdiff(gts[i], proposals[j]);
  return out;
}

/// Whole-matrix min-max scaling; a constant matrix maps to zeros.
inline Matrix<double> minmax_normalize(const Matrix<double>& e) {
  Matrix<double> out = e;
  if (e.empty()) return out;
  const auto [lo, hi] = std::minmax_element(e.values().begin(), e.values().end());
  for (double& v : out.values()) v = normalize_distance(v, *lo, *hi);
  return out;
}

// ---------------------------------------------------------------------------
// Score kernels. A kernel maps (gt index, proposal index) to a quality score;
// dense matrices and the streaming assigner evaluate the same kernel, so the
// two paths agree bit for bit.

struct IouKernel {
  std::span<const Box> gts;
  std::span<const Box> proposals;

  std::size_t rows() const noexcept { return gts.size(); }
  std::size_t cols() const noexcept { return proposals.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return iou(gts[i], proposals[j]);
  }
};

struct MatrixKernel {
  const ScoreMatrix* scores;

  std::size_t rows() const noexcept { return scores->rows(); }
  std::size_t cols() const noexcept { return scores->cols(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return (*scores)(i, j); }
};

enum class Criterion { iou, poc, scc, mcla };

inline Criterion parse_criterion(std::string_view name) {
  if (name == "iou") return Criterion::iou;
  if (name == "poc") return Criterion::poc;
  if (name == "scc") return Criterion::scc;
  if (name == "mcla") return Criterion::mcla;
  throw ConfigError("unknown criterion '" + std::string(name) + "' (expected iou|poc|scc|mcla)");
}

/// Multi-criteria score evaluated on demand. Construction scans every pair
/// once to find the extrema of the center distances.
class MclaKernel {
 public:
  MclaKernel(std::span<const Box> gts, std::span<const Box> proposals, const MclaWeights& weights,
             unsigned jobs = 1)
      : gts_(gts),
        proposals_(proposals),
        gt_cs_(to_box_matrix(gts)),
        prop_cs_(to_box_matrix(proposals)),
        weights_(weights) {
    validate(weights_);
    if (gts.empty() || proposals.empty()) return;
    const unsigned workers = effective_workers(prop_cs_.size(), jobs);
    std::vector<double> lo(workers, std::numeric_limits<double>::infinity());
    std::vector<double> hi(workers, -std::numeric_limits<double>::infinity());
    parallel_ranges(prop_cs_.size(), jobs, [&](std::size_t b, std::size_t e, unsigned w) {
      double l = lo[w], h = hi[w];
      for (std::size_t j = b; j < e; ++j) {
        for (const auto& g : gt_cs_) {
          const double d = center_distance(g, prop_cs_[j]);
          l = std::min(l, d);
          h = std::max(h, d);
        }
      }
      lo[w] = l;
      hi[w] = h;
    });
    dist_lo_ = *std::min_element(lo.begin(), lo.end());
    dist_hi_ = *std::max_element(hi.begin(), hi.end());
  }

  std::size_t rows() const noexcept { return gts_.size(); }
  std::size_t cols() const noexcept { return proposals_.size(); }
  double distance_min() const noexcept { return dist_lo_; }
  double distance_max() const noexcept { return dist_hi_; }

  double iou_term(std::size_t i, std::size_t j) const noexcept {
    return iou(gts_[i], proposals_[j]);
  }
  double poc_term(std::size_t i, std::size_t j) const noexcept {
    const double d = center_distance(gt_cs_[i], prop_cs_[j]);
    return poc_score(normalize_distance(d, dist_lo_, dist_hi_), weights_.c_poc);
  }
  double scc_term(std::size_t i, std::size_t j) const noexcept {
    return scc_score(shape_sqdiff(gt_cs_[i], prop_cs_[j]), weights_.c_scc);
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return combine_scores(weights_, iou_term(i, j), poc_term(i, j), scc_term(i, j));
  }

 private:
  std::span<const Box> gts_;
  std::span<const Box> proposals_;
  BoxMatrix gt_cs_;
  BoxMatrix prop_cs_;
  MclaWeights weights_;
  double dist_lo_ = 0.0;
  double dist_hi_ = 0.0;
};

template <class Kernel>
ScoreMatrix materialize(const Kernel& k) {
  ScoreMatrix out(k.rows(), k.cols());
  for (std::size_t i = 0; i < k.rows(); ++i)
    for (std::size_t j = 0; j < k.cols(); ++j) out(i, j) = k(i, j);
  return out;
}

/// Multi-criteria score matrix: the weighted mean of IoU,
/// (1 + sqrt(c_poc * E1_norm))^-1 and (1 + sqrt(c_scc * E2))^-1.
inline ScoreMatrix mcla_scores(std::span<const Box> gts, std::span<const Box> proposals,
                               const MclaWeights& weights = {}) {
  return materialize(MclaKernel(gts, proposals, weights));
}

/// One criterion of the multi-criteria score as its own matrix.
inline ScoreMatrix criterion_matrix(Criterion c, std::span<const Box> gts,
                                    std::span<const Box> proposals,
                                    const MclaWeights& weights = {}) {
  if (c == Criterion::iou) return iou_matrix(gts, proposals);
  const MclaKernel k(gts, proposals, weights);
  ScoreMatrix out(k.rows(), k.cols());
  for (std::size_t i = 0; i < k.rows(); ++i) {
    for (std::size_t j = 0; j < k.cols(); ++j) {
      switch (c) {
        case Criterion::poc: out(i, j) = k.poc_term(i, j); break;
        case Criterion::scc: out(i, j) = k.scc_term(i, j); break;
        default: out(i, j) = k(i, j); break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assignment

/// Max-quality thresholding over any score kernel.
///
/// Each proposal takes its best GT (lowest index on ties) and is negative
/// below neg_thr, ignored below pos_thr, positive otherwise. With
/// match_low_quality, every GT whose best score is positive and at least
/// min_pos_quality claims all proposals attaining that score; GTs are visited
/// in index order, so a later GT wins a proposal claimed by several.
template <class Kernel>
AssignResult assign_with_kernel(const Kernel& k, const AssignConfig& cfg, unsigned jobs = 1) {
  validate(cfg);
  const std::size_t m = k.rows();
  const std::size_t n = k.cols();
  AssignResult out;
  out.labels.assign(n, kNegative);
  out.max_quality.assign(n, 0.0);
  if (m == 0 || n == 0) return out;

  std::vector<std::int32_t> argmax(n, 0);
  const unsigned workers = effective_workers(n, jobs);
  std::vector<std::vector<double>> row_best(workers, std::vector<double>(m, -1.0));

  parallel_ranges(n, jobs, [&](std::size_t b, std::size_t e, unsigned w) {
    auto& rb = row_best[w];
    for (std::size_t j = b; j < e; ++j) {
      double best = k(0, j);
      std::int32_t arg = 0;
      rb[0] = std::max(rb[0], best);
      for (std::size_t i = 1; i < m; ++i) {
        const double v = k(i, j);
        if (v > best) {
          best = v;
          arg = static_cast<std::int32_t>(i);
        }
        if (v > rb[i]) rb[i] = v;
      }
      out.max_quality[j] = best;
      argmax[j] = arg;
      if (best < cfg.neg_thr) {
        out.labels[j] = kNegative;
      } else if (best < cfg.pos_thr) {
        out.labels[j] = kIgnored;
      } else {
        out.labels[j] = arg;
      }
    }
  });

  if (!cfg.match_low_quality) return out;

  std::vector<double> gt_best(m, -1.0);
  for (const auto& rb : row_best)
    for (std::size_t i = 0; i < m; ++i) gt_best[i] = std::max(gt_best[i], rb[i]);

  std::vector<std::size_t> eligible;  // descending, so the first hit is the winning GT
  for (std::size_t i = m; i-- > 0;) {
    if (gt_best[i] > 0.0 && gt_best[i] >= cfg.min_pos_quality) eligible.push_back(i);
  }
  if (eligible.empty()) return out;

  parallel_ranges(n, jobs, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t j = b; j < e; ++j) {
      for (std::size_t i : eligible) {
        if (k(i, j) == gt_best[i]) {
          out.labels[j] = static_cast<std::int32_t>(i);
          break;
        }
      }
    }
  });
  return out;
}

inline AssignResult assign_max_quality(const ScoreMatrix& scores, const AssignConfig& cfg) {
  return assign_with_kernel(MatrixKernel{&scores}, cfg);
}

inline AssignResult one_stage_maxiou(std::span<const Box> gts, std::span<const Box> proposals) {
  return assign_with_kernel(IouKernel{gts, proposals}, one_stage_config());
}

inline AssignResult two_stage_maxiou(std::span<const Box> gts, std::span<const Box> proposals) {
  return assign_with_kernel(IouKernel{gts, proposals}, two_stage_config());
}

inline AssignResult mcla_assign(std::span<const Box> gts, std::span<const Box> proposals,
                                const MclaWeights& weights = {},
                                const AssignConfig& cfg = two_stage_config()) {
  return assign_with_kernel(MclaKernel(gts, proposals, weights), cfg);
}

// ---------------------------------------------------------------------------
// Strategy selection used by the simulation and dataset statistics.

enum class Strategy { one_stage_maxiou, two_stage_maxiou, mcla };

inline std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::one_stage_maxiou: return "one_stage_maxiou";
    case Strategy::two_stage_maxiou: return "two_stage_maxiou";
    case Strategy::mcla: return "mcla";
  }
  return "unknown";
}

inline Strategy parse_strategy(std::string_view name) {
  if (name == "one_stage_maxiou" || name == "one_stage") return Strategy::one_stage_maxiou;
  if (name == "two_stage_maxiou" || name == "two_stage") return Strategy::two_stage_maxiou;
  if (name == "mcla") return Strategy::mcla;
  throw ConfigError("unknown assigner '" + std::string(name) +
                    "' (expected one_stage_maxiou|two_stage_maxiou|mcla)");
}

/// Full description of one assigner: scoring rule, thresholds, weights.
struct AssignerSpec {
  Strategy strategy = Strategy::mcla;
  AssignConfig config = two_stage_config();
  MclaWeights weights{};

  friend bool operator==(const AssignerSpec&, const AssignerSpec&) = default;
};

inline AssignResult run_assigner(const AssignerSpec& spec, std::span<const Box> gts,
                                 std::span<const Box> proposals, unsigned jobs = 1) {
  if (spec.strategy == Strategy::mcla) {
    return assign_with_kernel(MclaKernel(gts, proposals, spec.weights, jobs), spec.config, jobs);
  }
  return assign_with_kernel(IouKernel{gts, proposals}, spec.config, jobs);
}

}  // namespace sodkit
