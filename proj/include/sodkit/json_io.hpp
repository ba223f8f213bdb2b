// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

// JSON mapping for every configuration struct and for SimReport.
// Objects may be partial: missing keys keep their defaults, unknown keys are
// rejected so that typos in config files do not pass silently.

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sodkit/assign.hpp"
#include "sodkit/error.hpp"
#include "sodkit/freq.hpp"
#include "sodkit/priors.hpp"
#include "sodkit/sim.hpp"

namespace sodkit {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kReportFormat = "sodkit.report/1";

namespace detail {

inline void require_object(const Json& j, std::string_view what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
}

inline void check_keys(const Json& j, std::string_view what,
                       std::initializer_list<std::string_view> allowed) {
  require_object(j, what);
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const Json& j, std::string_view key, T& out) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("key '" + std::string(key) + "': " + e.what());
  }
}

template <class T>
void read_pair(const Json& j, std::string_view key, T& lo, T& hi) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) return;
  if (!it->is_array() || it->size() != 2) {
    throw ConfigError("key '" + std::string(key) + "': expected [lo, hi]");
  }
  lo = (*it)[0].template get<T>();
  hi = (*it)[1].template get<T>();
}

}  // namespace detail

// --- MclaWeights -----------------------------------------------------------

inline void to_json(Json& j, const MclaWeights& w) {
  j = Json{{"lambda_iou", w.iou}, {"lambda_poc", w.poc}, {"lambda_scc", w.scc},
           {"c_poc", w.c_poc}, {"c_scc", w.c_scc}};
}
inline void from_json(const Json& j, MclaWeights& w) {
  detail::check_keys(j, "weights", {"lambda_iou", "lambda_poc", "lambda_scc", "c_poc", "c_scc"});
  detail::read(j, "lambda_iou", w.iou);
  detail::read(j, "lambda_poc", w.poc);
  detail::read(j, "lambda_scc", w.scc);
  detail::read(j, "c_poc", w.c_poc);
  detail::read(j, "c_scc", w.c_scc);
}

// --- AssignConfig ----------------------------------------------------------

inline void to_json(Json& j, const AssignConfig& c) {
  j = Json{{"pos_thr", c.pos_thr}, {"neg_thr", c.neg_thr},
           {"match_low_quality", c.match_low_quality}, {"min_pos_quality", c.min_pos_quality}};
}
inline void from_json(const Json& j, AssignConfig& c) {
  detail::check_keys(j, "assign", {"pos_thr", "neg_thr", "match_low_quality", "min_pos_quality"});
  detail::read(j, "pos_thr", c.pos_thr);
  detail::read(j, "neg_thr", c.neg_thr);
  detail::read(j, "match_low_quality", c.match_low_quality);
  detail::read(j, "min_pos_quality", c.min_pos_quality);
}

// --- HfpConfig / BandSplitConfig --------------------------------------------

inline void to_json(Json& j, const HfpConfig& c) {
  j = Json{{"relay_level", c.relay_level}, {"intensity", c.intensity}, {"weight", c.weight}};
}
inline void from_json(const Json& j, HfpConfig& c) {
  detail::check_keys(j, "hfp", {"relay_level", "intensity", "weight"});
  detail::read(j, "relay_level", c.relay_level);
  detail::read(j, "intensity", c.intensity);
  detail::read(j, "weight", c.weight);
}

inline void to_json(Json& j, const BandSplitConfig& c) {
  j = Json{{"low_cutoff", c.low_cutoff}, {"high_cutoff", c.high_cutoff}};
}
inline void from_json(const Json& j, BandSplitConfig& c) {
  detail::check_keys(j, "fdsplit", {"low_cutoff", "high_cutoff"});
  detail::read(j, "low_cutoff", c.low_cutoff);
  detail::read(j, "high_cutoff", c.high_cutoff);
}

// --- PyramidSpec -------------------------------------------------------------

inline void to_json(Json& j, const PyramidLevel& l) {
  j = Json{{"stride", l.stride}, {"base_size", l.base_size}, {"scales", l.scales},
           {"ratios", l.ratios}};
}
inline void from_json(const Json& j, PyramidLevel& l) {
  detail::check_keys(j, "pyramid level", {"stride", "base_size", "scales", "ratios"});
  detail::read(j, "stride", l.stride);
  detail::read(j, "base_size", l.base_size);
  detail::read(j, "scales", l.scales);
  detail::read(j, "ratios", l.ratios);
}

inline void to_json(Json& j, const PyramidSpec& s) {
  j = Json{{"image_h", s.image_h}, {"image_w", s.image_w}, {"levels", s.levels}};
}
/// A "scheme" key ("one_stage" | "two_stage") seeds the levels from a
/// built-in configuration before explicit keys are applied.
inline void from_json(const Json& j, PyramidSpec& s) {
  detail::check_keys(j, "pyramid", {"scheme", "image_h", "image_w", "levels"});
  if (j.contains("scheme")) {
    s = make_pyramid(parse_prior_scheme(j.at("scheme").get<std::string>()), s.image_h, s.image_w);
  }
  detail::read(j, "image_h", s.image_h);
  detail::read(j, "image_w", s.image_w);
  detail::read(j, "levels", s.levels);
}

// --- SimConfig ---------------------------------------------------------------

inline void to_json(Json& j, const SizeBins& b) {
  j = Json{{"edges", b.edges}, {"labels", b.labels}};
}
inline void from_json(const Json& j, SizeBins& b) {
  detail::check_keys(j, "bins", {"edges", "labels"});
  detail::read(j, "edges", b.edges);
  detail::read(j, "labels", b.labels);
}

inline void to_json(Json& j, const SimAssigner& a) {
  j = Json{{"strategy", std::string(to_string(a.assigner.strategy))},
           {"priors", std::string(to_string(a.priors))},
           {"assign", a.assigner.config},
           {"weights", a.assigner.weights}};
}

/// Defaults for a strategy named in a config file: its native anchors and
/// the simulation thresholds.
inline SimAssigner default_sim_assigner(Strategy s) {
  for (const auto& a : default_sim_assigners())
    if (a.assigner.strategy == s) return a;
  throw ConfigError("no default for strategy");
}

inline void from_json(const Json& j, SimAssigner& a) {
  detail::check_keys(j, "assigner", {"strategy", "priors", "assign", "weights"});
  a = default_sim_assigner(j.contains("strategy")
                               ? parse_strategy(j.at("strategy").get<std::string>())
                               : a.assigner.strategy);
  if (j.contains("priors")) a.priors = parse_prior_scheme(j.at("priors").get<std::string>());
  detail::read(j, "assign", a.assigner.config);
  detail::read(j, "weights", a.assigner.weights);
}

inline void to_json(Json& j, const SimConfig& c) {
  j = Json{{"image_h", c.image_h},
           {"image_w", c.image_w},
           {"n_gts", c.n_gts},
           {"max_dim", c.max_dim},
           {"seed", c.seed},
           {"trials", c.trials},
           {"aspect_range", {c.aspect_lo, c.aspect_hi}},
           {"size_range", {c.size_lo, c.size_hi}},
           {"bins", c.bins},
           {"assigners", c.assigners}};
}
inline void from_json(const Json& j, SimConfig& c) {
  detail::check_keys(j, "simulation", {"image_h", "image_w", "n_gts", "max_dim", "seed", "trials",
                                       "aspect_range", "size_range", "bins", "assigners"});
  detail::read(j, "image_h", c.image_h);
  detail::read(j, "image_w", c.image_w);
  detail::read(j, "n_gts", c.n_gts);
  detail::read(j, "max_dim", c.max_dim);
  detail::read(j, "seed", c.seed);
  detail::read(j, "trials", c.trials);
  detail::read_pair(j, "aspect_range", c.aspect_lo, c.aspect_hi);
  detail::read_pair(j, "size_range", c.size_lo, c.size_hi);
  detail::read(j, "bins", c.bins);
  detail::read(j, "assigners", c.assigners);
}

// --- SimReport -----------------------------------------------------------------

inline void to_json(Json& j, const BinStats& b) {
  j = Json{{"label", b.label},
           {"lower_px", b.lower_px},
           {"upper_px", b.upper_px},
           {"gts", b.gts},
           {"positives", b.positives},
           {"mean_positives", b.mean_positives},
           {"positives_per_gt", b.positives_per_gt},
           {"share_pct", b.share_pct}};
}
inline void from_json(const Json& j, BinStats& b) {
  b.label = j.at("label").get<std::string>();
  b.lower_px = j.at("lower_px").get<double>();
  b.upper_px = j.at("upper_px").get<double>();
  b.gts = j.at("gts").get<std::int64_t>();
  b.positives = j.at("positives").get<std::int64_t>();
  b.mean_positives = j.at("mean_positives").get<double>();
  b.positives_per_gt = j.at("positives_per_gt").get<double>();
  b.share_pct = j.at("share_pct").get<double>();
}

inline void to_json(Json& j, const AssignerReport& r) {
  j = Json{{"name", r.name()},
           {"setup", r.setup},
           {"total_positives", r.total_positives},
           {"bins", r.bins},
           {"per_run_positives", r.per_trial_positives}};
}
inline void from_json(const Json& j, AssignerReport& r) {
  r.setup = j.at("setup").get<SimAssigner>();
  r.total_positives = j.at("total_positives").get<std::int64_t>();
  r.bins = j.at("bins").get<std::vector<BinStats>>();
  r.per_trial_positives = j.at("per_run_positives").get<std::vector<std::vector<std::int64_t>>>();
}

inline void to_json(Json& j, const ReportMetadata& m) {
  j = Json{{"source", m.source},
           {"runs", m.runs},
           {"seeds", m.seeds},
           {"images", m.images},
           {"dataset", m.dataset},
           {"priors_clipped", m.priors_clipped}};
  j["simulation"] = m.simulation ? Json(*m.simulation) : Json(nullptr);
}
inline void from_json(const Json& j, ReportMetadata& m) {
  m.source = j.at("source").get<std::string>();
  m.runs = j.at("runs").get<int>();
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.images = j.at("images").get<std::int64_t>();
  m.dataset = j.at("dataset").get<std::string>();
  m.priors_clipped = j.at("priors_clipped").get<bool>();
  if (j.contains("simulation") && !j.at("simulation").is_null()) {
    m.simulation = j.at("simulation").get<SimConfig>();
  } else {
    m.simulation.reset();
  }
}

inline Json report_to_json_value(const SimReport& r) {
  return Json{{"format", kReportFormat}, {"metadata", r.meta}, {"assigners", r.assigners}};
}

/// Pretty-printed report; byte-stable for equal reports.
inline std::string report_to_json(const SimReport& r) {
  return report_to_json_value(r).dump(2) + "\n";
}

inline SimReport report_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  if (!j.is_object() || j.value("format", std::string{}) != kReportFormat) {
    throw FormatError("report: missing or unsupported format tag");
  }
  try {
    SimReport r;
    r.meta = j.at("metadata").get<ReportMetadata>();
    r.assigners = j.at("assigners").get<std::vector<AssignerReport>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

}  // namespace sodkit
