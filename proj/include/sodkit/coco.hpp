// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

// COCO-style annotation subset: images, annotations (bbox as x,y,w,h),
// categories. Everything else in the file is ignored.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "sodkit/assign.hpp"
#include "sodkit/csv.hpp"
#include "sodkit/error.hpp"
#include "sodkit/geometry.hpp"
#include "sodkit/priors.hpp"
#include "sodkit/sim.hpp"

namespace sodkit {

struct CocoImage {
  std::int64_t id = 0;
  int width = 0;
  int height = 0;
  std::string file_name;
  friend bool operator==(const CocoImage&, const CocoImage&) = default;
};

struct CocoAnnotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  Box box;  ///< corner form: (x, y, x + w, y + h)
  bool iscrowd = false;
  friend bool operator==(const CocoAnnotation&, const CocoAnnotation&) = default;
};

struct CocoCategory {
  std::int64_t id = 0;
  std::string name;
  friend bool operator==(const CocoCategory&, const CocoCategory&) = default;
};

struct Dataset {
  std::vector<CocoImage> images;
  std::vector<CocoAnnotation> annotations;
  std::vector<CocoCategory> categories;

  std::size_t crowd_count() const {
    return static_cast<std::size_t>(
        std::count_if(annotations.begin(), annotations.end(), [](const auto& a) { return a.iscrowd; }));
  }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

namespace detail {

template <class T>
T coco_field(const nlohmann::json& obj, const char* key, const char* what) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string(what) + ": missing '" + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string(what) + ": bad type for '" + key + "'");
  }
}

inline const nlohmann::json& coco_array(const nlohmann::json& root, const char* key) {
  const auto it = root.find(key);
  if (it == root.end() || !it->is_array()) {
    throw FormatError(std::string("coco: top-level '") + key + "' must be an array");
  }
  return *it;
}

}  // namespace detail

/// Parses and validates annotation JSON. Errors:
///   FormatError      malformed JSON (with byte offset) or missing/mistyped fields
///   ValidationError  dangling image_id or negative bbox extent (lists ids)
inline Dataset parse_coco(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("coco: malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!root.is_object()) throw FormatError("coco: top level must be an object");

  Dataset ds;
  for (const auto& im : detail::coco_array(root, "images")) {
    CocoImage img;
    img.id = detail::coco_field<std::int64_t>(im, "id", "image");
    img.width = detail::coco_field<int>(im, "width", "image");
    img.height = detail::coco_field<int>(im, "height", "image");
    if (im.contains("file_name")) img.file_name = detail::coco_field<std::string>(im, "file_name", "image");
    if (img.width <= 0 || img.height <= 0) {
      throw ValidationError("coco: image " + std::to_string(img.id) + " has non-positive size");
    }
    ds.images.push_back(std::move(img));
  }
  for (const auto& c : detail::coco_array(root, "categories")) {
    CocoCategory cat;
    cat.id = detail::coco_field<std::int64_t>(c, "id", "category");
    if (c.contains("name")) cat.name = detail::coco_field<std::string>(c, "name", "category");
    ds.categories.push_back(std::move(cat));
  }

  std::unordered_set<std::int64_t> image_ids;
  for (const auto& im : ds.images) image_ids.insert(im.id);

  std::vector<std::int64_t> dangling, negative;
  for (const auto& a : detail::coco_array(root, "annotations")) {
    CocoAnnotation ann;
    ann.id = detail::coco_field<std::int64_t>(a, "id", "annotation");
    ann.image_id = detail::coco_field<std::int64_t>(a, "image_id", "annotation");
    ann.category_id = a.contains("category_id")
                          ? detail::coco_field<std::int64_t>(a, "category_id", "annotation")
                          : 0;
    const auto bbox = detail::coco_field<std::vector<double>>(a, "bbox", "annotation");
    if (bbox.size() != 4) {
      throw FormatError("annotation " + std::to_string(ann.id) + ": bbox needs 4 numbers");
    }
    if (a.contains("iscrowd")) {
      const auto& c = a.at("iscrowd");
      ann.iscrowd = c.is_boolean() ? c.get<bool>() : c.is_number() && c.get<double>() != 0.0;
    }
    if (!image_ids.contains(ann.image_id)) dangling.push_back(ann.id);
    if (bbox[2] < 0.0 || bbox[3] < 0.0) negative.push_back(ann.id);
    ann.box = {bbox[0], bbox[1], bbox[0] + bbox[2], bbox[1] + bbox[3]};
    ds.annotations.push_back(ann);
  }

  auto list = [](const std::vector<std::int64_t>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i == 8) {
        s += ", ... (" + std::to_string(ids.size()) + " total)";
        break;
      }
      s += (i ? ", " : "") + std::to_string(ids[i]);
    }
    return s;
  };
  if (!dangling.empty()) {
    throw ValidationError("coco: annotations reference missing images: " + list(dangling));
  }
  if (!negative.empty()) {
    throw ValidationError("coco: annotations with negative bbox width/height: " + list(negative));
  }
  return ds;
}

inline Dataset load_coco(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return parse_coco(text);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

/// Writes the retained fields back as COCO JSON.
inline std::string serialize_coco(const Dataset& ds) {
  nlohmann::ordered_json root;
  root["images"] = nlohmann::ordered_json::array();
  for (const auto& im : ds.images) {
    root["images"].push_back(
        {{"id", im.id}, {"width", im.width}, {"height", im.height}, {"file_name", im.file_name}});
  }
  root["annotations"] = nlohmann::ordered_json::array();
  for (const auto& a : ds.annotations) {
    root["annotations"].push_back({{"id", a.id},
                                   {"image_id", a.image_id},
                                   {"category_id", a.category_id},
                                   {"bbox", {a.box.x1, a.box.y1, a.box.width(), a.box.height()}},
                                   {"iscrowd", a.iscrowd ? 1 : 0}});
  }
  root["categories"] = nlohmann::ordered_json::array();
  for (const auto& c : ds.categories) root["categories"].push_back({{"id", c.id}, {"name", c.name}});
  return root.dump(1) + "\n";
}

/// Non-crowd GT boxes per image, in image order.
inline std::vector<std::vector<Box>> gts_by_image(const Dataset& ds) {
  std::unordered_map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < ds.images.size(); ++i) index.emplace(ds.images[i].id, i);
  std::vector<std::vector<Box>> out(ds.images.size());
  for (const auto& a : ds.annotations) {
    if (a.iscrowd) continue;
    out[index.at(a.image_id)].push_back(a.box);
  }
  return out;
}

struct DatasetStatsConfig {
  SizeBins bins{};
  std::vector<SimAssigner> assigners = default_sim_assigners();
  /// Replaces the built-in levels of every scheme when set.
  std::optional<std::vector<PyramidLevel>> levels;
  std::string dataset_name;
};

/// Assigns every image's GTs against anchors generated for that image's
/// size and bins positives exactly as run_simulation does. One run per image.
inline SimReport dataset_assignment_stats(const Dataset& ds, const DatasetStatsConfig& cfg,
                                          unsigned jobs = 1) {
  validate(cfg.bins);
  if (cfg.assigners.empty()) throw ConfigError("stats: no assigners selected");
  for (const auto& a : cfg.assigners) {
    validate(a.assigner.config);
    validate(a.assigner.weights);
  }

  const auto per_image = gts_by_image(ds);
  double cap = cfg.bins.edges.empty() ? 0.0 : cfg.bins.edges.back();
  for (const auto& gts : per_image)
    for (const auto& b : gts) cap = std::max(cap, gt_size(b));

  std::map<std::tuple<PriorScheme, int, int>, PriorSet> priors;
  auto priors_for = [&](PriorScheme s, int h, int w) -> const PriorSet& {
    const auto key = std::make_tuple(s, h, w);
    auto it = priors.find(key);
    if (it == priors.end()) {
      auto spec = make_pyramid(s, h, w);
      if (cfg.levels) spec.levels = *cfg.levels;
      it = priors.emplace(key, generate_priors(spec)).first;
    }
    return it->second;
  };

  BinAccumulator acc(cfg.bins, cap);
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    const auto& img = ds.images[i];
    std::vector<AssignResult> results;
    for (const auto& a : cfg.assigners) {
      if (per_image[i].empty()) {
        results.push_back({});
        continue;
      }
      const auto& p = priors_for(a.priors, img.height, img.width);
      results.push_back(run_assigner(a.assigner, per_image[i], p.boxes, jobs));
    }
    acc.add_run(per_image[i], results);
  }

  SimReport report;
  report.meta.source = "dataset";
  report.meta.dataset = cfg.dataset_name;
  report.meta.images = static_cast<std::int64_t>(ds.images.size());
  report.meta.runs = static_cast<int>(ds.images.size());
  report.meta.priors_clipped = false;
  report.assigners = acc.finalize(cfg.assigners);
  return report;
}

}  // namespace sodkit
