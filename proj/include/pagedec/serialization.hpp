#pragma once

// JSON forms of configs, regions, ground truth, page specs and reports.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pagedec/classify.hpp"
#include "pagedec/config.hpp"
#include "pagedec/harness.hpp"
#include "pagedec/pipeline.hpp"

namespace pagedec {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Config

namespace detail {

using FieldPtr = std::variant<double DecompositionConfig::*, int DecompositionConfig::*,
                              ScaledLength DecompositionConfig::*>;

struct ConfigField {
  const char* name;
  FieldPtr ptr;
};

// Order is the order of the JSON snapshot.
inline const std::vector<ConfigField>& config_fields() {
  using C = DecompositionConfig;
  static const std::vector<ConfigField> fields = {
      {"canny_sigma", &C::canny_sigma},
      {"canny_radius", &C::canny_radius},
      {"canny_low", &C::canny_low},
      {"canny_high", &C::canny_high},
      {"line_band_alpha", &C::line_band_alpha},
      {"binarize_threshold", &C::binarize_threshold},
      {"h_thresh", &C::h_thresh},
      {"v_thresh", &C::v_thresh},
      {"final_h", &C::final_h},
      {"final_v", &C::final_v},
      {"min_h_gap", &C::min_h_gap},
      {"min_v_gap", &C::min_v_gap},
      {"min_area_side", &C::min_area_side},
      {"gap1", &C::gap1},
      {"gap2", &C::gap2},
      {"x1", &C::x1},
      {"x2", &C::x2},
      {"x3", &C::x3},
      {"img_min_w", &C::img_min_w},
      {"img_min_h", &C::img_min_h},
      {"img_density_min", &C::img_density_min},
      {"img_density_max", &C::img_density_max},
      {"img_aspect_min", &C::img_aspect_min},
      {"img_aspect_max", &C::img_aspect_max},
      {"skew_half_range", &C::skew_half_range},
      {"skew_coarse_step", &C::skew_coarse_step},
      {"skew_fine_step", &C::skew_fine_step},
      {"skew_credible_ratio", &C::skew_credible_ratio},
      {"fallback_top_fraction", &C::fallback_top_fraction},
      {"text_band_ratio", &C::text_band_ratio},
      {"orient_min_line_height", &C::orient_min_line_height},
  };
  return fields;
}

inline double number_for(const std::string& key, const Json& v) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(key, "expected a finite number");
  return d;
}

inline int integer_for(const std::string& key, const Json& v) {
  const double d = number_for(key, v);
  if (d != std::floor(d)) throw ConfigError(key, "expected an integer");
  return static_cast<int>(d);
}

}  // namespace detail

/// Flat JSON object. Scale-relative lengths appear twice: `<name>` holds the
/// absolute pixel override (null when unset) and `<name>_factor` the multiple
/// of the line scale.
[[nodiscard]] inline Json config_to_json(const DecompositionConfig& cfg) {
  Json j = Json::object();
  for (const auto& f : detail::config_fields()) {
    std::visit(
        [&](auto ptr) {
          const auto& v = cfg.*ptr;
          if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ScaledLength>) {
            j[f.name] = v.pixels ? Json(*v.pixels) : Json(nullptr);
            j[std::string(f.name) + "_factor"] = v.factor;
          } else {
            j[f.name] = v;
          }
        },
        f.ptr);
  }
  return j;
}

/// Applies one key to `cfg`. Throws ConfigError for unknown keys and bad types.
inline void apply_config_value(DecompositionConfig& cfg, const std::string& key,
                               const Json& value) {
  for (const auto& f : detail::config_fields()) {
    const std::string name = f.name;
    const bool factor_key = key == name + "_factor";
    if (key != name && !factor_key) continue;
    std::visit(
        [&](auto ptr) {
          auto& field = cfg.*ptr;
          using T = std::decay_t<decltype(field)>;
          if constexpr (std::is_same_v<T, ScaledLength>) {
            if (factor_key) {
              field.factor = detail::number_for(key, value);
            } else if (value.is_null()) {
              field.pixels.reset();
            } else {
              field.pixels = detail::number_for(key, value);
            }
          } else if (factor_key) {
            throw ConfigError(key, "unknown configuration key");
          } else if constexpr (std::is_same_v<T, int>) {
            field = detail::integer_for(key, value);
          } else {
            field = detail::number_for(key, value);
          }
        },
        f.ptr);
    return;
  }
  throw ConfigError(key, "unknown configuration key");
}

/// Overlays the keys of `j` on `base`; the result is validated.
[[nodiscard]] inline DecompositionConfig config_from_json(const Json& j,
                                                          DecompositionConfig base = {}) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [key, value] : j.items()) apply_config_value(base, key, value);
  validate(base);
  return base;
}

/// `key=value` from the command line; the value is read as JSON, so `null`
/// clears a pixel override.
inline void apply_config_assignment(DecompositionConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "expected key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    throw ConfigError(key, "value is not a number or null: " + text);
  }
  apply_config_value(cfg, key, value);
}

[[nodiscard]] inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

[[nodiscard]] inline DecompositionConfig load_config(const std::filesystem::path& path,
                                                     DecompositionConfig base = {}) {
  return config_from_json(read_json_file(path), base);
}

// ---------------------------------------------------------------------------
// Geometry and regions

[[nodiscard]] inline Json bbox_to_json(const BBox& b) { return Json::array({b.x0, b.y0, b.x1, b.y1}); }

[[nodiscard]] inline BBox bbox_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 4) {
    throw std::invalid_argument(field + ": expected [x0, y0, x1, y1]");
  }
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw std::invalid_argument(field + ": expected integers");
  }
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

[[nodiscard]] inline Json orientation_to_json(const OrientResult& o) {
  Json j = Json::object();
  j["skew_degrees"] = o.skew ? o.skew->angle : 0.0;
  j["turns_applied"] = o.rotation ? o.rotation->turns : 0;
  return j;
}

/// regions.json: page size, orientation correction (null when skipped) and
/// the labeled regions with inclusive corners in the corrected page's frame.
[[nodiscard]] inline Json regions_to_json(const Decomposition& d) {
  Json j = Json::object();
  j["page"] = {{"width", d.page.width()}, {"height", d.page.height()}};
  j["orientation"] = d.orientation ? orientation_to_json(*d.orientation) : Json(nullptr);
  Json regions = Json::array();
  int id = 0;
  for (const auto& r : d.regions()) {
    Json e = Json::object();
    e["id"] = id++;
    e["label"] = std::string(to_string(r.label));
    e["bbox"] = bbox_to_json(r.box);
    e["line_height"] = r.line_height ? Json(*r.line_height) : Json(nullptr);
    regions.push_back(std::move(e));
  }
  j["regions"] = std::move(regions);
  return j;
}

/// Structural check against the published regions.json schema; returns an
/// empty string when valid, else the first problem found.
[[nodiscard]] inline std::string regions_schema_error(const Json& j) {
  const std::vector<std::string> top = {"page", "orientation", "regions"};
  if (!j.is_object() || j.size() != top.size()) return "root must hold page, orientation, regions";
  for (const auto& k : top)
    if (!j.contains(k)) return "missing " + k;
  const auto& page = j["page"];
  if (!page.is_object() || page.size() != 2 || !page.contains("width") ||
      !page.contains("height") || !page["width"].is_number_integer() ||
      !page["height"].is_number_integer()) {
    return "page must be {width:int, height:int}";
  }
  const auto& o = j["orientation"];
  if (!o.is_null()) {
    if (!o.is_object() || o.size() != 2 || !o.contains("skew_degrees") ||
        !o.contains("turns_applied") || !o["skew_degrees"].is_number() ||
        !o["turns_applied"].is_number_integer()) {
      return "orientation must be null or {skew_degrees:float, turns_applied:int}";
    }
    const int t = o["turns_applied"].get<int>();
    if (t < 0 || t > 3) return "turns_applied must lie in 0..3";
  }
  if (!j["regions"].is_array()) return "regions must be an array";
  const int w = page["width"].get<int>();
  const int h = page["height"].get<int>();
  int expected_id = 0;
  for (const auto& r : j["regions"]) {
    if (!r.is_object() || r.size() != 4) return "region must hold id, label, bbox, line_height";
    if (!r.contains("id") || !r["id"].is_number_integer() || r["id"].get<int>() != expected_id++) {
      return "region ids must count up from 0";
    }
    if (!r.contains("label") || !r["label"].is_string() ||
        !label_from_string(r["label"].get<std::string>())) {
      return "region label must be image, headline, subheadline or column";
    }
    if (!r.contains("bbox")) return "region needs bbox";
    BBox b;
    try {
      b = bbox_from_json(r["bbox"], "bbox");
    } catch (const std::exception& e) {
      return e.what();
    }
    if (!b.valid() || b.x0 < 0 || b.y0 < 0 || b.x1 >= w || b.y1 >= h) {
      return "bbox must be a non-empty box inside the page";
    }
    if (!r.contains("line_height") ||
        !(r["line_height"].is_null() || r["line_height"].is_number_integer())) {
      return "line_height must be int or null";
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Run manifest

[[nodiscard]] inline Json manifest_to_json(const std::string& input, const DecompositionConfig& cfg,
                                           const Decomposition& d) {
  Json j = Json::object();
  j["input"] = input;
  j["tool_version"] = std::string(kToolVersion);
  j["config"] = config_to_json(cfg);
  const auto& t = d.thresholds;
  Json resolved = Json::object();
  resolved["line_scale"] = t.line_scale;
  resolved["h_thresh"] = t.h_thresh;
  resolved["v_thresh"] = t.v_thresh;
  resolved["final_h"] = t.final_h;
  resolved["final_v"] = t.final_v;
  resolved["min_h_gap"] = t.min_h_gap;
  resolved["min_v_gap"] = t.min_v_gap;
  resolved["min_area"] = t.min_area;
  resolved["img_min_w"] = t.img_min_w;
  resolved["img_min_h"] = t.img_min_h;
  if (d.classification.dominant_line_height) {
    const auto& r = *d.classification.text_rules;
    resolved["dominant_line_height"] = *d.classification.dominant_line_height;
    resolved["gap1"] = r.gap1;
    resolved["gap2"] = r.gap2;
    resolved["x1"] = r.x1;
    resolved["x2"] = r.x2;
    resolved["x3"] = r.x3;
  } else {
    resolved["dominant_line_height"] = nullptr;
  }
  j["resolved"] = std::move(resolved);
  Json flags = Json::array();
  if (d.orientation && d.orientation->no_content) flags.push_back("no content");
  if (d.orientation && d.orientation->undecidable) flags.push_back("orientation undecidable");
  if (d.no_text_lines) flags.push_back("no text lines");
  j["flags"] = std::move(flags);
  j["timings_ms"] = {{"orient", d.timings.orient_ms},   {"edges", d.timings.edges_ms},
                     {"smear", d.timings.smear_ms},     {"segment", d.timings.segment_ms},
                     {"classify", d.timings.classify_ms}};
  return j;
}

// ---------------------------------------------------------------------------
// Page specs and ground truth

[[nodiscard]] inline Json spec_to_json(const PageSpec& s) {
  Json j = Json::object();
  j["width"] = s.width;
  j["height"] = s.height;
  j["seed"] = s.seed;
  j["body_line_height"] = s.body_line_height;
  j["column_count"] = s.column_count;
  j["headline_present"] = s.headline_present;
  j["subheadline_present"] = s.subheadline_present;
  Json blocks = Json::array();
  for (const auto& f : s.image_blocks) blocks.push_back(Json::array({f[0], f[1], f[2], f[3]}));
  j["image_blocks"] = std::move(blocks);
  j["skew"] = s.skew;
  j["turns"] = s.turns;
  j["noise_density"] = s.noise_density;
  return j;
}

/// Missing fields keep their defaults; unknown or mistyped fields throw
/// LayoutError naming the field.
[[nodiscard]] inline PageSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw LayoutError("page spec must be a JSON object");
  PageSpec s;
  auto need = [](bool ok, const std::string& key, const char* what) {
    if (!ok) throw LayoutError(key + ": expected " + what);
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "width" || key == "height" || key == "body_line_height" ||
        key == "column_count" || key == "turns") {
      need(v.is_number_integer(), key, "an integer");
      const int n = v.get<int>();
      if (key == "width") s.width = n;
      else if (key == "height") s.height = n;
      else if (key == "body_line_height") s.body_line_height = n;
      else if (key == "column_count") s.column_count = n;
      else s.turns = n;
    } else if (key == "seed") {
      need(v.is_number_unsigned(), key, "an unsigned integer");
      s.seed = v.get<std::uint64_t>();
    } else if (key == "headline_present" || key == "subheadline_present") {
      need(v.is_boolean(), key, "a boolean");
      (key == "headline_present" ? s.headline_present : s.subheadline_present) = v.get<bool>();
    } else if (key == "skew" || key == "noise_density") {
      need(v.is_number(), key, "a number");
      (key == "skew" ? s.skew : s.noise_density) = v.get<double>();
    } else if (key == "image_blocks") {
      need(v.is_array(), key, "a list of [x0, y0, x1, y1] fractions");
      for (const auto& b : v) {
        need(b.is_array() && b.size() == 4, key, "a list of [x0, y0, x1, y1] fractions");
        FracBox f{};
        for (std::size_t i = 0; i < 4; ++i) {
          need(b[i].is_number(), key, "numeric fractions");
          f[i] = b[i].get<double>();
        }
        s.image_blocks.push_back(f);
      }
    } else {
      throw LayoutError(key + ": unknown page spec field");
    }
  }
  validate(s);
  return s;
}

[[nodiscard]] inline Json truth_to_json(const GroundTruth& t) {
  Json j = Json::object();
  j["width"] = t.width;
  j["height"] = t.height;
  j["skew"] = t.skew;
  j["turns"] = t.turns;
  Json regions = Json::array();
  for (const auto& r : t.regions) {
    regions.push_back({{"label", std::string(to_string(r.label))}, {"bbox", bbox_to_json(r.box)}});
  }
  j["regions"] = std::move(regions);
  return j;
}

[[nodiscard]] inline GroundTruth truth_from_json(const Json& j) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("ground truth: ") + what);
  };
  need(j.is_object(), "must be a JSON object");
  for (const char* k : {"width", "height", "skew", "turns", "regions"}) {
    need(j.contains(k), (std::string("missing ") + k).c_str());
  }
  GroundTruth t;
  need(j["width"].is_number_integer() && j["height"].is_number_integer(), "bad page size");
  t.width = j["width"].get<int>();
  t.height = j["height"].get<int>();
  need(j["skew"].is_number(), "skew must be a number");
  t.skew = j["skew"].get<double>();
  need(j["turns"].is_number_integer(), "turns must be an integer");
  t.turns = j["turns"].get<int>();
  need(t.turns >= 0 && t.turns <= 3, "turns must lie in 0..3");
  need(j["regions"].is_array(), "regions must be an array");
  for (const auto& r : j["regions"]) {
    need(r.is_object() && r.contains("label") && r.contains("bbox"), "region needs label and bbox");
    need(r["label"].is_string(), "label must be a string");
    const auto label = label_from_string(r["label"].get<std::string>());
    need(label.has_value(), "unknown label");
    t.regions.push_back({bbox_from_json(r["bbox"], "bbox"), *label});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Reports

[[nodiscard]] inline Json counts_to_json(const ClassCounts& c) {
  Json j = Json::object();
  j["precision"] = c.precision();
  j["recall"] = c.recall();
  j["accuracy"] = c.accuracy();
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["tn"] = c.tn;
  return j;
}

/// `names` labels each page (input file names for on-disk corpora).
[[nodiscard]] inline Json corpus_report_to_json(const CorpusReport& r,
                                                const std::vector<std::string>& names,
                                                double iou_min) {
  Json j = Json::object();
  j["pages"] = r.pages.size();
  j["iou_min"] = iou_min;
  Json classes = Json::object();
  for (ElementLabel l : kAllLabels) classes[std::string(to_string(l))] = counts_to_json(r.aggregate[l]);
  j["classes"] = std::move(classes);
  int within = 0;
  for (const auto& p : r.pages) within += std::abs(p.skew_error()) <= kSkewTolerance ? 1 : 0;
  j["skew"] = {{"mean_abs_error", r.mean_abs_skew_error},
               {"max_abs_error", r.max_abs_skew_error},
               {"tolerance", kSkewTolerance},
               {"within_tolerance", within}};
  j["rotation_accuracy"] = r.rotation_accuracy;
  j["full_correction_rate"] = r.full_correction_rate;
  j["failures"] = r.failures;
  Json pages = Json::array();
  for (std::size_t i = 0; i < r.pages.size(); ++i) {
    const auto& p = r.pages[i];
    Json e = Json::object();
    e["name"] = i < names.size() ? names[i] : std::to_string(i);
    e["skew_truth"] = p.skew_truth;
    e["skew_estimate"] = p.skew_estimate ? Json(*p.skew_estimate) : Json(nullptr);
    e["turns_truth"] = p.turns_truth;
    e["turns_applied"] = p.turns_applied;
    e["fully_corrected"] = p.fully_corrected(kSkewTolerance);
    e["error"] = p.error ? Json(*p.error) : Json(nullptr);
    pages.push_back(std::move(e));
  }
  j["page_results"] = std::move(pages);
  Json matches = Json::array();
  for (const auto& m : r.aggregate.matches) {
    matches.push_back({{"page", m.page},
                       {"predicted", m.predicted},
                       {"truth", m.truth},
                       {"label", std::string(to_string(m.label))},
                       {"iou", m.iou}});
  }
  j["matches"] = std::move(matches);
  return j;
}

}  // namespace pagedec
