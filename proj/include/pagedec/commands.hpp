#pragma once

// Subcommand implementations behind the command-line front end. Kept free of
// argument parsing so tests can drive them directly.

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pagedec/harness.hpp"
#include "pagedec/image_io.hpp"
#include "pagedec/pipeline.hpp"
#include "pagedec/serialization.hpp"

namespace pagedec {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitFlagged = 2 };

inline constexpr const char* kConfigEnvVar = "DECOMPOSE_CONFIG";

struct CommandOptions {
  std::optional<fs::path> config;
  fs::path out = ".";
  bool no_orient = false;
  bool save_crops = false;
  double iou_min = 0.5;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  std::vector<std::string> overrides;  // key=value, applied after the file
  int workers = 1;
};

/// Built-in defaults, then the config file (--config, else DECOMPOSE_CONFIG),
/// then --set overrides.
[[nodiscard]] inline DecompositionConfig resolve_config(const CommandOptions& o) {
  DecompositionConfig cfg;
  std::optional<fs::path> path = o.config;
  if (!path) {
    if (const char* env = std::getenv(kConfigEnvVar); env && *env) path = fs::path(env);
  }
  if (path) cfg = load_config(*path, cfg);
  for (const auto& a : o.overrides) apply_config_assignment(cfg, a);
  validate(cfg);
  return cfg;
}

// Overlay colors, one per label (see README).
[[nodiscard]] constexpr std::array<std::uint8_t, 3> label_color(ElementLabel l) {
  switch (l) {
    case ElementLabel::Image: return {220, 30, 30};
    case ElementLabel::Headline: return {30, 70, 220};
    case ElementLabel::SubHeadline: return {245, 140, 0};
    case ElementLabel::Column: return {20, 160, 60};
  }
  return {0, 0, 0};
}

/// The page in gray with each region outlined two pixels thick.
[[nodiscard]] inline RgbImage render_overlay(const GrayImage& page,
                                             const std::vector<Region>& regions) {
  RgbImage out(page.width(), page.height());
  for (int y = 0; y < page.height(); ++y)
    for (int x = 0; x < page.width(); ++x) {
      const auto v = page(x, y);
      out.set(x, y, {v, v, v});
    }
  for (const auto& r : regions) {
    const auto c = label_color(r.label);
    const BBox b = r.box;
    for (int t = 0; t < 2; ++t) {
      for (int x = b.x0; x <= b.x1; ++x) {
        if (b.y0 + t <= b.y1) out.set(x, b.y0 + t, c);
        if (b.y1 - t >= b.y0) out.set(x, b.y1 - t, c);
      }
      for (int y = b.y0; y <= b.y1; ++y) {
        if (b.x0 + t <= b.x1) out.set(b.x0 + t, y, c);
        if (b.x1 - t >= b.x0) out.set(b.x1 - t, y, c);
      }
    }
  }
  return out;
}

namespace detail {

inline std::string numbered(const char* prefix, std::size_t i, const std::string& suffix) {
  std::ostringstream s;
  s << prefix << std::setw(3) << std::setfill('0') << i << suffix;
  return s.str();
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  }
}

}  // namespace detail

/// decompose: regions.json, overlay.png, manifest.json, config.json and, on
/// request, one crop per region. Exit 2 when orientation was flagged.
inline int cmd_decompose(const fs::path& input, const CommandOptions& o, std::ostream& out,
                         std::ostream& err) {
  try {
    const DecompositionConfig cfg = resolve_config(o);
    const GrayImage page = load_page(input);
    const Decomposition d = decompose(page, cfg, !o.no_orient);
    detail::ensure_dir(o.out);
    write_json_file(o.out / "regions.json", regions_to_json(d));
    write_json_file(o.out / "config.json", config_to_json(cfg));
    write_json_file(o.out / "manifest.json", manifest_to_json(input.string(), cfg, d));
    save_png(render_overlay(d.page, d.regions()), o.out / "overlay.png");
    if (o.save_crops) {
      const fs::path crops = o.out / "crops";
      detail::ensure_dir(crops);
      for (std::size_t i = 0; i < d.regions().size(); ++i) {
        const auto& r = d.regions()[i];
        save_png(crop(d.page, r.box),
                 crops / detail::numbered("", i, "_" + std::string(to_string(r.label)) + ".png"));
      }
    }
    if (o.verbose) {
      out << input.string() << ": " << d.regions().size() << " regions, line scale "
          << d.thresholds.line_scale << " px\n";
    }
    if (d.orientation && (d.orientation->undecidable || d.orientation->no_content)) {
      err << "warning: " << (d.orientation->no_content ? "no content" : "orientation undecidable")
          << "; page left unrotated\n";
      return kExitFlagged;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: invalid config: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

/// deskew: corrected.png plus deskew.json. Exit 2 for blank or undecidable
/// pages.
inline int cmd_deskew(const fs::path& input, const CommandOptions& o, std::ostream& out,
                      std::ostream& err) {
  try {
    const DecompositionConfig cfg = resolve_config(o);
    const GrayImage page = load_page(input);
    const OrientResult r = auto_orient(page, cfg);
    detail::ensure_dir(o.out);
    save_png(r.page, o.out / "corrected.png");
    Json j = Json::object();
    j["skew_degrees"] = r.skew ? r.skew->angle : 0.0;
    j["turns_applied"] = r.rotation ? r.rotation->turns : 0;
    j["pixel_ratio_0"] = r.rotation ? Json(r.rotation->pixel_ratio_0) : Json(nullptr);
    j["pixel_ratio_90"] = r.rotation ? Json(r.rotation->pixel_ratio_90) : Json(nullptr);
    Json flags = Json::array();
    if (r.no_content) flags.push_back("no content");
    if (r.undecidable) flags.push_back("orientation undecidable");
    j["flags"] = flags;
    write_json_file(o.out / "deskew.json", j);
    if (o.verbose) out << j.dump() << '\n';
    if (r.no_content || r.undecidable) {
      err << "warning: " << (r.no_content ? "no content" : "orientation undecidable") << '\n';
      return kExitFlagged;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: invalid config: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

/// Writes page_NNN.png and truth_NNN.json per spec. With a seed, page i uses
/// seed + i instead of its own.
inline int write_synth_corpus(const std::vector<PageSpec>& specs, const CommandOptions& o,
                              std::ostream& out, std::ostream& err) {
  try {
    detail::ensure_dir(o.out);
    for (std::size_t i = 0; i < specs.size(); ++i) {
      PageSpec s = specs[i];
      if (o.seed) s.seed = *o.seed + i;
      const SynthPage p = synth_page(s);
      save_png(p.image, o.out / detail::numbered("page_", i, ".png"));
      write_json_file(o.out / detail::numbered("truth_", i, ".json"), truth_to_json(p.truth));
    }
    if (o.verbose) out << specs.size() << " pages written to " << o.out.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

inline int cmd_synth(const fs::path& spec_file, const CommandOptions& o, std::ostream& out,
                     std::ostream& err) {
  std::vector<PageSpec> specs;
  try {
    const Json j = read_json_file(spec_file);
    if (!j.is_array()) throw LayoutError("spec file must hold a JSON array of page specs");
    for (std::size_t i = 0; i < j.size(); ++i) {
      try {
        specs.push_back(spec_from_json(j[i]));
      } catch (const std::exception& e) {
        throw LayoutError("spec " + std::to_string(i) + ": " + e.what());
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return write_synth_corpus(specs, o, out, err);
}

/// Page images of a corpus directory and their truth files, in file name order.
struct CorpusEntry {
  fs::path page;
  fs::path truth;
};

[[nodiscard]] inline std::vector<CorpusEntry> scan_corpus(const fs::path& dir,
                                                          std::vector<std::string>& warnings) {
  std::vector<fs::path> pages;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".png" || ext == ".pgm")) pages.push_back(e.path());
  }
  std::sort(pages.begin(), pages.end());
  std::vector<CorpusEntry> out;
  for (const auto& p : pages) {
    std::string stem = p.stem().string();
    if (stem.rfind("page_", 0) == 0) stem.replace(0, 5, "truth_");
    else stem = "truth_" + stem;
    const fs::path truth = dir / (stem + ".json");
    if (!fs::exists(truth)) {
      warnings.push_back("missing truth for " + p.filename().string() + "; skipped");
      continue;
    }
    out.push_back({p, truth});
  }
  return out;
}

/// Table 1 layout: Images, Headlines, Sub-headlines, Columns.
inline void print_table(const CorpusReport& r, std::ostream& out) {
  static constexpr std::array<std::pair<ElementLabel, const char*>, 4> rows = {{
      {ElementLabel::Image, "Images"},
      {ElementLabel::Headline, "Headlines"},
      {ElementLabel::SubHeadline, "Sub-headlines"},
      {ElementLabel::Column, "Columns"},
  }};
  out << std::left << std::setw(15) << "Element" << std::right << std::setw(11) << "Precision"
      << std::setw(10) << "Recall" << std::setw(10) << "Accuracy" << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& [label, name] : rows) {
    const auto& c = r.aggregate[label];
    out << std::left << std::setw(15) << name << std::right << std::setw(10)
        << 100.0 * c.precision() << '%' << std::setw(9) << 100.0 * c.recall() << '%'
        << std::setw(9) << 100.0 * c.accuracy() << "%\n";
  }
  out << std::setprecision(3) << "skew |error| mean " << r.mean_abs_skew_error << " deg, max "
      << r.max_abs_skew_error << " deg\n";
  out << std::setprecision(2) << "rotation accuracy " << 100.0 * r.rotation_accuracy
      << "%, fully corrected " << 100.0 * r.full_correction_rate << "%\n";
  out.unsetf(std::ios::floatfield);
}

/// eval: decomposes every page of a corpus directory against its truth and
/// writes report.json. Pages without truth are skipped with a warning.
inline int cmd_eval(const fs::path& corpus_dir, const CommandOptions& o, std::ostream& out,
                    std::ostream& err) {
  try {
    const DecompositionConfig cfg = resolve_config(o);
    if (!fs::is_directory(corpus_dir)) {
      err << "error: no pages found: " << corpus_dir.string() << " is not a directory\n";
      return kExitError;
    }
    std::vector<std::string> warnings;
    const auto entries = scan_corpus(corpus_dir, warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    if (entries.empty()) {
      err << "error: no pages found in " << corpus_dir.string() << '\n';
      return kExitError;
    }
    const CorpusReport report = fold_outcomes(
        entries.size(),
        [&](std::size_t i) {
          try {
            const GroundTruth truth = truth_from_json(read_json_file(entries[i].truth));
            return evaluate_page(load_page(entries[i].page), truth, cfg, o.iou_min,
                                 static_cast<int>(i), !o.no_orient);
          } catch (const std::exception& e) {
            PageOutcome p;
            p.index = static_cast<int>(i);
            p.error = e.what();
            return p;
          }
        },
        o.workers);
    std::vector<std::string> names;
    for (const auto& e : entries) names.push_back(e.page.filename().string());
    for (const auto& p : report.pages) {
      if (p.error) err << "warning: " << names[p.index] << ": " << *p.error << '\n';
    }
    detail::ensure_dir(o.out);
    write_json_file(o.out / "report.json", corpus_report_to_json(report, names, o.iou_min));
    print_table(report, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: invalid config: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace pagedec
