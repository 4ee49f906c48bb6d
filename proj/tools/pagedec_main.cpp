// pagedec: page decomposition for Bangla newspaper scans.

#include <iostream>

#include "CLI11.hpp"
#include "pagedec/commands.hpp"

namespace {

void add_shared(CLI::App* cmd, pagedec::CommandOptions& o) {
  cmd->add_option("--config", o.config, "JSON config file (falls back to $DECOMPOSE_CONFIG)");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--set", o.overrides, "override one config key, key=value (repeatable)");
  cmd->add_flag("--verbose,-v", o.verbose, "print progress");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bangla newspaper page decomposition"};
  app.require_subcommand(1);
  pagedec::CommandOptions o;
  std::string input;

  auto* dec = app.add_subcommand("decompose", "label the regions of one page");
  dec->add_option("input", input, "page image (PNG or PGM)")->required();
  add_shared(dec, o);
  dec->add_flag("--no-orient", o.no_orient, "skip skew and rotation correction");
  dec->add_flag("--save-crops", o.save_crops, "write one image per region under crops/");

  auto* desk = app.add_subcommand("deskew", "correct skew and quarter-turn rotation");
  desk->add_option("input", input, "page image (PNG or PGM)")->required();
  add_shared(desk, o);

  std::string preset;
  int count = 0;
  auto* syn = app.add_subcommand("synth", "render synthetic pages with ground truth");
  syn->add_option("spec", input, "JSON array of page specs");
  syn->add_option("--preset", preset, "built-in corpus instead of a spec file")
      ->check(CLI::IsMember({"deskew", "rotation", "layout"}));
  syn->add_option("--count", count, "pages for --preset")->check(CLI::PositiveNumber);
  syn->add_option("--seed", o.seed, "page i uses seed + i");
  add_shared(syn, o);

  auto* ev = app.add_subcommand("eval", "score a synthetic corpus directory");
  ev->add_option("corpus", input, "directory of page_NNN.png + truth_NNN.json")->required();
  add_shared(ev, o);
  ev->add_flag("--no-orient", o.no_orient, "skip skew and rotation correction");
  ev->add_option("--iou-min", o.iou_min, "IoU needed for a match")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  ev->add_option("--workers", o.workers, "pages decomposed in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pagedec::kExitError;
  }

  if (*dec) return pagedec::cmd_decompose(input, o, std::cout, std::cerr);
  if (*desk) return pagedec::cmd_deskew(input, o, std::cout, std::cerr);
  if (*ev) return pagedec::cmd_eval(input, o, std::cout, std::cerr);
  if (!preset.empty() == !input.empty()) {
    std::cerr << "error: synth needs a spec file or --preset, not both\n";
    return pagedec::kExitError;
  }
  if (!input.empty()) return pagedec::cmd_synth(input, o, std::cout, std::cerr);
  const std::uint64_t seed = o.seed.value_or(1);
  o.seed.reset();  // presets derive per-page seeds themselves
  const auto specs = preset == "deskew"     ? pagedec::deskew_corpus(count ? count : 70, seed)
                     : preset == "rotation" ? pagedec::rotation_corpus(count ? count : 70, seed)
                                            : pagedec::layout_corpus(count ? count : 50, seed);
  return pagedec::write_synth_corpus(specs, o, std::cout, std::cerr);
}
