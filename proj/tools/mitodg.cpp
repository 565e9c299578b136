// Copyright 2026 The mitodg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mitodg/app/commands.hpp"
#include "mitodg/app/detections_io.hpp"
#include "mitodg/app/files.hpp"
#include "mitodg/app/run_config.hpp"
#include "mitodg/core/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
namespace app = mitodg::app;

/// Config file plus `--set a.b=value` overrides; values parse as JSON and
/// fall back to plain strings.
struct ConfigOptions {
  std::string path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  int workers = 0;

  void attach(CLI::App* cmd, bool with_seed) {
    cmd->add_option("--config", path, "RunConfig JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--set", sets, "Override a config field, e.g. --set tiling.overlap=32");
    cmd->add_option("--workers", workers, "Worker threads (default from config)");
    if (with_seed) cmd->add_option("--seed", seed, "Root seed (required unless the config has one)");
  }

  mitodg::RunConfig load() const {
    json j = path.empty() ? json::object() : json::parse(mitodg::read_text_file(path));
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw mitodg::Error(mitodg::ErrorCode::kInvalidArgument,
                            "--set expects key.path=value, got '" + s + "'");
      }
      std::string pointer = "/" + s.substr(0, eq);
      std::replace(pointer.begin(), pointer.end(), '.', '/');
      const std::string raw = s.substr(eq + 1);
      json value = json::parse(raw, nullptr, false);
      if (value.is_discarded()) value = raw;
      j[json::json_pointer(pointer)] = value;
    }
    auto config = mitodg::run_config_from_json(j);
    if (workers > 0) config.workers = workers;
    if (seed) config.seed = seed;
    return config;
  }
};

std::uint64_t require_seed(const mitodg::RunConfig& config) {
  if (!config.seed) {
    throw mitodg::Error(mitodg::ErrorCode::kInvalidArgument,
                        "this command is stochastic: pass --seed or set \"seed\" in the config");
  }
  return *config.seed;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    mitodg::write_file_atomic(out, j.dump(2) + "\n");
  }
}

template <typename T>
std::vector<T> split_list(const std::string& text, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(parse(item));
  }
  return out;
}

mitodg::TransformKind parse_kind(const std::string& name) {
  if (auto k = mitodg::parse_transform_kind(name)) return *k;
  throw mitodg::Error(mitodg::ErrorCode::kInvalidArgument, "unknown transform '" + name + "'");
}

double parse_double(const std::string& s) { return std::stod(s); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"mitodg: augmentation, sampling, anchor search, tiling and evaluation tools"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", std::string(mitodg::kToolVersion));
  std::function<void()> action;

  // ingest
  {
    auto* cmd = cli.add_subcommand("ingest", "Validate a manifest and summarise it");
    auto manifest = std::make_shared<std::string>();
    auto root = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--manifest", *manifest)->required()->check(CLI::ExistingFile);
    cmd->add_option("--image-root", *root, "Directory holding the rasters");
    cmd->add_option("--out", *out, "Report path (default stdout)");
    cmd->callback([&action, manifest, root, out] {
      action = [=] {
        const auto r = app::ingest(*manifest, *root);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        emit(r.report, *out);
      };
    });
  }

  // preview
  {
    auto* cmd = cli.add_subcommand("preview", "Render an augmentation grid (kinds x strengths)");
    auto cfg = std::make_shared<ConfigOptions>();
    auto image = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto kinds = std::make_shared<std::string>();
    auto strengths = std::make_shared<std::string>("0.25,0.5,1.0");
    cfg->attach(cmd, true);
    cmd->add_option("--image", *image)->required();
    cmd->add_option("--out", *out, "Output PNG")->required();
    cmd->add_option("--kinds", *kinds, "Comma-separated transform names (default all 19)");
    cmd->add_option("--strengths", *strengths, "Comma-separated strengths in [0, 1]");
    cmd->callback([&action, cfg, image, out, kinds, strengths] {
      action = [=] {
        const auto config = cfg->load();
        app::PreviewOptions opts;
        opts.params = config.policy.params;
        if (!kinds->empty()) opts.kinds = split_list<mitodg::TransformKind>(*kinds, parse_kind);
        opts.strengths = split_list<double>(*strengths, parse_double);
        const auto grid = app::preview(*image, opts, require_seed(config), *out);
        std::cout << json{{"out", *out}, {"width", grid.width()}, {"height", grid.height()},
                          {"rows", opts.kinds.size()}, {"columns", opts.strengths.size()}}
                         .dump()
                  << "\n";
      };
    });
  }

  // split-folds
  {
    auto* cmd = cli.add_subcommand("split-folds", "Build per-scanner folds");
    auto cfg = std::make_shared<ConfigOptions>();
    auto manifest = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto n_folds = std::make_shared<std::optional<int>>();
    cfg->attach(cmd, true);
    cmd->add_option("--manifest", *manifest)->required()->check(CLI::ExistingFile);
    cmd->add_option("--n-folds", *n_folds, "Number of folds (default pipeline.n_folds)");
    cmd->add_option("--out", *out, "folds.json path")->required();
    cmd->callback([&action, cfg, manifest, out, n_folds] {
      action = [=] {
        const auto config = cfg->load();
        const auto m = mitodg::load_manifest(*manifest);
        const auto folds = app::split_folds(m, n_folds->value_or(config.pipeline.n_folds),
                                            require_seed(config), *out);
        std::cout << json{{"folds", folds.size()}, {"out", *out}}.dump() << "\n";
      };
    });
  }

  // sample
  {
    auto* cmd = cli.add_subcommand("sample", "Draw annotation-centred training patches");
    auto cfg = std::make_shared<ConfigOptions>();
    auto manifest = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>();
    auto subset = std::make_shared<std::string>("train");
    auto opts = std::make_shared<app::SampleOptions>();
    auto n_folds = std::make_shared<std::optional<int>>();
    cfg->attach(cmd, true);
    cmd->add_option("--manifest", *manifest)->required()->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", *out_dir)->required();
    cmd->add_option("--count", opts->count, "Number of patches");
    cmd->add_option("--subset", *subset, "train, val, test, trainval or all");
    cmd->add_option("--fold", opts->fold, "Fold index");
    cmd->add_option("--n-folds", *n_folds, "Number of folds (default pipeline.n_folds)");
    cmd->add_flag("--augment", opts->augment, "Apply the augmentation policy to each patch");
    cmd->callback([&action, cfg, manifest, out_dir, subset, opts, n_folds] {
      action = [=] {
        const auto config = cfg->load();
        auto o = *opts;
        o.subset = app::parse_subset(*subset);
        o.n_folds = n_folds->value_or(config.pipeline.n_folds);
        std::cout << app::sample(*manifest, config, o, require_seed(config), *out_dir).dump()
                  << "\n";
      };
    });
  }

  // optimize-anchors
  {
    auto* cmd = cli.add_subcommand("optimize-anchors", "Differential-evolution anchor scale search");
    auto cfg = std::make_shared<ConfigOptions>();
    auto manifest = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto objective = std::make_shared<std::string>("mean_max_iou");
    cfg->attach(cmd, true);
    cmd->add_option("--manifest", *manifest)->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "Report path (default stdout)");
    cmd->add_option("--objective", *objective, "mean_max_iou or recall_at_iou50")
        ->check(CLI::IsMember({"mean_max_iou", "recall_at_iou50"}));
    cmd->callback([&action, cfg, manifest, out, objective] {
      action = [=] {
        const auto config = cfg->load();
        const auto m = mitodg::load_manifest(*manifest);
        const auto obj = *objective == "mean_max_iou" ? mitodg::FitnessObjective::kMeanMaxIou
                                                      : mitodg::FitnessObjective::kRecallAtIou50;
        const auto j = app::optimize_anchors(m, config, require_seed(config), obj, *out);
        if (out->empty()) std::cout << j.dump(2) << "\n";
      };
    });
  }

  // tile
  {
    auto* cmd = cli.add_subcommand("tile", "Tiled inference with the mock or a file detector");
    auto cfg = std::make_shared<ConfigOptions>();
    auto image = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto opts = std::make_shared<app::TileOptions>();
    auto manifest = std::make_shared<std::string>();
    auto detections = std::make_shared<std::string>();
    auto emit_dir = std::make_shared<std::string>();
    cfg->attach(cmd, true);
    cmd->add_option("--image", *image)->required();
    cmd->add_option("--out", *out, "Merged detections (JSON-lines)")->required();
    cmd->add_option("--image-id", opts->image_id, "Image id stamped on detections");
    auto* mock = cmd->add_option("--manifest", *manifest, "Ground truth for the mock detector");
    auto* file = cmd->add_option("--tile-detections", *detections,
                                 "Tile-frame detections from an external detector");
    mock->excludes(file);
    cmd->add_option("--emit-tiles", *emit_dir, "Also write every tile as PNG here");
    cmd->callback([&action, cfg, image, out, opts, manifest, detections, emit_dir] {
      action = [=] {
        const auto config = cfg->load();
        auto o = *opts;
        o.emit_tiles_dir = *emit_dir;
        std::uint64_t seed = 0;
        if (detections->empty()) {
          o.source = app::DetectorSource::kMock;
          o.manifest = *manifest;
          seed = require_seed(config);
        } else {
          o.source = app::DetectorSource::kTileFile;
          o.tile_detections = *detections;
        }
        std::cout << app::tile(*image, config, o, seed, *out).dump() << "\n";
      };
    });
  }

  // evaluate
  {
    auto* cmd = cli.add_subcommand("evaluate", "Score detections against a manifest");
    auto cfg = std::make_shared<ConfigOptions>();
    auto detections = std::make_shared<std::string>();
    auto manifest = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto csv = std::make_shared<std::string>();
    auto threshold = std::make_shared<double>(0.5);
    cfg->attach(cmd, false);
    cmd->add_option("--detections", *detections)->required()->check(CLI::ExistingFile);
    cmd->add_option("--manifest", *manifest)->required()->check(CLI::ExistingFile);
    cmd->add_option("--threshold", *threshold, "Confidence threshold");
    cmd->add_option("--out", *out, "Report path (default stdout)");
    cmd->add_option("--per-image-csv", *csv, "Optional per-image breakdown");
    cmd->callback([&action, cfg, detections, manifest, out, csv, threshold] {
      action = [=] {
        const auto config = cfg->load();
        const auto r = app::evaluate(mitodg::read_detections_jsonl(fs::path(*detections)),
                                     mitodg::load_manifest(*manifest), config.match, *threshold,
                                     *csv);
        emit(mitodg::to_json(r), *out);
      };
    });
  }

  // optimize-threshold
  {
    auto* cmd = cli.add_subcommand("optimize-threshold", "Pick the F1-optimal confidence threshold");
    auto cfg = std::make_shared<ConfigOptions>();
    auto detections = std::make_shared<std::string>();
    auto manifest = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto per_scanner = std::make_shared<bool>(false);
    cfg->attach(cmd, false);
    cmd->add_option("--detections", *detections)->required()->check(CLI::ExistingFile);
    cmd->add_option("--manifest", *manifest)->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "Report path (default stdout)");
    cmd->add_flag("--per-scanner", *per_scanner, "One threshold per scanner");
    cmd->callback([&action, cfg, detections, manifest, out, per_scanner] {
      action = [=] {
        const auto config = cfg->load();
        emit(app::optimize_threshold_report(mitodg::read_detections_jsonl(fs::path(*detections)),
                                            mitodg::load_manifest(*manifest), config.match,
                                            *per_scanner || config.pipeline.per_scanner_threshold),
             *out);
      };
    });
  }

  // pipeline
  {
    auto* cmd = cli.add_subcommand("pipeline", "folds -> tiled mock detection -> calibrated report");
    auto cfg = std::make_shared<ConfigOptions>();
    auto manifest = std::make_shared<std::string>();
    auto root = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>();
    cfg->attach(cmd, true);
    cmd->add_option("--manifest", *manifest, "Overrides paths.manifest");
    cmd->add_option("--image-root", *root, "Overrides paths.image_root");
    cmd->add_option("--out-dir", *out_dir, "Overrides paths.output_dir");
    cmd->callback([&action, cfg, manifest, root, out_dir] {
      action = [=] {
        auto config = cfg->load();
        if (!manifest->empty()) config.paths.manifest = *manifest;
        if (!root->empty()) config.paths.image_root = *root;
        if (!out_dir->empty()) config.paths.output_dir = *out_dir;
        const auto art = app::run_pipeline(config, require_seed(config));
        std::cout << json{{"report", art.report.string()},
                          {"f1", art.report_json.at("f1")},
                          {"provenance", art.provenance.string()}}
                         .dump()
                  << "\n";
      };
    });
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e);
  }
  try {
    action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
