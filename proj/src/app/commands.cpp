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
#include "mitodg/core/error.hpp"
#include "mitodg/core/raster_io.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace mitodg::app {

using nlohmann::json;

namespace {

json annotation_json(const Annotation& a) {
  return {{"id", a.id},
          {"image_id", a.image_id},
          {"bbox", {a.box.x_min, a.box.y_min, a.box.x_max, a.box.y_max}},
          {"center", {a.center.x, a.center.y}},
          {"category", std::string(to_string(a.label))}};
}

std::vector<Annotation> annotations_of(const DatasetManifest& manifest,
                                       const std::set<std::int64_t>& ids) {
  std::vector<Annotation> out;
  for (const auto& a : manifest.annotations) {
    if (ids.count(a.image_id)) out.push_back(a);
  }
  return out;
}

std::vector<DetectionRecord> detections_of(const std::vector<DetectionRecord>& detections,
                                           const std::set<std::int64_t>& ids) {
  std::vector<DetectionRecord> out;
  for (const auto& d : detections) {
    if (ids.count(d.image_id)) out.push_back(d);
  }
  return out;
}

std::string format_index(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05d", i);
  return buf;
}

/// Per-scanner thresholds (or a single pooled one under the key "") fitted
/// on the given detections and ground truth.
struct Calibration {
  bool per_scanner = false;
  EvalReport pooled;
  std::map<std::string, EvalReport> scanners;

  double threshold_for(const std::string& scanner) const {
    if (!per_scanner) return pooled.threshold;
    const auto it = scanners.find(scanner);
    return it == scanners.end() ? pooled.threshold : it->second.threshold;
  }
};

Calibration calibrate(const std::vector<DetectionRecord>& detections,
                      const std::vector<Annotation>& ground_truth, const ManifestIndex& index,
                      const MatchConfig& match, bool per_scanner) {
  Calibration c;
  c.per_scanner = per_scanner;
  c.pooled = optimize_threshold(detections, ground_truth, match);
  if (!per_scanner) return c;
  for (const auto& [scanner, ids] : index.by_scanner()) {
    const std::set<std::int64_t> id_set(ids.begin(), ids.end());
    const auto gt = [&] {
      std::vector<Annotation> out;
      for (const auto& a : ground_truth) {
        if (id_set.count(a.image_id)) out.push_back(a);
      }
      return out;
    }();
    const auto dets = detections_of(detections, id_set);
    if (gt.empty() && dets.empty()) continue;
    c.scanners[scanner] = optimize_threshold(dets, gt, match);
  }
  return c;
}

/// Evaluates with each image's scanner threshold and pools the counts.
EvalReport evaluate_calibrated(const std::vector<DetectionRecord>& detections,
                               const std::vector<Annotation>& ground_truth,
                               const ManifestIndex& index, const MatchConfig& match,
                               const Calibration& calibration) {
  if (!calibration.per_scanner) {
    return evaluate_at_threshold(detections, ground_truth, match, calibration.pooled.threshold);
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& [scanner, ids] : index.by_scanner()) {
    const std::set<std::int64_t> id_set(ids.begin(), ids.end());
    std::vector<Annotation> gt;
    for (const auto& a : ground_truth) {
      if (id_set.count(a.image_id)) gt.push_back(a);
    }
    const auto r = evaluate_at_threshold(detections_of(detections, id_set), gt, match,
                                         calibration.threshold_for(scanner));
    tp += r.tp;
    fp += r.fp;
    fn += r.fn;
  }
  return make_report(tp, fp, fn, std::numeric_limits<double>::quiet_NaN());
}

json report_json(const EvalReport& r, bool threshold_known) {
  json j = to_json(r);
  if (!threshold_known) j["threshold"] = nullptr;
  return j;
}

json calibration_json(const Calibration& c) {
  json j = {{"mode", c.per_scanner ? "per_scanner" : "pooled"}, {"pooled", to_json(c.pooled)}};
  if (c.per_scanner) {
    json per = json::object();
    for (const auto& [scanner, r] : c.scanners) per[scanner] = to_json(r);
    j["scanners"] = per;
  }
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <typename F>
auto run_stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("pipeline stage '") + name + "' failed: " + e.message());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kIoError,
                std::string("pipeline stage '") + name + "' failed: " + e.what());
  }
}

struct LoadedRaster {
  Rgb8Image image;
  bool synthesized = false;
};

/// Loads an image's raster and checks it against the manifest dimensions.
/// With `allow_missing`, an absent file becomes a mid-gray canvas.
LoadedRaster load_raster(const fs::path& path, const ImageEntry& entry, bool allow_missing) {
  if (allow_missing && !fs::exists(path)) {
    return {Rgb8Image(entry.width, entry.height, Rgb{128, 128, 128}), true};
  }
  LoadedRaster out{read_image(path), false};
  if (out.image.width() != entry.width || out.image.height() != entry.height) {
    throw Error(ErrorCode::kSchemaError,
                path.string() + ": raster is " + std::to_string(out.image.width()) + "x" +
                    std::to_string(out.image.height()) + " but the manifest says " +
                    std::to_string(entry.width) + "x" + std::to_string(entry.height));
  }
  return out;
}

/// Tiles one image with the mock detector and returns image-frame detections
/// whose centers lie inside the original (unpadded) extent.
std::vector<DetectionRecord> detect_mock(const Rgb8Image& image, const ImageEntry& entry,
                                         const std::vector<Annotation>& gt,
                                         const RunConfig& config, const RandomStream& rng,
                                         bool* padded) {
  const auto pad = pad_for_tiling(image, config.tiling);
  if (padded) *padded = pad.padded;
  const MockDetector mock(entry.id, pad.original, gt, config.pipeline.mock,
                          rng.derive("detector").derive(static_cast<std::uint64_t>(entry.id)));
  auto dets = run_tiled(pad.image, std::cref(mock), config.tiling, config.merge, config.workers,
                        entry.id);
  std::erase_if(dets, [&](const DetectionRecord& d) {
    return d.center.x >= pad.original.width || d.center.y >= pad.original.height;
  });
  return dets;
}

}  // namespace

fs::path resolve_image_path(const fs::path& manifest_path, const std::string& image_root,
                            const ImageEntry& entry) {
  const fs::path file(entry.file_name);
  if (file.is_absolute()) return file;
  const fs::path root = image_root.empty() ? manifest_path.parent_path() : fs::path(image_root);
  return root / file;
}

IngestResult ingest(const fs::path& manifest_path, const std::string& image_root) {
  IngestResult result;
  result.manifest = load_manifest(manifest_path);
  const ManifestIndex index(result.manifest);

  if (result.manifest.annotations.empty()) {
    result.warnings.push_back("manifest has no annotations");
  }
  json scanners = json::object();
  for (const auto& [scanner, ids] : index.by_scanner()) {
    scanners[scanner] = ids.size();
  }
  json labels = json::object();
  for (const auto& a : result.manifest.annotations) {
    auto& slot = labels[std::string(to_string(a.label))];
    slot = slot.is_null() ? 1 : slot.get<int>() + 1;
  }
  json missing = json::array();
  for (const auto& img : result.manifest.images) {
    const auto path = resolve_image_path(manifest_path, image_root, img);
    if (!fs::exists(path)) {
      missing.push_back(img.id);
      result.warnings.push_back("missing image file for id " + std::to_string(img.id) + ": " +
                                path.string());
    }
  }
  result.report = {{"images", result.manifest.images.size()},
                   {"annotations", result.manifest.annotations.size()},
                   {"scanners", scanners},
                   {"labels", labels},
                   {"missing_image_files", missing},
                   {"warnings", result.warnings}};
  return result;
}

Rgb8Image preview(const fs::path& image_path, const PreviewOptions& options, std::uint64_t seed,
                  const fs::path& out_png) {
  const auto image = read_image(image_path);
  auto grid = render_preview_grid(image, options.kinds, options.strengths,
                                  RandomStream(seed).derive("preview"), options.params);
  write_file_atomic(out_png, encode_png(grid));
  return grid;
}

std::vector<FoldSplit> split_folds(const DatasetManifest& manifest, int n_folds,
                                   std::uint64_t seed, const fs::path& out_json) {
  auto folds = make_folds(manifest, n_folds, RandomStream(seed).derive("folds"));
  if (!out_json.empty()) write_file_atomic(out_json, dump(to_json(folds)));
  return folds;
}

SplitSubset parse_subset(const std::string& name) {
  if (name == "train") return SplitSubset::kTrain;
  if (name == "val") return SplitSubset::kVal;
  if (name == "test") return SplitSubset::kTest;
  if (name == "trainval") return SplitSubset::kTrainVal;
  if (name == "all") return SplitSubset::kAll;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown subset '" + name + "' (expected train, val, test, trainval or all)");
}

std::vector<std::int64_t> subset_ids(const FoldSplit& fold, SplitSubset subset) {
  std::vector<std::int64_t> out;
  const auto add = [&](const std::vector<std::int64_t>& ids) {
    out.insert(out.end(), ids.begin(), ids.end());
  };
  switch (subset) {
    case SplitSubset::kTrain: add(fold.train); break;
    case SplitSubset::kVal: add(fold.val); break;
    case SplitSubset::kTest: add(fold.test); break;
    case SplitSubset::kTrainVal: add(fold.train); add(fold.val); break;
    case SplitSubset::kAll: add(fold.train); add(fold.val); add(fold.test); break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

json sample(const fs::path& manifest_path, const RunConfig& config, const SampleOptions& options,
            std::uint64_t seed, const fs::path& out_dir) {
  if (options.count < 0) throw Error(ErrorCode::kInvalidArgument, "count must be >= 0");
  const auto manifest = load_manifest(manifest_path);
  const RandomStream root(seed);
  const auto folds = make_folds(manifest, options.n_folds, root.derive("folds"));
  if (options.fold < 0 || options.fold >= static_cast<int>(folds.size())) {
    throw Error(ErrorCode::kInvalidArgument, "fold index out of range");
  }
  const auto ids = subset_ids(folds[static_cast<std::size_t>(options.fold)], options.subset);
  const PatchSampler sampler(manifest, config.patch, ids);

  std::map<std::int64_t, Rgb8Image> cache;
  const ImageLoader loader = [&](const ImageEntry& entry) -> Rgb8Image {
    auto it = cache.find(entry.id);
    if (it == cache.end()) {
      const auto path = resolve_image_path(manifest_path, config.paths.image_root, entry);
      it = cache.emplace(entry.id, load_raster(path, entry, false).image).first;
    }
    return it->second;
  };

  std::string lines;
  const RandomStream stream = root.derive("sample");
  for (int i = 0; i < options.count; ++i) {
    const auto item = stream.derive(static_cast<std::uint64_t>(i));
    auto s = sampler.sample(item, loader);
    json record = {{"index", i}, {"provenance", to_json(s.provenance)}};
    if (options.augment) {
      auto aug = augment(s.patch, s.annotations, config.policy, item.derive("augment"));
      s.patch = std::move(aug.image);
      s.annotations = std::move(aug.boxes);
      record["augmentation"] = to_json(aug.log);
    }
    const std::string file = "patch_" + format_index(i) + ".png";
    write_file_atomic(out_dir / file, encode_png(s.patch));
    record["file"] = file;
    json anns = json::array();
    for (const auto& a : s.annotations) anns.push_back(annotation_json(a));
    record["annotations"] = anns;
    lines += record.dump() + "\n";
  }
  write_file_atomic(out_dir / "samples.jsonl", lines);
  return {{"samples", options.count}, {"images_in_split", ids.size()},
          {"out_dir", out_dir.string()}};
}

json optimize_anchors(const DatasetManifest& manifest, const RunConfig& config,
                      std::uint64_t seed, FitnessObjective objective, const fs::path& out_json) {
  std::vector<Box> boxes;
  boxes.reserve(manifest.annotations.size());
  for (const auto& a : manifest.annotations) boxes.push_back(a.box);
  auto params = config.de;
  params.workers = std::max(params.workers, config.workers);
  const auto result = optimize_scales(boxes, config.anchors, params,
                                      RandomStream(seed).derive("anchors"), objective);
  json j = to_json(result);
  j["objective"] = objective == FitnessObjective::kMeanMaxIou ? "mean_max_iou" : "recall_at_iou50";
  j["boxes"] = boxes.size();
  if (!out_json.empty()) write_file_atomic(out_json, dump(j));
  return j;
}

json tile(const fs::path& image_path, const RunConfig& config, const TileOptions& options,
          std::uint64_t seed, const fs::path& out_jsonl) {
  const auto image = read_image(image_path);
  const auto pad = pad_for_tiling(image, config.tiling);
  const auto origins = plan_tiles({pad.image.width(), pad.image.height()}, config.tiling);

  if (!options.emit_tiles_dir.empty()) {
    for (const auto& o : origins) {
      const auto t = crop(pad.image, o, {config.tiling.tile, config.tiling.tile});
      write_file_atomic(options.emit_tiles_dir / ("tile_x" + std::to_string(o.x) + "_y" +
                                                  std::to_string(o.y) + ".png"),
                        encode_png(t));
    }
  }

  std::vector<DetectionRecord> detections;
  if (options.source == DetectorSource::kMock) {
    if (options.manifest.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "the mock detector needs --manifest");
    }
    const auto manifest = load_manifest(options.manifest);
    const ManifestIndex index(manifest);
    const auto& entry = index.image(options.image_id);
    const auto gt = annotations_of(manifest, {entry.id});
    detections = detect_mock(image, entry, gt, config, RandomStream(seed), nullptr);
  } else {
    std::map<std::pair<int, int>, std::vector<DetectionRecord>> by_tile;
    for (auto& t : read_tile_detections_jsonl(options.tile_detections)) {
      by_tile[{t.tile_x, t.tile_y}].push_back(t.record);
    }
    std::set<std::pair<int, int>> planned;
    for (const auto& o : origins) planned.insert({o.x, o.y});
    for (const auto& [key, _] : by_tile) {
      if (!planned.count(key)) {
        throw Error(ErrorCode::kSchemaError, options.tile_detections.string() +
                                                 ": detections for unplanned tile origin (" +
                                                 std::to_string(key.first) + ", " +
                                                 std::to_string(key.second) + ")");
      }
    }
    const Detector detector = [&by_tile](const Rgb8Image&, const TileContext& ctx) {
      const auto it = by_tile.find({ctx.origin.x, ctx.origin.y});
      return it == by_tile.end() ? std::vector<DetectionRecord>{} : it->second;
    };
    detections = run_tiled(pad.image, detector, config.tiling, config.merge, config.workers,
                           options.image_id);
    std::erase_if(detections, [&](const DetectionRecord& d) {
      return d.center.x >= pad.original.width || d.center.y >= pad.original.height;
    });
  }
  write_file_atomic(out_jsonl, to_jsonl(detections));
  return {{"image_id", options.image_id},
          {"tiles", origins.size()},
          {"detections", detections.size()},
          {"padded", pad.padded},
          {"width", pad.original.width},
          {"height", pad.original.height}};
}

EvalReport evaluate(const std::vector<DetectionRecord>& detections,
                    const DatasetManifest& manifest, const MatchConfig& match, double threshold,
                    const fs::path& per_image_csv) {
  const auto report = evaluate_at_threshold(detections, manifest.annotations, match, threshold);
  if (!per_image_csv.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "image_id,tp,fp,fn,precision,recall,f1\n";
    for (const auto& [id, r] :
         per_image_reports(detections, manifest.annotations, match, threshold)) {
      csv << id << ',' << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.precision << ','
          << r.recall << ',' << r.f1 << '\n';
    }
    write_file_atomic(per_image_csv, csv.str());
  }
  return report;
}

json optimize_threshold_report(const std::vector<DetectionRecord>& detections,
                               const DatasetManifest& manifest, const MatchConfig& match,
                               bool per_scanner) {
  const ManifestIndex index(manifest);
  const auto c = calibrate(detections, manifest.annotations, index, match, per_scanner);
  json j = calibration_json(c);
  if (per_scanner) {
    j["combined"] =
        report_json(evaluate_calibrated(detections, manifest.annotations, index, match, c), false);
  }
  return j;
}

PipelineArtifacts run_pipeline(const RunConfig& config, std::uint64_t seed) {
  const fs::path out_dir = config.paths.output_dir;
  const fs::path manifest_path = config.paths.manifest;
  const RandomStream root(seed);
  PipelineArtifacts art{out_dir / "folds.json", out_dir / "detections.jsonl",
                        out_dir / "report.json", out_dir / "run-provenance.json", {}};

  const auto ingested = run_stage("ingest", [&] {
    if (manifest_path.empty()) throw Error(ErrorCode::kInvalidArgument, "paths.manifest is empty");
    return ingest(manifest_path, config.paths.image_root);
  });
  const auto& manifest = ingested.manifest;
  const ManifestIndex index(manifest);

  const auto folds = run_stage("folds", [&] {
    auto f = make_folds(manifest, config.pipeline.n_folds, root.derive("folds"));
    if (config.pipeline.fold < 0 || config.pipeline.fold >= static_cast<int>(f.size())) {
      throw Error(ErrorCode::kInvalidArgument, "pipeline.fold out of range");
    }
    write_file_atomic(art.folds, dump(to_json(f)));
    return f;
  });
  const auto& fold = folds[static_cast<std::size_t>(config.pipeline.fold)];

  json image_provenance = json::array();
  const auto detections = run_stage("detect", [&] {
    std::vector<DetectionRecord> all;
    for (const auto& entry : manifest.images) {
      const auto path = resolve_image_path(manifest_path, config.paths.image_root, entry);
      const auto raster = load_raster(path, entry, true);
      bool padded = false;
      const auto gt = annotations_of(manifest, {entry.id});
      auto dets = detect_mock(raster.image, entry, gt, config, root, &padded);
      all.insert(all.end(), dets.begin(), dets.end());
      image_provenance.push_back(
          {{"id", entry.id},
           {"path", path.string()},
           {"sha256", raster.synthesized ? json(nullptr) : json(sha256_file(path))},
           {"synthesized", raster.synthesized},
           {"padded", padded}});
    }
    write_file_atomic(art.detections, to_jsonl(all));
    return all;
  });

  art.report_json = run_stage("threshold", [&] {
    const auto calib_ids = subset_ids(fold, SplitSubset::kTrainVal);
    const std::set<std::int64_t> calib_set(calib_ids.begin(), calib_ids.end());
    const std::set<std::int64_t> test_set(fold.test.begin(), fold.test.end());
    const auto c = calibrate(detections_of(detections, calib_set),
                             annotations_of(manifest, calib_set), index, config.match,
                             config.pipeline.per_scanner_threshold);
    const auto test = evaluate_calibrated(detections_of(detections, test_set),
                                          annotations_of(manifest, test_set), index, config.match,
                                          c);
    json report = report_json(test, !c.per_scanner);
    report["fold"] = config.pipeline.fold;
    report["n_folds"] = config.pipeline.n_folds;
    report["test_images"] = fold.test.size();
    report["calibration_images"] = calib_ids.size();
    report["calibration"] = calibration_json(c);
    write_file_atomic(art.report, dump(report));
    return report;
  });

  run_stage("provenance", [&] {
    RunConfig effective = config;
    effective.seed = seed;
    const json prov = {
        {"tool", "mitodg"},
        {"version", std::string(kToolVersion)},
        {"seed", seed},
        {"config", to_json(effective)},
        {"libraries",
         {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
        {"inputs",
         {{"manifest", {{"path", manifest_path.string()}, {"sha256", sha256_file(manifest_path)}}},
          {"images", image_provenance}}},
        {"outputs",
         {{"folds.json", sha256_file(art.folds)},
          {"detections.jsonl", sha256_file(art.detections)},
          {"report.json", sha256_file(art.report)}}},
        {"warnings", ingested.warnings},
    };
    write_file_atomic(art.provenance, dump(prov));
    return 0;
  });
  return art;
}

}  // namespace mitodg::app
