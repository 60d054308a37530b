// pgrid: command-line front end for the grid-mapping pipeline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "pgrid/coverage/coverage.h"
#include "pgrid/error.h"
#include "pgrid/geo/raster_io.h"
#include "pgrid/geo/vector_io.h"
#include "pgrid/lineseg/lineseg.h"
#include "pgrid/metrics/metrics.h"
#include "pgrid/poleloss/gradcheck.h"
#include "pgrid/rasterops/buffer.h"
#include "pgrid/scorer/model.h"
#include "pgrid/scorer/train.h"
#include "pgrid/synth/synth.h"
#include "pgrid/unify/unify.h"
#include "pipeline.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pgrid {
namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitShape = 3;
constexpr int kExitFormat = 4;
constexpr int kExitIo = 5;
constexpr int kExitInternal = 70;

void SetupLogging() {
  auto logger = spdlog::stderr_color_st("pgrid");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("PGRID_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

void WriteText(const std::string& text, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void EmitJson(const json& doc, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << "\n";
  } else {
    geo::WriteJsonFile(doc, out);
    spdlog::info("wrote {}", out);
  }
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw ValidationError("'" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

geo::ByteRaster ReadImage(const fs::path& path) {
  auto any = geo::ReadRaster(path);
  if (auto* b = std::get_if<geo::ByteRaster>(&any)) return std::move(*b);
  throw ValidationError(path.string() + " is not a uint8 image");
}

std::vector<synth::Scene> ReadScenes(const std::vector<std::string>& dirs) {
  std::vector<synth::Scene> scenes;
  for (const auto& d : dirs) {
    spdlog::info("reading scene {}", d);
    scenes.push_back(synth::ReadScene(d));
  }
  return scenes;
}

scorer::TrainConfig ReadTrainConfig(const std::string& path, std::optional<std::uint64_t> seed) {
  scorer::TrainConfig c;
  if (!path.empty()) c = scorer::TrainConfig::FromJson(geo::ReadJsonFile(path));
  if (seed) c.seed = *seed;
  return c;
}

void WriteCurve(const std::vector<double>& curve, const std::string& path) {
  if (path.empty()) return;
  std::ostringstream os;
  os.precision(17);
  os << "epoch,loss\n";
  for (std::size_t e = 0; e < curve.size(); ++e) os << e << "," << curve[e] << "\n";
  WriteText(os.str(), path);
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  bool oracle = false;
};

void RunSynth(const SynthArgs& a) {
  synth::SceneConfig c;
  if (!a.config.empty()) c = synth::SceneConfig::FromJson(geo::ReadJsonFile(a.config));
  const synth::Scene scene = synth::GenerateScene(c, a.seed);
  fs::create_directories(a.out);
  synth::WriteScene(scene, a.out);
  if (a.oracle) {
    const auto o = synth::OraclePredict(scene);
    geo::WriteRaster(o.poles, fs::path(a.out) / "oracle_poles.pgr");
    geo::WriteRaster(o.lines, fs::path(a.out) / "oracle_lines.pgr");
  }
  spdlog::info("scene: {} poles, {} spans, {} hard negatives", scene.poles.size(),
               scene.lines.size(), scene.negatives.size());
}

// --- training and inference -------------------------------------------------

struct TrainArgs {
  std::vector<std::string> scenes;
  std::string config;
  std::string loss_config;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  int sf = lineseg::kDefaultScalingFactor;
  std::string out;
  std::string curve;
};

void RunTrainPoles(const TrainArgs& a) {
  const scorer::TrainConfig cfg = ReadTrainConfig(a.config, a.seed);
  poleloss::LossConfig lc;
  if (!a.loss_config.empty()) lc = poleloss::LossConfig::FromJson(geo::ReadJsonFile(a.loss_config));
  std::vector<scorer::PoleSample> data;
  for (const auto& s : ReadScenes(a.scenes)) data.push_back(pipeline::PoleSampleFromScene(s));
  const auto r = scorer::TrainPoles(data, cfg, lc, a.jobs);
  if (r.diverged) throw ValidationError("training diverged (non-finite loss or gradient)");
  scorer::WriteWeights(a.out, r.weights);
  WriteCurve(r.loss_curve, a.curve);
  spdlog::info("loss {} -> {}", r.loss_curve.front(), r.loss_curve.back());
}

void RunTrainLines(const TrainArgs& a) {
  const scorer::TrainConfig cfg = ReadTrainConfig(a.config, a.seed);
  std::vector<lineseg::LineSample> data;
  for (const auto& s : ReadScenes(a.scenes)) data.push_back(pipeline::LineSampleFromScene(s));
  const auto r = lineseg::TrainLines(data, a.sf, cfg, a.jobs);
  if (r.diverged) throw ValidationError("training diverged (non-finite loss or gradient)");
  scorer::WriteWeights(a.out, r.weights);
  WriteCurve(r.loss_curve, a.curve);
}

struct DetectArgs {
  std::string weights;
  std::string image;
  std::string out_probs;
  std::string out_points;
  double threshold = 0.5;
  int min_area = 1;
};

void RunDetectPoles(const DetectArgs& a) {
  if (a.out_probs.empty() && a.out_points.empty()) {
    throw ValidationError("nothing to write: give --out-probs and/or --out");
  }
  const auto weights = scorer::ReadWeights(a.weights);
  const geo::FloatRaster prob = pipeline::DetectPoleMap(ReadImage(a.image), weights);
  if (!a.out_probs.empty()) geo::WriteRaster(prob, a.out_probs);
  if (!a.out_points.empty()) {
    geo::WriteVectors(unify::ExtractPoles(prob, a.threshold, a.min_area), a.out_points);
  }
}

struct SegmentArgs {
  std::string weights;
  std::string image;
  std::optional<int> sf;
  std::string out;
};

void RunSegmentLines(const SegmentArgs& a) {
  const auto weights = scorer::ReadWeights(a.weights);
  int sf = lineseg::kDefaultScalingFactor;
  if (a.sf) {
    sf = *a.sf;
  } else if (weights.metadata.contains("sf")) {
    sf = weights.metadata["sf"].get<int>();
  }
  const geo::ByteRaster img = ReadImage(a.image);
  geo::WriteRaster(lineseg::SegmentLines(pipeline::NormalizeImage(img), weights, sf), a.out);
}

// --- evaluation -------------------------------------------------------------

struct EvalPolesArgs {
  std::string gt;
  std::string pred;
  std::string th = "5,7,10";
  std::string match = "both";
  std::string region = "region";
  std::string out;
  std::string csv;
};

void RunEvalPoles(const EvalPolesArgs& a) {
  if (a.match != "both") metrics::ParseMatchVariant(a.match);
  const auto gt = geo::ReadPoints(a.gt);
  const auto pred = geo::ReadPoints(a.pred);
  metrics::RegionReport rep;
  rep.region = a.region;
  for (double th : ParseList(a.th)) rep.thresholds.push_back(metrics::EvaluatePoles(gt, pred, th));
  rep.metadata = {{"gt", a.gt}, {"pred", a.pred}, {"match", a.match}};
  json doc = metrics::ToJson(rep);
  // A single variant keeps only its own precision and F1 columns.
  if (a.match != "both") {
    const bool strict = metrics::ParseMatchVariant(a.match) == metrics::MatchVariant::kStrict;
    for (auto& row : doc["thresholds"]) {
      row.erase(strict ? "P_A" : "P_S");
      row.erase(strict ? "F1_A" : "F1_S");
    }
  }
  EmitJson(doc, a.out);
  if (!a.csv.empty()) WriteText(metrics::ToCsv(std::span(&rep, 1)), a.csv);
}

struct EvalLinesArgs {
  std::string gt;
  std::string pred;
  std::string reference;
  double buffer = metrics::kDefaultLineBuffer;
  double threshold = 0.5;
  std::string region = "region";
  std::string out;
  std::string csv;
};

void RunEvalLines(const EvalLinesArgs& a) {
  const auto gt = geo::ReadPolylines(a.gt);
  geo::ByteRaster mask;
  if (fs::path(a.pred).extension() == ".pgr") {
    const geo::FloatRaster prob = geo::ReadFloatRaster(a.pred, true);
    const int ch = prob.channels() - 1;
    mask = geo::ByteRaster(prob.width(), prob.height(), 1, prob.georef(), 0);
    for (int r = 0; r < prob.height(); ++r) {
      for (int c = 0; c < prob.width(); ++c) mask(c, r) = prob(c, r, ch) >= a.threshold;
    }
  } else {
    if (a.reference.empty()) {
      throw ValidationError("vector predictions need --reference for the pixel grid");
    }
    const auto polys = geo::ReadPolygons(a.pred);
    const auto ref = geo::ReadRaster(a.reference);
    std::visit(
        [&](const auto& r) {
          mask = rasterops::RasterizePolygons(polys, r.georef(), r.width(), r.height());
        },
        ref);
  }
  metrics::RegionReport rep;
  rep.region = a.region;
  rep.lines = metrics::PixelLineMetrics(mask, gt, a.buffer);
  rep.metadata = {{"gt", a.gt}, {"pred", a.pred}, {"buffer", a.buffer}};
  EmitJson(metrics::ToJson(rep), a.out);
  if (!a.csv.empty()) WriteText(metrics::ToCsv(std::span(&rep, 1)), a.csv);
}

struct DmapArgs {
  std::vector<std::string> gt;
  std::vector<std::string> pred;
  std::vector<std::string> regions;
  double th = metrics::kDefaultDmapThreshold;
  std::string match = "strict";
  std::string out;
};

void RunDmap(const DmapArgs& a) {
  if (a.gt.size() != a.pred.size()) {
    throw ValidationError("--gt and --pred must be given the same number of times");
  }
  if (!a.regions.empty() && a.regions.size() != a.gt.size()) {
    throw ValidationError("--region must be given once per --gt");
  }
  const auto variant = metrics::ParseMatchVariant(a.match);
  std::vector<double> aps;
  json regions = json::array();
  for (std::size_t i = 0; i < a.gt.size(); ++i) {
    const double ap = metrics::AveragePrecision(geo::ReadPoints(a.gt[i]),
                                                geo::ReadPoints(a.pred[i]), a.th, variant);
    aps.push_back(ap);
    regions.push_back({{"region", a.regions.empty() ? a.gt[i] : a.regions[i]}, {"ap", ap}});
  }
  EmitJson({{"th", a.th},
            {"match", metrics::ToString(variant)},
            {"regions", regions},
            {"dmap", metrics::MeanAveragePrecision(aps)}},
           a.out);
}

// --- unification and graph --------------------------------------------------

struct UnifyArgs {
  std::string pole_probs;
  std::string line_probs;
  double buffer = unify::kDefaultCorridorRadius;
  double pole_threshold = 0.5;
  double line_threshold = 0.5;
  int min_area = unify::kDefaultMinAreaPx;
  int spur = unify::kDefaultSpurPx;
  std::string out;
  std::string stem = "grid";
};

void RunUnify(const UnifyArgs& a) {
  const auto poles = unify::ExtractPoles(geo::ReadFloatRaster(a.pole_probs, true),
                                         a.pole_threshold, a.min_area);
  const auto lines = unify::ExtractLines(geo::ReadFloatRaster(a.line_probs, true),
                                         a.line_threshold, a.buffer, a.spur);
  const json provenance = {{"pole_probs", a.pole_probs},     {"line_probs", a.line_probs},
                           {"buffer", a.buffer},             {"pole_threshold", a.pole_threshold},
                           {"line_threshold", a.line_threshold}, {"min_area_px", a.min_area},
                           {"spur_px", a.spur}};
  fs::create_directories(a.out);
  unify::WriteLayout(unify::Unify(poles, lines, provenance), a.out, a.stem);
  spdlog::info("{} poles, {} line skeletons", poles.size(), lines.skeletons.size());
}

struct SnapArgs {
  std::string layout;
  std::string stem = "grid";
  double tol = 1.5;
  std::string out;
};

void RunSnapGraph(const SnapArgs& a) {
  const auto edges = unify::SnapGraph(unify::ReadLayout(a.layout, a.stem), a.tol);
  json list = json::array();
  for (const auto& [u, v] : edges) list.push_back({u, v});
  EmitJson({{"tol", a.tol}, {"edges", list}, {"is_forest", unify::IsForest(edges)}}, a.out);
}

struct CoverageArgs {
  std::string ours;
  std::string ours_stem = "grid";
  std::string external;
  std::string external_stem = "grid";
  double cell_size = coverage::kDefaultCellSize;
  std::string origin;
  std::string out;
};

void RunCoverage(const CoverageArgs& a) {
  const auto ours = unify::ReadLayout(a.ours, a.ours_stem);
  const auto ext = unify::ReadLayout(a.external, a.external_stem);
  if (ours.poles.epsg != ext.poles.epsg) {
    throw ValidationError("layouts use different coordinate systems");
  }
  geo::Point2 origin;
  if (!a.origin.empty()) {
    const auto xy = ParseList(a.origin);
    if (xy.size() != 2) throw ValidationError("--origin takes x,y");
    origin = {xy[0], xy[1]};
  } else {
    // Shared lattice: the lower of the two snapped corners in each axis.
    const auto o1 = coverage::DefaultOrigin(ours, a.cell_size);
    const auto o2 = coverage::DefaultOrigin(ext, a.cell_size);
    origin = {std::min(o1.x, o2.x), std::min(o1.y, o2.y)};
  }
  const auto c = coverage::Compare(coverage::Gridify(ours, a.cell_size, origin, "ours"),
                                   coverage::Gridify(ext, a.cell_size, origin, "external"));
  EmitJson(coverage::ToJson(c), a.out);
}

// --- gradient check ---------------------------------------------------------

struct GradcheckArgs {
  int fixtures = 100;
  int size = 16;
  std::uint64_t seed = 0;
  double h = 1e-4;
  double tol = 1e-4;
  std::string weights;
  std::string scene;
  std::string out;
};

int RunGradcheck(const GradcheckArgs& a) {
  if (a.fixtures < 1 || a.size < 1) throw ValidationError("--fixtures and --size must be >= 1");
  std::mt19937_64 rng(a.seed);
  poleloss::GradCheckReport pole, bce;
  for (int k = 0; k < a.fixtures; ++k) {
    const auto f = poleloss::RandomGradFixture(rng, a.size);
    const auto r = poleloss::CheckCompositeGradient(f.logits, f.poles, f.negatives, {}, a.h);
    pole.max_rel_error = std::max(pole.max_rel_error, r.max_rel_error);
    pole.checked += r.checked;
    pole.skipped += r.skipped;

    std::normal_distribution<double> z(0.0, 3.0);
    std::bernoulli_distribution y(0.3);
    geo::DoubleRaster logits(a.size, a.size, 2, {}, 0.0);
    for (double& v : logits.data()) v = z(rng);
    geo::ByteRaster labels(a.size, a.size, 1, {}, 0);
    for (auto& v : labels.data()) v = y(rng);
    const auto b = lineseg::CheckBceGradient(logits, labels, a.h);
    bce.max_rel_error = std::max(bce.max_rel_error, b.max_rel_error);
    bce.checked += b.checked;
  }
  auto to_json = [](const poleloss::GradCheckReport& r) {
    return json{{"max_rel_error", r.max_rel_error}, {"checked", r.checked}, {"skipped", r.skipped}};
  };
  json doc = {{"fixtures", a.fixtures},          {"size", a.size},
              {"h", a.h},                        {"tol", a.tol},
              {"composite_loss", to_json(pole)}, {"patch_bce", to_json(bce)}};
  bool ok = pole.max_rel_error <= a.tol && bce.max_rel_error <= a.tol;
  if (!a.weights.empty() || !a.scene.empty()) {
    if (a.weights.empty() || a.scene.empty()) {
      throw ValidationError("--weights and --scene go together");
    }
    const auto sample = pipeline::PoleSampleFromScene(synth::ReadScene(a.scene));
    const auto r = scorer::GradCheck(scorer::ReadWeights(a.weights), sample, {}, a.h);
    doc["scorer"] = to_json(r);
    ok = ok && r.max_rel_error <= a.tol;
  }
  doc["pass"] = ok;
  EmitJson(doc, a.out);
  return ok ? 0 : kExitCheckFailed;
}

// --- driver -----------------------------------------------------------------

void PrintError(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

int Main(int argc, char** argv) {
  SetupLogging();
  CLI::App app{
      "pgrid: power-grid mapping from overhead imagery.\n"
      "Rasters are PGRD files (.pgr); vectors are GeoJSON with an \"epsg\" member.\n"
      "Set PGRID_LOG=trace|debug|info|warn|error|off for log verbosity (default warn)."};
  app.require_subcommand(1);
  int exit_code = 0;

  SynthArgs synth_a;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene bundle");
  synth_cmd->add_option("--config", synth_a.config, "Scene config JSON (defaults if omitted)")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--seed", synth_a.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--out", synth_a.out,
                        "Output directory: image.pgr, poles/lines/negatives.geojson, "
                        "edges.json, config.json")
      ->required();
  synth_cmd->add_flag("--oracle", synth_a.oracle,
                      "Also write oracle_poles.pgr and oracle_lines.pgr probability maps");
  synth_cmd->callback([&] { RunSynth(synth_a); });

  TrainArgs tp_a;
  auto* tp_cmd = app.add_subcommand("train-poles", "Train the pole scorer on scene bundles");
  tp_cmd->add_option("--scene", tp_a.scenes, "Scene bundle directory (repeatable)")
      ->required()
      ->check(CLI::ExistingDirectory);
  tp_cmd->add_option("--config", tp_a.config,
                     "Training config JSON {lr, epochs, momentum, seed, augment, "
                     "lambda_hard_neg, max_grad_norm}; defaults lr=0.01, epochs=60, "
                     "momentum=0.9, lambda_hard_neg=1, max_grad_norm=1")
      ->check(CLI::ExistingFile);
  tp_cmd->add_option("--loss-config", tp_a.loss_config, "Loss config JSON")
      ->check(CLI::ExistingFile);
  tp_cmd->add_option("--seed", tp_a.seed, "Overrides the config seed");
  tp_cmd->add_option("--jobs", tp_a.jobs, "Worker threads (output independent of this)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  tp_cmd->add_option("--out", tp_a.out, "Output weights JSON")->required();
  tp_cmd->add_option("--curve", tp_a.curve, "Optional loss curve CSV");
  tp_cmd->callback([&] { RunTrainPoles(tp_a); });

  DetectArgs det_a;
  auto* det_cmd = app.add_subcommand("detect-poles", "Pole probability map and points");
  det_cmd->add_option("--weights", det_a.weights, "Pole weights JSON")
      ->required()
      ->check(CLI::ExistingFile);
  det_cmd->add_option("--image", det_a.image, "uint8 image .pgr")
      ->required()
      ->check(CLI::ExistingFile);
  det_cmd->add_option("--out-probs", det_a.out_probs, "2-channel probability map .pgr");
  det_cmd->add_option("--out", det_a.out_points, "Pole points GeoJSON");
  det_cmd->add_option("--threshold", det_a.threshold, "Pole probability threshold")
      ->capture_default_str();
  det_cmd->add_option("--min-area", det_a.min_area,
                      "Minimum blob area in pixels (point-supervised maps give small blobs)")
      ->capture_default_str();
  det_cmd->callback([&] { RunDetectPoles(det_a); });

  TrainArgs tl_a;
  auto* tl_cmd = app.add_subcommand("train-lines", "Train the patch line scorer");
  tl_cmd->add_option("--scene", tl_a.scenes, "Scene bundle directory (repeatable)")
      ->required()
      ->check(CLI::ExistingDirectory);
  tl_cmd->add_option("--config", tl_a.config, "Training config JSON")->check(CLI::ExistingFile);
  tl_cmd->add_option("--sf", tl_a.sf, "Scaling factor: patch side in pixels (default 4)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  tl_cmd->add_option("--seed", tl_a.seed, "Overrides the config seed");
  tl_cmd->add_option("--jobs", tl_a.jobs, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  tl_cmd->add_option("--out", tl_a.out, "Output weights JSON")->required();
  tl_cmd->add_option("--curve", tl_a.curve, "Optional loss curve CSV");
  tl_cmd->callback([&] { RunTrainLines(tl_a); });

  SegmentArgs seg_a;
  auto* seg_cmd = app.add_subcommand("segment-lines", "Full-resolution line probability map");
  seg_cmd->add_option("--weights", seg_a.weights, "Line weights JSON")
      ->required()
      ->check(CLI::ExistingFile);
  seg_cmd->add_option("--image", seg_a.image, "uint8 image .pgr")
      ->required()
      ->check(CLI::ExistingFile);
  seg_cmd->add_option("--sf", seg_a.sf,
                      "Scaling factor (default: the one stored in the weights, else 4)");
  seg_cmd->add_option("--out", seg_a.out, "1-channel probability map .pgr")->required();
  seg_cmd->callback([&] { RunSegmentLines(seg_a); });

  EvalPolesArgs ep_a;
  auto* ep_cmd = app.add_subcommand("eval-poles", "Distance-thresholded pole metrics");
  ep_cmd->add_option("--gt", ep_a.gt, "Ground-truth points GeoJSON")
      ->required()
      ->check(CLI::ExistingFile);
  ep_cmd->add_option("--pred", ep_a.pred, "Predicted points GeoJSON")
      ->required()
      ->check(CLI::ExistingFile);
  ep_cmd->add_option("--th", ep_a.th, "Comma list of thresholds in meters")
      ->capture_default_str();
  ep_cmd->add_option("--match", ep_a.match, "strict, all or both")
      ->capture_default_str()
      ->check(CLI::IsMember({"strict", "all", "both"}));
  ep_cmd->add_option("--region", ep_a.region, "Region name in the report")
      ->capture_default_str();
  ep_cmd->add_option("--out", ep_a.out, "Report JSON (stdout if omitted)");
  ep_cmd->add_option("--csv", ep_a.csv, "CSV mirror of the report");
  ep_cmd->callback([&] { RunEvalPoles(ep_a); });

  EvalLinesArgs el_a;
  auto* el_cmd = app.add_subcommand("eval-lines", "Buffered pixel metrics for lines");
  el_cmd->add_option("--gt", el_a.gt, "Ground-truth polylines GeoJSON")
      ->required()
      ->check(CLI::ExistingFile);
  el_cmd->add_option("--pred", el_a.pred,
                     "Prediction: probability/mask .pgr, or corridor polygons GeoJSON")
      ->required()
      ->check(CLI::ExistingFile);
  el_cmd->add_option("--reference", el_a.reference,
                     "Raster defining the pixel grid for vector predictions")
      ->check(CLI::ExistingFile);
  el_cmd->add_option("--buffer", el_a.buffer, "Ground-truth buffer radius in meters")
      ->capture_default_str();
  el_cmd->add_option("--threshold", el_a.threshold, "Threshold for raster predictions")
      ->capture_default_str();
  el_cmd->add_option("--region", el_a.region, "Region name")->capture_default_str();
  el_cmd->add_option("--out", el_a.out, "Report JSON (stdout if omitted)");
  el_cmd->add_option("--csv", el_a.csv, "CSV mirror of the report");
  el_cmd->callback([&] { RunEvalLines(el_a); });

  DmapArgs dm_a;
  auto* dm_cmd = app.add_subcommand("dmap", "Distance mean average precision over regions");
  dm_cmd->add_option("--gt", dm_a.gt, "Ground-truth points GeoJSON (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  dm_cmd->add_option("--pred", dm_a.pred, "Scored predictions GeoJSON, same order as --gt")
      ->required()
      ->check(CLI::ExistingFile);
  dm_cmd->add_option("--region", dm_a.regions, "Region names, same order as --gt");
  dm_cmd->add_option("--th", dm_a.th, "Distance threshold in meters")->capture_default_str();
  dm_cmd->add_option("--match", dm_a.match, "strict or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"strict", "all"}));
  dm_cmd->add_option("--out", dm_a.out, "Report JSON (stdout if omitted)");
  dm_cmd->callback([&] { RunDmap(dm_a); });

  UnifyArgs un_a;
  auto* un_cmd = app.add_subcommand(
      "unify", "Vectorize pole and line maps into <stem>.poles/.lines/.corridors.geojson");
  un_cmd->add_option("--pole-probs", un_a.pole_probs, "Pole probability map .pgr")
      ->required()
      ->check(CLI::ExistingFile);
  un_cmd->add_option("--line-probs", un_a.line_probs, "Line probability map .pgr")
      ->required()
      ->check(CLI::ExistingFile);
  un_cmd->add_option("--buffer", un_a.buffer, "Corridor radius in meters")
      ->capture_default_str();
  un_cmd->add_option("--pole-threshold", un_a.pole_threshold)->capture_default_str();
  un_cmd->add_option("--line-threshold", un_a.line_threshold)->capture_default_str();
  un_cmd->add_option("--min-area", un_a.min_area, "Minimum pole blob area in pixels")
      ->capture_default_str();
  un_cmd->add_option("--spur", un_a.spur, "Longest skeleton spur removed, in pixels")
      ->capture_default_str();
  un_cmd->add_option("--out", un_a.out, "Output directory")->required();
  un_cmd->add_option("--stem", un_a.stem, "Layer file stem")->capture_default_str();
  un_cmd->callback([&] { RunUnify(un_a); });

  SnapArgs sn_a;
  auto* sn_cmd = app.add_subcommand("snap-graph", "Pole graph from a unified layout");
  sn_cmd->add_option("--layout", sn_a.layout, "Layout directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  sn_cmd->add_option("--stem", sn_a.stem, "Layer file stem")->capture_default_str();
  sn_cmd->add_option("--tol", sn_a.tol, "Snapping tolerance in meters")->capture_default_str();
  sn_cmd->add_option("--out", sn_a.out, "Edges JSON (stdout if omitted)");
  sn_cmd->callback([&] { RunSnapGraph(sn_a); });

  CoverageArgs cv_a;
  auto* cv_cmd = app.add_subcommand("coverage", "Grid-cell coverage against an external map");
  cv_cmd->add_option("--ours", cv_a.ours, "Our layout directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  cv_cmd->add_option("--ours-stem", cv_a.ours_stem)->capture_default_str();
  cv_cmd->add_option("--external", cv_a.external, "External layout directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  cv_cmd->add_option("--external-stem", cv_a.external_stem)->capture_default_str();
  cv_cmd->add_option("--cell-size", cv_a.cell_size, "Cell side in meters")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cv_cmd->add_option("--origin", cv_a.origin,
                     "Lattice origin x,y (default: snapped lower-left of both layouts)");
  cv_cmd->add_option("--out", cv_a.out, "Report JSON (stdout if omitted)");
  cv_cmd->callback([&] { RunCoverage(cv_a); });

  GradcheckArgs gc_a;
  auto* gc_cmd = app.add_subcommand(
      "gradcheck", "Finite-difference check of the pole loss and patch BCE gradients");
  gc_cmd->add_option("--fixtures", gc_a.fixtures, "Random fixtures")->capture_default_str();
  gc_cmd->add_option("--size", gc_a.size, "Fixture side in pixels")->capture_default_str();
  gc_cmd->add_option("--seed", gc_a.seed, "Random seed")->capture_default_str();
  gc_cmd->add_option("--step", gc_a.h, "Central difference step h")->capture_default_str();
  gc_cmd->add_option("--tol", gc_a.tol, "Relative error tolerance")->capture_default_str();
  gc_cmd->add_option("--weights", gc_a.weights, "Also check a scorer's weight gradient")
      ->check(CLI::ExistingFile);
  gc_cmd->add_option("--scene", gc_a.scene, "Scene bundle for the scorer check")
      ->check(CLI::ExistingDirectory);
  gc_cmd->add_option("--out", gc_a.out, "Report JSON (stdout if omitted)");
  gc_cmd->callback([&] { exit_code = RunGradcheck(gc_a); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("usage", e.what());
    return e.get_exit_code();
  } catch (const ValidationError& e) {
    PrintError("validation", e.what());
    return kExitValidation;
  } catch (const ShapeError& e) {
    PrintError("shape", e.what());
    return kExitShape;
  } catch (const FormatError& e) {
    PrintError("format", e.what());
    return kExitFormat;
  } catch (const Error& e) {
    PrintError("io", e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    PrintError("io", e.what());
    return kExitIo;
  } catch (const json::exception& e) {
    PrintError("format", e.what());
    return kExitFormat;
  } catch (const std::exception& e) {
    PrintError("internal", e.what());
    return kExitInternal;
  }
  return exit_code;
}

}  // namespace
}  // namespace pgrid

int main(int argc, char** argv) { return pgrid::Main(argc, argv); }
