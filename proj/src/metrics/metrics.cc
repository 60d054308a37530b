#include "pgrid/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "pgrid/rasterops/buffer.h"

namespace pgrid::metrics {

using geo::AnnotatedPoint;
using geo::PointAnnotations;

namespace {

std::vector<const AnnotatedPoint*> Poles(const PointAnnotations& pts) {
  std::vector<const AnnotatedPoint*> out;
  for (const auto& p : pts.points) {
    if (p.polarity == geo::Polarity::kPole) out.push_back(&p);
  }
  return out;
}

void CheckThreshold(double th) {
  if (!(th > 0.0) || !std::isfinite(th)) {
    throw ValidationError("distance threshold must be positive, got " + std::to_string(th));
  }
}

double Ratio(double a, double b) { return b > 0.0 ? a / b : 0.0; }

}  // namespace

std::string ToString(MatchVariant v) {
  return v == MatchVariant::kStrict ? "strict" : "all";
}

MatchVariant ParseMatchVariant(const std::string& s) {
  if (s == "strict") return MatchVariant::kStrict;
  if (s == "all") return MatchVariant::kAll;
  throw ValidationError("unknown match variant '" + s + "'");
}

MatchResult MatchStrict(const PointAnnotations& gt, const PointAnnotations& pred,
                        double th) {
  CheckThreshold(th);
  const auto g = Poles(gt);
  const auto p = Poles(pred);
  struct Cand {
    double d;
    std::size_t gi, pi;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double d = geo::Distance(g[i]->position, p[j]->position);
      if (d <= th) cands.push_back({d, i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
    if (a.d != b.d) return a.d < b.d;
    if (g[a.gi]->id != g[b.gi]->id) return g[a.gi]->id < g[b.gi]->id;
    return p[a.pi]->id < p[b.pi]->id;
  });
  std::vector<char> gt_used(g.size(), 0), pred_used(p.size(), 0);
  MatchResult m;
  m.th = th;
  m.variant = MatchVariant::kStrict;
  for (const Cand& c : cands) {
    if (gt_used[c.gi] || pred_used[c.pi]) continue;
    gt_used[c.gi] = pred_used[c.pi] = 1;
    m.pairs.push_back({g[c.gi]->id, p[c.pi]->id, c.d});
  }
  m.tp = m.gt_detected = m.pairs.size();
  m.fp = p.size() - m.tp;
  m.fn = g.size() - m.tp;
  return m;
}

MatchResult MatchAll(const PointAnnotations& gt, const PointAnnotations& pred,
                     double th) {
  CheckThreshold(th);
  const auto g = Poles(gt);
  const auto p = Poles(pred);
  MatchResult m;
  m.th = th;
  m.variant = MatchVariant::kAll;
  std::vector<char> detected(g.size(), 0);
  for (const auto* q : p) {
    std::size_t best = g.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double d = geo::Distance(g[i]->position, q->position);
      if (d > th) continue;
      detected[i] = 1;
      if (d < best_d || (d == best_d && g[i]->id < g[best]->id)) {
        best = i;
        best_d = d;
      }
    }
    if (best == g.size()) {
      ++m.fp;
    } else {
      ++m.tp;
      m.pairs.push_back({g[best]->id, q->id, best_d});
    }
  }
  m.gt_detected = std::count(detected.begin(), detected.end(), 1);
  m.fn = g.size() - m.gt_detected;
  return m;
}

MatchResult Match(const PointAnnotations& gt, const PointAnnotations& pred, double th,
                  MatchVariant variant) {
  return variant == MatchVariant::kStrict ? MatchStrict(gt, pred, th)
                                          : MatchAll(gt, pred, th);
}

double HarmonicMean(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

Prf ComputePrf(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf out;
  out.precision = Ratio(tp, tp + fp);
  out.recall = Ratio(tp, tp + fn);
  out.f1 = HarmonicMean(out.precision, out.recall);
  return out;
}

double AveragePrecision(const PointAnnotations& gt, const PointAnnotations& pred,
                        double th, MatchVariant variant) {
  CheckThreshold(th);
  auto ranked = Poles(pred);
  for (const auto* p : ranked) {
    if (!p->confidence) {
      throw ValidationError("prediction " + std::to_string(p->id) + " has no confidence");
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const AnnotatedPoint* a, const AnnotatedPoint* b) {
    if (*a->confidence != *b->confidence) return *a->confidence > *b->confidence;
    return a->id < b->id;
  });
  const double n_gt = static_cast<double>(Poles(gt).size());
  if (n_gt == 0.0 || ranked.empty()) return 0.0;

  std::vector<std::pair<double, double>> curve;  // (recall, precision)
  PointAnnotations prefix;
  prefix.epsg = pred.epsg;
  for (const auto* p : ranked) {
    prefix.points.push_back(*p);
    const MatchResult m = Match(gt, prefix, th, variant);
    curve.emplace_back(m.gt_detected / n_gt, Ratio(m.tp, m.tp + m.fp));
  }
  std::vector<double> levels;
  for (const auto& [r, p] : curve) levels.push_back(r);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double ap = 0.0;
  double prev = 0.0;
  for (double level : levels) {
    double best = 0.0;
    for (const auto& [r, p] : curve) {
      if (r >= level) best = std::max(best, p);
    }
    ap += (level - prev) * best;
    prev = level;
  }
  return ap;
}

double MeanAveragePrecision(std::span<const double> aps) {
  if (aps.empty()) return 0.0;
  return std::accumulate(aps.begin(), aps.end(), 0.0) / static_cast<double>(aps.size());
}

LineMetrics MaskMetrics(const geo::ByteRaster& pred, const geo::ByteRaster& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height() ||
      pred.channels() != 1 || gt.channels() != 1) {
    throw ShapeError("prediction and ground-truth masks have different shapes");
  }
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < pred.data().size(); ++i) {
    const bool p = pred.data()[i] != 0;
    const bool g = gt.data()[i] != 0;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
    tn += !p && !g;
  }
  LineMetrics m;
  m.line_iou = Ratio(tp, tp + fp + fn);
  m.background_iou = Ratio(tn, tn + fn + fp);
  m.miou = 0.5 * (m.line_iou + m.background_iou);
  m.precision = Ratio(tp, tp + fp);
  m.recall = Ratio(tp, tp + fn);
  m.f1 = HarmonicMean(m.precision, m.recall);
  return m;
}

LineMetrics PixelLineMetrics(const geo::ByteRaster& pred, const geo::PolylineSet& gt,
                             double buffer_m) {
  const auto& g = pred.georef();
  if (gt.epsg != 0 && g.epsg != 0 && gt.epsg != g.epsg) {
    throw ShapeError("line CRS EPSG:" + std::to_string(gt.epsg) +
                     " differs from mask CRS EPSG:" + std::to_string(g.epsg));
  }
  if (!gt.lines.empty()) {
    bool inside = false;
    for (const auto& line : gt.lines) {
      for (const auto& v : line.vertices) {
        const geo::Point2 px = g.WorldToPixel(v.x, v.y);
        inside |= px.x >= 0 && px.y >= 0 && px.x <= pred.width() && px.y <= pred.height();
      }
    }
    if (!inside) throw ShapeError("no ground-truth line vertex lies within the mask extent");
  }
  const geo::ByteRaster truth =
      gt.lines.empty() ? geo::ByteRaster(pred.width(), pred.height(), 1, g, 0)
                       : rasterops::BufferPolylines(gt, buffer_m, g, pred.width(),
                                                    pred.height());
  return MaskMetrics(pred, truth);
}

ThresholdRow EvaluatePoles(const PointAnnotations& gt, const PointAnnotations& pred,
                           double th) {
  const MatchResult s = MatchStrict(gt, pred, th);
  const MatchResult a = MatchAll(gt, pred, th);
  ThresholdRow row;
  row.th = th;
  const Prf ps = ComputePrf(s.tp, s.fp, s.fn);
  row.p_s = ps.precision;
  row.r = ps.recall;
  row.p_a = Ratio(a.tp, a.tp + a.fp);
  row.f1_s = HarmonicMean(row.p_s, row.r);
  row.f1_a = HarmonicMean(row.p_a, row.r);
  return row;
}

nlohmann::json ToJson(const RegionReport& report) {
  nlohmann::json j;
  j["region"] = report.region;
  j["thresholds"] = nlohmann::json::array();
  for (const auto& t : report.thresholds) {
    j["thresholds"].push_back({{"th", t.th},
                               {"P_S", t.p_s},
                               {"P_A", t.p_a},
                               {"R", t.r},
                               {"F1_S", t.f1_s},
                               {"F1_A", t.f1_a}});
  }
  if (report.lines) {
    const auto& l = *report.lines;
    j["lines"] = {{"miou", l.miou},
                  {"line_iou", l.line_iou},
                  {"background_iou", l.background_iou},
                  {"p", l.precision},
                  {"r", l.recall},
                  {"f1", l.f1}};
  } else {
    j["lines"] = nullptr;
  }
  j["dmap"] = report.dmap ? nlohmann::json(*report.dmap) : nlohmann::json(nullptr);
  j["metadata"] = report.metadata;
  return j;
}

RegionReport ReportFromJson(const nlohmann::json& j) {
  try {
    RegionReport r;
    r.region = j.at("region").get<std::string>();
    for (const auto& t : j.at("thresholds")) {
      r.thresholds.push_back({t.at("th").get<double>(), t.at("P_S").get<double>(),
                              t.at("P_A").get<double>(), t.at("R").get<double>(),
                              t.at("F1_S").get<double>(), t.at("F1_A").get<double>()});
    }
    if (j.contains("lines") && !j["lines"].is_null()) {
      const auto& l = j["lines"];
      LineMetrics m;
      m.miou = l.at("miou").get<double>();
      m.line_iou = l.value("line_iou", 0.0);
      m.background_iou = l.value("background_iou", 0.0);
      m.precision = l.at("p").get<double>();
      m.recall = l.at("r").get<double>();
      m.f1 = l.at("f1").get<double>();
      r.lines = m;
    }
    if (j.contains("dmap") && !j["dmap"].is_null()) r.dmap = j["dmap"].get<double>();
    if (j.contains("metadata")) r.metadata = j["metadata"];
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed metrics report: ") + e.what());
  }
}

std::string ToCsv(std::span<const RegionReport> reports) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "region,th,P_S,P_A,R,F1_S,F1_A,miou,p,r,f1,dmap\n";
  auto tail = [&](const RegionReport& rep) {
    if (rep.lines) {
      os << ',' << rep.lines->miou << ',' << rep.lines->precision << ','
         << rep.lines->recall << ',' << rep.lines->f1;
    } else {
      os << ",,,,";
    }
    os << ',';
    if (rep.dmap) os << *rep.dmap;
    os << '\n';
  };
  for (const auto& rep : reports) {
    if (rep.thresholds.empty()) {
      os << rep.region << ",,,,,,";
      tail(rep);
    }
    for (const auto& t : rep.thresholds) {
      os << rep.region << ',' << t.th << ',' << t.p_s << ',' << t.p_a << ',' << t.r << ','
         << t.f1_s << ',' << t.f1_a;
      tail(rep);
    }
  }
  return os.str();
}

}  // namespace pgrid::metrics
