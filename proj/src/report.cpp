#include "graphcvx/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "graphcvx/errors.hpp"

namespace graphcvx {
namespace {

using ojson = nlohmann::ordered_json;

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

ojson config_to_json(const RunConfig& c) {
  ojson j;
  j["manifest"] = c.manifest;
  j["k"] = c.k;
  j["pair_budget"] = c.max_pairs ? ojson{{"max_pairs", *c.max_pairs}, {"seed", c.seed}} : ojson("all");
  j["aggregate"] = std::string(to_string(c.aggregate));
  j["mode"] = std::string(to_string(c.mode));
  j["epsilon"] = c.epsilon;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.manifest = j.value("manifest", std::string());
  c.k = j.value("k", kDefaultK);
  if (auto it = j.find("pair_budget"); it != j.end() && it->is_object()) {
    c.max_pairs = it->at("max_pairs").get<std::uint64_t>();
    c.seed = it->value("seed", std::uint64_t{0});
  }
  if (auto it = j.find("aggregate"); it != j.end()) c.aggregate = parse_aggregate(it->get<std::string>());
  if (auto it = j.find("mode"); it != j.end()) c.mode = parse_prune_mode(it->get<std::string>());
  c.epsilon = j.value("epsilon", kDefaultEpsilon);
  return c;
}

ojson layer_to_json(const LayerScore& l, const std::vector<std::string>& names) {
  ojson j;
  j["layer_index"] = l.layer_index;
  j["k"] = l.k_requested;
  j["k_used"] = l.k_used;
  j["macro"] = l.macro;
  j["micro"] = l.micro;
  j["baseline"] = l.baseline;
  j["num_scored_classes"] = l.classes.size();
  j["excluded_classes"] = l.excluded_classes;
  j["warnings"] = l.warnings;
  auto classes = ojson::array();
  for (const auto& c : l.classes) {
    ojson cj;
    cj["class_id"] = c.class_id;
    if (static_cast<std::size_t>(c.class_id) < names.size()) cj["class_name"] = names[c.class_id];
    cj["num_points"] = c.num_points;
    cj["num_pairs_evaluated"] = c.num_pairs_evaluated;
    cj["num_pairs_unreachable"] = c.num_pairs_unreachable;
    cj["mean_pair_score"] = c.mean_pair_score;
    cj["sampled"] = c.sampled;
    if (c.sampled) cj["seed"] = c.seed;
    classes.push_back(std::move(cj));
  }
  j["classes"] = std::move(classes);
  return j;
}

double number_or_missing(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && it->is_number() ? it->get<double>() : kMissing;
}

LayerScore layer_from_json(const nlohmann::json& j) {
  LayerScore l;
  l.layer_index = j.at("layer_index").get<std::int64_t>();
  l.k_requested = j.value("k", std::size_t{0});
  l.k_used = j.value("k_used", l.k_requested);
  l.macro = number_or_missing(j, "macro");
  l.micro = number_or_missing(j, "micro");
  l.baseline = number_or_missing(j, "baseline");
  l.excluded_classes = j.value("excluded_classes", std::vector<std::int32_t>{});
  l.warnings = j.value("warnings", std::vector<std::string>{});
  for (const auto& cj : j.value("classes", nlohmann::json::array())) {
    ClassScore c;
    c.class_id = cj.at("class_id").get<std::int32_t>();
    c.num_points = cj.value("num_points", std::size_t{0});
    c.num_pairs_evaluated = cj.value("num_pairs_evaluated", std::uint64_t{0});
    c.num_pairs_unreachable = cj.value("num_pairs_unreachable", std::uint64_t{0});
    c.mean_pair_score = cj.at("mean_pair_score").get<double>();
    c.score_sum = c.mean_pair_score * static_cast<double>(c.num_pairs_evaluated);
    c.sampled = cj.value("sampled", false);
    c.seed = cj.value("seed", std::uint64_t{0});
    l.classes.push_back(c);
  }
  return l;
}

}  // namespace

std::string_view to_string(Aggregate a) { return a == Aggregate::macro ? "macro" : "micro"; }

Aggregate parse_aggregate(std::string_view text) {
  if (text == "macro") return Aggregate::macro;
  if (text == "micro") return Aggregate::micro;
  fail(Errc::invalid_argument, "aggregate must be macro or micro, got \"" + std::string(text) + "\"");
}

std::string report_to_json(const ConvexityReport& r) {
  ojson doc;
  doc["tool_version"] = r.tool_version;
  doc["config"] = config_to_json(r.config);
  doc["dataset"] = {{"name", r.dataset_name}, {"class_names", r.class_names}};
  auto layers = ojson::array();
  for (const auto& l : r.layers) layers.push_back(layer_to_json(l, r.class_names));
  doc["layers"] = std::move(layers);
  return doc.dump(2) + "\n";
}

ConvexityReport report_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::manifest_syntax, std::string("report: ") + e.what());
  }
  ConvexityReport r;
  try {
    if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
      fail(Errc::manifest_field, "report needs a \"layers\" array");
    }
    r.tool_version = doc.value("tool_version", std::string());
    if (doc.contains("config")) r.config = config_from_json(doc["config"]);
    if (auto it = doc.find("dataset"); it != doc.end()) {
      r.dataset_name = it->value("name", std::string());
      r.class_names = it->value("class_names", std::vector<std::string>{});
    }
    for (const auto& lj : doc["layers"]) r.layers.push_back(layer_from_json(lj));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::manifest_field, std::string("report: ") + e.what());
  }
  return r;
}

std::string report_to_csv(const ConvexityReport& r) {
  std::set<std::int32_t> ids;
  for (const auto& l : r.layers) {
    for (const auto& c : l.classes) ids.insert(c.class_id);
  }
  std::ostringstream out;
  out << "layer,macro,micro,baseline";
  for (auto id : ids) out << ",class_" << id;
  out << '\n';
  for (const auto& l : r.layers) {
    out << l.layer_index << ',' << fmt("%.17g", l.macro) << ',' << fmt("%.17g", l.micro) << ','
        << fmt("%.17g", l.baseline);
    std::map<std::int32_t, double> by_id;
    for (const auto& c : l.classes) by_id[c.class_id] = c.mean_pair_score;
    for (auto id : ids) {
      out << ',';
      if (auto it = by_id.find(id); it != by_id.end()) out << fmt("%.17g", it->second);
    }
    out << '\n';
  }
  return out.str();
}

ConvexityCurve curve_from_report(const ConvexityReport& r, Aggregate aggregate) {
  if (r.layers.empty()) fail(Errc::empty_curve, "report has no layers");
  ConvexityCurve curve;
  for (const auto& l : r.layers) {
    const double v = aggregate == Aggregate::macro ? l.macro : l.micro;
    if (std::isnan(v)) {
      fail(Errc::missing_aggregate, "layer " + std::to_string(l.layer_index) + " has no \"" +
                                        std::string(to_string(aggregate)) + "\" score");
    }
    curve.push_back({l.layer_index, v});
  }
  validate_curve(curve);
  return curve;
}

std::string report_to_svg(const ConvexityReport& r) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 64, kRight = 150, kTop = 32, kBottom = 56;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  if (r.layers.empty()) fail(Errc::empty_curve, "report has no layers");
  const double first = static_cast<double>(r.layers.front().layer_index);
  const double last = static_cast<double>(r.layers.back().layer_index);
  const double span = last > first ? last - first : 1.0;
  auto x_of = [&](double layer) {
    return last > first ? kLeft + (layer - first) / span * plot_w : kLeft + plot_w / 2;
  };
  auto y_of = [&](double score) { return kTop + (1.0 - std::clamp(score, 0.0, 1.0)) * plot_h; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">Convexity per layer: "
    << xml_escape(r.dataset_name) << "</text>\n";

  // Axes and ticks.
  s << "<g stroke=\"black\" fill=\"none\">\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
    << kTop + plot_h << "\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
    << "\"/>\n</g>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    s << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt("%.2f", y_of(v)) << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << fmt("%.2f", y_of(v)) << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt("%.2f", y_of(v) + 4)
      << "\" text-anchor=\"end\">" << fmt("%.2f", v) << "</text>\n";
  }
  const std::size_t stride = std::max<std::size_t>(1, (r.layers.size() + 11) / 12);
  for (std::size_t i = 0; i < r.layers.size(); i += stride) {
    const double x = x_of(static_cast<double>(r.layers[i].layer_index));
    s << "<text x=\"" << fmt("%.2f", x) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
      << r.layers[i].layer_index << "</text>\n";
  }
  s << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14 << "\" text-anchor=\"middle\">layer</text>\n";
  s << "<text transform=\"translate(18 " << kTop + plot_h / 2
    << ") rotate(-90)\" text-anchor=\"middle\">convexity</text>\n";

  struct Series {
    const char* name;
    const char* colour;
    const char* dash;
    double LayerScore::*field;
  };
  const Series series[] = {{"macro", "#1f77b4", "", &LayerScore::macro},
                           {"micro", "#ff7f0e", "", &LayerScore::micro},
                           {"baseline 1/c", "#7f7f7f", " stroke-dasharray=\"6 4\"", &LayerScore::baseline}};
  int row = 0;
  for (const auto& sr : series) {
    s << "<polyline fill=\"none\" stroke=\"" << sr.colour << "\" stroke-width=\"2\"" << sr.dash << " points=\"";
    for (std::size_t i = 0; i < r.layers.size(); ++i) {
      if (i) s << ' ';
      s << fmt("%.2f", x_of(static_cast<double>(r.layers[i].layer_index))) << ','
        << fmt("%.2f", y_of(r.layers[i].*sr.field));
    }
    s << "\"/>\n";
    if (sr.field != &LayerScore::baseline) {
      for (const auto& l : r.layers) {
        s << "<circle cx=\"" << fmt("%.2f", x_of(static_cast<double>(l.layer_index))) << "\" cy=\""
          << fmt("%.2f", y_of(l.*sr.field)) << "\" r=\"3\" fill=\"" << sr.colour << "\"/>\n";
      }
    }
    const double ly = kTop + 12 + 20 * row++;
    s << "<line x1=\"" << kWidth - kRight + 16 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 40
      << "\" y2=\"" << ly << "\" stroke=\"" << sr.colour << "\" stroke-width=\"2\"" << sr.dash << "/>\n";
    s << "<text x=\"" << kWidth - kRight + 46 << "\" y=\"" << ly + 4 << "\">" << sr.name << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace graphcvx
