#include "graphcvx/prune_rule.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "graphcvx/errors.hpp"

namespace graphcvx {

std::string_view to_string(PruneMode mode) {
  return mode == PruneMode::argmax ? "argmax" : "plateau";
}

PruneMode parse_prune_mode(std::string_view text) {
  if (text == "argmax") return PruneMode::argmax;
  if (text == "plateau") return PruneMode::plateau;
  fail(Errc::invalid_argument, "mode must be argmax or plateau, got \"" + std::string(text) + "\"");
}

void validate_curve(const ConvexityCurve& curve) {
  if (curve.empty()) fail(Errc::empty_curve, "no layers in curve");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!std::isfinite(curve[i].score)) fail(Errc::non_finite, "score of layer " + std::to_string(curve[i].layer_index));
    if (i > 0 && curve[i].layer_index <= curve[i - 1].layer_index) {
      fail(Errc::layer_order, "layer " + std::to_string(curve[i].layer_index) + " follows layer " +
                                  std::to_string(curve[i - 1].layer_index));
    }
  }
}

PruneDecision select_prune_layer(const ConvexityCurve& curve, PruneMode mode, double epsilon) {
  validate_curve(curve);
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail(Errc::invalid_argument, "epsilon must be finite and >= 0");

  double best = curve.front().score;
  for (const auto& p : curve) best = std::max(best, p.score);
  const double tolerance = mode == PruneMode::argmax ? 0.0 : epsilon;

  PruneDecision d;
  d.mode = mode;
  d.epsilon = epsilon;
  d.curve = curve;
  for (const auto& p : curve) {
    if (best - p.score <= tolerance) {
      d.selected_layer = p.layer_index;
      break;
    }
  }
  return d;
}

double parameter_reduction_estimate(std::int64_t total_layers, std::int64_t pruned_to,
                                    double per_layer_params, double non_layer_params) {
  if (total_layers <= 0) fail(Errc::invalid_argument, "total_layers must be positive");
  if (pruned_to < 0 || pruned_to > total_layers) {
    fail(Errc::invalid_argument, "pruned_to must lie in [0, " + std::to_string(total_layers) + "]");
  }
  if (!(per_layer_params > 0.0) || !(non_layer_params >= 0.0)) {
    fail(Errc::invalid_argument, "parameter counts must be positive");
  }
  const auto layers = static_cast<double>(total_layers);
  return static_cast<double>(total_layers - pruned_to) * per_layer_params /
         (layers * per_layer_params + non_layer_params);
}

std::string decision_to_json(const PruneDecision& decision) {
  nlohmann::ordered_json doc;
  doc["mode"] = std::string(to_string(decision.mode));
  doc["epsilon"] = decision.epsilon;
  doc["selected_layer"] = decision.selected_layer;
  auto curve = nlohmann::ordered_json::array();
  for (const auto& p : decision.curve) curve.push_back({p.layer_index, p.score});
  doc["curve"] = std::move(curve);
  return doc.dump(2) + "\n";
}

}  // namespace graphcvx
