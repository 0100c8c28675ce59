#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace graphcvx {

struct CurvePoint {
  std::int64_t layer_index = 0;
  double score = 0.0;
};

// Per-layer scores, layer indices strictly increasing, at least one point.
using ConvexityCurve = std::vector<CurvePoint>;

enum class PruneMode { argmax, plateau };

inline constexpr double kDefaultEpsilon = 0.01;

std::string_view to_string(PruneMode mode);
PruneMode parse_prune_mode(std::string_view text);

struct PruneDecision {
  std::int64_t selected_layer = 0;
  PruneMode mode = PruneMode::plateau;
  double epsilon = 0.0;
  ConvexityCurve curve;
};

void validate_curve(const ConvexityCurve& curve);

// argmax: earliest layer attaining the maximum. plateau: earliest layer
// whose score is within epsilon of the maximum, i.e. no later layer improves
// on it by more than epsilon. Both prefer the smaller model on ties.
PruneDecision select_prune_layer(const ConvexityCurve& curve, PruneMode mode,
                                 double epsilon = kDefaultEpsilon);

// Fraction of all parameters removed by keeping `pruned_to` of
// `total_layers` identical layers.
double parameter_reduction_estimate(std::int64_t total_layers, std::int64_t pruned_to,
                                    double per_layer_params, double non_layer_params);

// {"mode", "epsilon", "selected_layer", "curve": [[layer, score], ...]}
std::string decision_to_json(const PruneDecision& decision);

}  // namespace graphcvx
