#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphcvx/convexity.hpp"
#include "graphcvx/prune_rule.hpp"

namespace graphcvx {

enum class Aggregate { macro, micro };

std::string_view to_string(Aggregate a);
Aggregate parse_aggregate(std::string_view text);

// Everything that determines a report's numbers. Thread count and output
// locations are deliberately not serialized: they cannot change the result
// and would break byte-identical reports across runs.
struct RunConfig {
  std::string manifest;
  std::size_t k = kDefaultK;
  std::optional<std::uint64_t> max_pairs;  // nullopt: all pairs
  std::uint64_t seed = 0;
  Aggregate aggregate = Aggregate::macro;
  PruneMode mode = PruneMode::plateau;
  double epsilon = kDefaultEpsilon;
  int threads = 0;
  std::string out;

  PairBudget budget() const {
    return max_pairs ? PairBudget::sampled(*max_pairs, seed) : PairBudget::all();
  }
};

struct ConvexityReport {
  std::string tool_version;
  RunConfig config;
  std::string dataset_name;
  std::vector<std::string> class_names;
  std::vector<LayerScore> layers;  // ascending layer index
};

std::string report_to_json(const ConvexityReport& report);
ConvexityReport report_from_json(const std::string& text);

// layer, macro, micro, baseline, then one column per class id.
std::string report_to_csv(const ConvexityReport& report);

// Throws Error{empty_curve} for a report without layers.
ConvexityCurve curve_from_report(const ConvexityReport& report, Aggregate aggregate);

// Macro and micro polylines plus the baseline, one marker per layer.
std::string report_to_svg(const ConvexityReport& report);

}  // namespace graphcvx
