#pragma once

// Graph convexity of labelled classes. For every unordered same-class pair
// the canonical shortest path is taken from the tree rooted at the smaller
// vertex id; the pair scores the fraction of interior path vertices that
// share the class (1 for a direct edge, 0 when unreachable). Class scores
// average their pairs; the layer reports the unweighted mean over classes
// (macro), the pair-weighted mean (micro) and the 1/c random-label baseline.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphcvx/embed_io.hpp"
#include "graphcvx/knn_graph.hpp"
#include "graphcvx/path_engine.hpp"

namespace graphcvx {

inline constexpr std::uint64_t kDefaultMaxPairs = 2'000'000;

// Either every pair, or at most max_pairs pairs per class drawn uniformly
// without replacement from a seeded generator.
struct PairBudget {
  std::optional<std::uint64_t> max_pairs;
  std::uint64_t seed = 0;

  static PairBudget all() { return {}; }
  static PairBudget sampled(std::uint64_t max_pairs, std::uint64_t seed) { return {max_pairs, seed}; }
};

struct ClassScore {
  std::int32_t class_id = 0;
  std::size_t num_points = 0;
  std::uint64_t num_pairs_evaluated = 0;
  std::uint64_t num_pairs_unreachable = 0;
  double score_sum = 0.0;  // sum of pair scores
  double mean_pair_score = 0.0;
  bool sampled = false;
  std::uint64_t seed = 0;  // meaningful only when sampled
};

struct LayerScore {
  std::int64_t layer_index = 0;
  std::vector<ClassScore> classes;                // ascending class id
  std::vector<std::int32_t> excluded_classes;     // fewer than two points
  double macro = 0.0;
  double micro = 0.0;
  double baseline = 0.0;  // 1 / number of scored classes
  std::size_t k_requested = 0;
  std::size_t k_used = 0;
  std::vector<std::string> warnings;
};

// Fraction of interior vertices labelled `class_id`. nullopt (unreachable)
// scores 0, a path without interior vertices scores 1.
double pair_score(const std::optional<Path>& path, const LabelVector& labels, std::int32_t class_id);

struct ScoreOptions {
  int threads = 0;  // 0: OpenMP default
};

// Throws Error{invalid_argument} when the class has fewer than two points.
ClassScore class_convexity(const KnnGraph& g, const LabelVector& labels, std::int32_t class_id,
                           const PairBudget& budget = PairBudget::all(), const ScoreOptions& opts = {});

// Throws Error{no_scorable_class} when no class has two or more points.
LayerScore layer_convexity(const KnnGraph& g, const LabelVector& labels,
                           const PairBudget& budget = PairBudget::all(), const ScoreOptions& opts = {});

// Same result computed on one thread with materialized paths; the reference
// for the parallel scorer.
LayerScore layer_convexity_serial(const KnnGraph& g, const LabelVector& labels,
                                  const PairBudget& budget = PairBudget::all());

// Builds the graph for one layer and scores it.
LayerScore score_layer(const EmbeddingMatrix& m, const LabelVector& labels, std::size_t k,
                       const PairBudget& budget = PairBudget::all(), int threads = 0);

}  // namespace graphcvx
