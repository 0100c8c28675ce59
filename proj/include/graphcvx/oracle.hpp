#pragma once

// Brute-force reference for the scoring engine. Written from the definition,
// sharing only the tie-break rules with the engine, never its code: dense
// distance matrix, full row sorts, O(V^2) array-scan Dijkstra and a plain
// double loop over same-class pairs. Single-threaded, small inputs only.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "graphcvx/convexity.hpp"
#include "graphcvx/embed_io.hpp"

namespace graphcvx::oracle {

inline constexpr std::size_t kMaxPoints = 500;
inline constexpr std::size_t kMaxEnumerationPoints = 12;

// Dense symmetric weight matrix; +inf marks a missing edge.
struct DenseGraph {
  std::size_t n = 0;
  std::vector<double> w;

  double at(std::size_t u, std::size_t v) const { return w[u * n + v]; }
  bool edge(std::size_t u, std::size_t v) const;
};

struct Tree {
  std::vector<double> dist;
  std::vector<std::int64_t> pred;  // -1 for none
};

// Full n x n distances, each row sorted by (distance, id), first k kept,
// then union-symmetrized. Refuses n > kMaxPoints.
DenseGraph knn_graph(const EmbeddingMatrix& m, std::size_t k);

Tree dijkstra(const DenseGraph& g, std::size_t source);

// Shortest distances by enumerating every simple path (n <= 12).
std::vector<double> simple_path_distances(const DenseGraph& g, std::size_t source);

// All-pairs distances.
std::vector<double> floyd_warshall(const DenseGraph& g);

LayerScore oracle_convexity(const EmbeddingMatrix& m, const LabelVector& labels, std::size_t k);

}  // namespace graphcvx::oracle
