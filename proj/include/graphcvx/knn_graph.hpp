#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "graphcvx/embed_io.hpp"

namespace graphcvx {

using VertexId = std::uint32_t;

inline constexpr std::size_t kDefaultK = 10;

struct Neighbor {
  VertexId id = 0;
  double dist = 0.0;

  // Ranking used for top-k: distance first, then the smaller id.
  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
  }
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct Edge {
  VertexId to = 0;
  double weight = 0.0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct KnnOptions {
  std::size_t block_rows = 256;  // query rows per work item
  int threads = 0;               // 0: OpenMP default
};

// Undirected weighted graph in CSR form. Every edge is stored in both
// directions with the same weight; each adjacency list is sorted by
// neighbour id. Immutable once built.
class KnnGraph {
 public:
  KnnGraph() = default;

  // Symmetrizes directed neighbour lists by union. lists[u] holds u's
  // outgoing neighbours (any order, no self loops).
  static KnnGraph from_directed(const std::vector<std::vector<Neighbor>>& lists,
                                std::size_t k_requested, std::size_t k_used);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return edges_.size() / 2; }  // undirected
  std::size_t k_requested() const { return k_requested_; }
  std::size_t k_used() const { return k_used_; }

  std::span<const Edge> neighbors(VertexId v) const {
    return {edges_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  // Set when k had to be clamped; not an error.
  const std::vector<std::string>& warnings() const { return warnings_; }

  friend bool operator==(const KnnGraph& a, const KnnGraph& b) {
    return a.offsets_ == b.offsets_ && a.edges_ == b.edges_;
  }

 private:
  friend KnnGraph build_knn_graph(const EmbeddingMatrix&, std::size_t, const KnnOptions&);
  friend KnnGraph build_knn_graph_serial(const EmbeddingMatrix&, std::size_t);

  std::vector<std::size_t> offsets_;
  std::vector<Edge> edges_;
  std::size_t k_requested_ = 0;
  std::size_t k_used_ = 0;
  std::vector<std::string> warnings_;
};

// Euclidean distance as used everywhere: f32 inputs widened to f64, squared
// differences summed in dimension order, then sqrt.
double euclidean(std::span<const float> a, std::span<const float> b);

// Exact top-k (by distance, then id; self excluded) for query rows
// [row_begin, row_end). Only O(block * n) distances are live at a time.
// Each result list is sorted best first.
std::vector<std::vector<Neighbor>> pairwise_topk(const EmbeddingMatrix& m, std::size_t row_begin,
                                                 std::size_t row_end, std::size_t k,
                                                 const KnnOptions& opts = {});

// OpenMP-parallel construction. k >= n is clamped to n-1 with a warning.
KnnGraph build_knn_graph(const EmbeddingMatrix& m, std::size_t k, const KnnOptions& opts = {});

// Single-threaded scalar construction, kept as the reference for the tiled
// kernel. Produces the identical graph.
KnnGraph build_knn_graph_serial(const EmbeddingMatrix& m, std::size_t k);

// Rows "u,v,weight" with u < v, weight to 17 significant digits.
void write_graph_csv(const KnnGraph& g, std::ostream& out);

}  // namespace graphcvx
