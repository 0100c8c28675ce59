#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "graphcvx/knn_graph.hpp"

namespace graphcvx {

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// Vertices from source to target, both inclusive.
using Path = std::vector<VertexId>;

struct ShortestPathTree {
  VertexId source = 0;
  std::vector<double> dist;    // kUnreachable where no path exists
  std::vector<VertexId> pred;  // kNoVertex for the source and unreachable vertices

  bool reachable(VertexId v) const { return dist[v] != kUnreachable; }
};

// Dijkstra with a fully specified tie-break, so every (source, target) pair
// has one canonical shortest path:
//  * vertices settle in ascending (distance, id) order;
//  * a tentative distance is replaced only on strict improvement;
//  * neighbours are relaxed in ascending id order (KnnGraph guarantees this).
//
// The workspace keeps its arrays between runs and only resets what it
// touched, so one instance per thread can serve many sources.
class DijkstraWorkspace {
 public:
  explicit DijkstraWorkspace(std::size_t n);

  // Runs from `source`. With a non-empty `targets`, stops as soon as all of
  // them are settled; dist/pred of settled vertices are final either way.
  void run(const KnnGraph& g, VertexId source, std::span<const VertexId> targets = {});

  VertexId source() const { return source_; }
  double dist(VertexId v) const { return dist_[v]; }
  VertexId pred(VertexId v) const { return pred_[v]; }
  bool settled(VertexId v) const { return settled_[v] != 0; }

  ShortestPathTree tree() const;

 private:
  struct Entry {
    double dist;
    VertexId id;
    bool operator>(const Entry& o) const { return dist > o.dist || (dist == o.dist && id > o.id); }
  };

  void reset();

  VertexId source_ = 0;
  std::vector<double> dist_;
  std::vector<VertexId> pred_;
  std::vector<unsigned char> settled_;
  std::vector<unsigned char> is_target_;
  std::vector<VertexId> touched_;
  std::vector<Entry> heap_;
};

ShortestPathTree sssp(const KnnGraph& g, VertexId source);

// Canonical path source -> target, or nullopt when unreachable.
std::optional<Path> reconstruct_path(const ShortestPathTree& tree, VertexId target);

}  // namespace graphcvx
