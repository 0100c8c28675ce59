#include "graphcvx/path_engine.hpp"

#include <algorithm>
#include <functional>

#include "graphcvx/errors.hpp"

namespace graphcvx {

DijkstraWorkspace::DijkstraWorkspace(std::size_t n)
    : dist_(n, kUnreachable), pred_(n, kNoVertex), settled_(n, 0), is_target_(n, 0) {}

void DijkstraWorkspace::reset() {
  for (VertexId v : touched_) {
    dist_[v] = kUnreachable;
    pred_[v] = kNoVertex;
    settled_[v] = 0;
    is_target_[v] = 0;
  }
  touched_.clear();
  heap_.clear();
}

void DijkstraWorkspace::run(const KnnGraph& g, VertexId source, std::span<const VertexId> targets) {
  if (g.size() != dist_.size()) fail(Errc::invalid_argument, "workspace sized for another graph");
  if (source >= g.size()) fail(Errc::invalid_argument, "source out of range");
  reset();
  source_ = source;

  std::size_t pending = 0;
  for (VertexId t : targets) {
    if (t >= g.size()) fail(Errc::invalid_argument, "target out of range");
    if (!is_target_[t]) {
      is_target_[t] = 1;
      touched_.push_back(t);
      ++pending;
    }
  }
  const bool stop_early = pending > 0;

  const auto later = std::greater<Entry>{};
  dist_[source] = 0.0;
  touched_.push_back(source);
  heap_.push_back({0.0, source});

  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), later);
    const Entry top = heap_.back();
    heap_.pop_back();
    const VertexId u = top.id;
    // Stale entries carry a larger distance than the current one because
    // distances only ever strictly decrease.
    if (settled_[u] || top.dist != dist_[u]) continue;
    settled_[u] = 1;
    if (stop_early && is_target_[u] && --pending == 0) break;

    const double du = dist_[u];
    for (const Edge& e : g.neighbors(u)) {
      const VertexId v = e.to;
      if (settled_[v]) continue;
      const double cand = du + e.weight;
      if (cand < dist_[v]) {
        if (dist_[v] == kUnreachable) touched_.push_back(v);
        dist_[v] = cand;
        pred_[v] = u;
        heap_.push_back({cand, v});
        std::push_heap(heap_.begin(), heap_.end(), later);
      }
    }
  }
}

ShortestPathTree DijkstraWorkspace::tree() const {
  ShortestPathTree t;
  t.source = source_;
  t.dist.assign(dist_.size(), kUnreachable);
  t.pred.assign(pred_.size(), kNoVertex);
  for (std::size_t v = 0; v < dist_.size(); ++v) {
    if (settled_[v]) {
      t.dist[v] = dist_[v];
      t.pred[v] = pred_[v];
    }
  }
  return t;
}

ShortestPathTree sssp(const KnnGraph& g, VertexId source) {
  DijkstraWorkspace ws(g.size());
  ws.run(g, source);
  return ws.tree();
}

std::optional<Path> reconstruct_path(const ShortestPathTree& tree, VertexId target) {
  if (target >= tree.dist.size()) fail(Errc::invalid_argument, "target out of range");
  if (!tree.reachable(target)) return std::nullopt;
  Path path{target};
  VertexId v = target;
  while (v != tree.source) {
    v = tree.pred[v];
    if (v == kNoVertex || path.size() > tree.dist.size()) {
      fail(Errc::invariant, "predecessor chain does not reach the source");
    }
    path.push_back(v);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace graphcvx
