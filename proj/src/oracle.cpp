#include "graphcvx/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "graphcvx/errors.hpp"

namespace graphcvx::oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void dfs(const DenseGraph& g, std::size_t v, double length, std::vector<char>& on_path,
         std::vector<double>& best) {
  best[v] = std::min(best[v], length);
  for (std::size_t u = 0; u < g.n; ++u) {
    if (!on_path[u] && g.edge(v, u)) {
      on_path[u] = 1;
      dfs(g, u, length + g.at(v, u), on_path, best);
      on_path[u] = 0;
    }
  }
}

}  // namespace

bool DenseGraph::edge(std::size_t u, std::size_t v) const { return at(u, v) != kInf; }

DenseGraph knn_graph(const EmbeddingMatrix& m, std::size_t k) {
  const std::size_t n = m.rows;
  if (n > kMaxPoints) fail(Errc::too_large, "oracle refuses n=" + std::to_string(n));
  if (k == 0) fail(Errc::invalid_argument, "k must be at least 1");
  k = std::min(k, n - 1);

  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < m.cols; ++t) {
        const double a = m.values[i * m.cols + t];
        const double b = m.values[j * m.cols + t];
        s += (a - b) * (a - b);
      }
      dist[i * n + j] = std::sqrt(s);
    }
  }

  DenseGraph g{n, std::vector<double>(n * n, kInf)};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> row;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.emplace_back(dist[i * n + j], j);
    }
    std::sort(row.begin(), row.end());
    for (std::size_t r = 0; r < k; ++r) {
      const auto [d, j] = row[r];
      g.w[i * n + j] = d;
      g.w[j * n + i] = d;
    }
  }
  return g;
}

Tree dijkstra(const DenseGraph& g, std::size_t source) {
  Tree t{std::vector<double>(g.n, kInf), std::vector<std::int64_t>(g.n, -1)};
  std::vector<char> done(g.n, 0);
  t.dist[source] = 0.0;
  for (;;) {
    // Smallest (distance, id) among unsettled reachable vertices.
    std::size_t u = g.n;
    for (std::size_t v = 0; v < g.n; ++v) {
      if (!done[v] && t.dist[v] != kInf && (u == g.n || t.dist[v] < t.dist[u])) u = v;
    }
    if (u == g.n) break;
    done[u] = 1;
    for (std::size_t v = 0; v < g.n; ++v) {
      if (done[v] || !g.edge(u, v)) continue;
      if (t.dist[u] + g.at(u, v) < t.dist[v]) {
        t.dist[v] = t.dist[u] + g.at(u, v);
        t.pred[v] = static_cast<std::int64_t>(u);
      }
    }
  }
  return t;
}

std::vector<double> simple_path_distances(const DenseGraph& g, std::size_t source) {
  if (g.n > kMaxEnumerationPoints) fail(Errc::too_large, "path enumeration refuses n=" + std::to_string(g.n));
  std::vector<double> best(g.n, kInf);
  std::vector<char> on_path(g.n, 0);
  on_path[source] = 1;
  dfs(g, source, 0.0, on_path, best);
  return best;
}

std::vector<double> floyd_warshall(const DenseGraph& g) {
  std::vector<double> d = g.w;
  for (std::size_t i = 0; i < g.n; ++i) d[i * g.n + i] = 0.0;
  for (std::size_t k = 0; k < g.n; ++k) {
    for (std::size_t i = 0; i < g.n; ++i) {
      for (std::size_t j = 0; j < g.n; ++j) {
        d[i * g.n + j] = std::min(d[i * g.n + j], d[i * g.n + k] + d[k * g.n + j]);
      }
    }
  }
  return d;
}

LayerScore oracle_convexity(const EmbeddingMatrix& m, const LabelVector& labels, std::size_t k) {
  if (labels.size() != m.rows) fail(Errc::count_mismatch, "labels do not match points");
  const DenseGraph g = knn_graph(m, k);
  const std::size_t n = m.rows;

  LayerScore out;
  out.layer_index = m.layer_index;
  out.k_requested = k;
  out.k_used = std::min(k, n - 1);

  double mean_sum = 0.0, pair_sum = 0.0;
  std::uint64_t total_pairs = 0;
  for (std::size_t c = 0; c < labels.num_classes; ++c) {
    const auto cls = static_cast<std::int32_t>(c);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels.labels[i] == cls) members.push_back(i);
    }
    if (members.size() < 2) {
      out.excluded_classes.push_back(cls);
      continue;
    }
    ClassScore s;
    s.class_id = cls;
    s.num_points = members.size();
    for (std::size_t a = 0; a < members.size(); ++a) {
      const Tree tree = dijkstra(g, members[a]);
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const std::size_t y = members[b];
        ++s.num_pairs_evaluated;
        if (tree.dist[y] == kInf) {
          ++s.num_pairs_unreachable;
          continue;
        }
        std::size_t inner = 0, in_class = 0;
        for (auto v = tree.pred[y]; v != static_cast<std::int64_t>(members[a]); v = tree.pred[static_cast<std::size_t>(v)]) {
          ++inner;
          in_class += labels.labels[static_cast<std::size_t>(v)] == cls;
        }
        s.score_sum += inner == 0 ? 1.0 : static_cast<double>(in_class) / static_cast<double>(inner);
      }
    }
    s.mean_pair_score = s.score_sum / static_cast<double>(s.num_pairs_evaluated);
    mean_sum += s.mean_pair_score;
    pair_sum += s.score_sum;
    total_pairs += s.num_pairs_evaluated;
    out.classes.push_back(s);
  }
  if (out.classes.empty()) fail(Errc::no_scorable_class, "every class has fewer than two points");
  out.macro = mean_sum / static_cast<double>(out.classes.size());
  out.micro = pair_sum / static_cast<double>(total_pairs);
  out.baseline = 1.0 / static_cast<double>(out.classes.size());
  return out;
}

}  // namespace graphcvx::oracle
