#include "graphcvx/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "graphcvx/errors.hpp"
#include "graphcvx/parallel.hpp"

namespace graphcvx {
namespace {

constexpr std::size_t kLanes = 8;        // candidate rows per tile
constexpr std::size_t kGroup = 4;        // queries sharing one pass over a tile
constexpr std::size_t kChunkRows = 32;   // queries kept hot while tiles stream by

// Bounded best-k list, sorted best first.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  void offer(Neighbor cand) {
    if (items_.size() == k_) {
      if (k_ == 0 || !(cand < items_.back())) return;
      items_.pop_back();
    }
    auto pos = std::upper_bound(items_.begin(), items_.end(), cand);
    items_.insert(pos, cand);
  }

  std::vector<Neighbor> take() { return std::move(items_); }

 private:
  std::size_t k_;
  std::vector<Neighbor> items_;
};

// All rows widened to f64 and laid out in tiles of kLanes rows, transposed so
// that one dimension of eight candidates is contiguous. Padding lanes are 0.
struct TiledRows {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t tiles = 0;
  std::vector<double> data;

  explicit TiledRows(const EmbeddingMatrix& m)
      : rows(m.rows), cols(m.cols), tiles((m.rows + kLanes - 1) / kLanes),
        data(tiles * m.cols * kLanes, 0.0) {
    for (std::size_t r = 0; r < rows; ++r) {
      double* tile = data.data() + (r / kLanes) * cols * kLanes;
      const std::size_t lane = r % kLanes;
      const float* src = m.values.data() + r * cols;
      for (std::size_t t = 0; t < cols; ++t) tile[t * kLanes + lane] = src[t];
    }
  }

  const double* tile(std::size_t i) const { return data.data() + i * cols * kLanes; }
};

// Squared distances from G queries to the kLanes rows of one tile. Each
// accumulator is a running sum over dimensions in order, so every pair gets
// exactly the same arithmetic as euclidean().
template <std::size_t G>
inline void tile_kernel(const double* const* queries, const double* tile, std::size_t cols,
                        double (&acc)[kGroup][kLanes]) {
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[g][l] = 0.0;
  }
  for (std::size_t t = 0; t < cols; ++t) {
    const double* cand = tile + t * kLanes;
    for (std::size_t g = 0; g < G; ++g) {
      const double q = queries[g][t];
#pragma omp simd
      for (std::size_t l = 0; l < kLanes; ++l) {
        const double diff = q - cand[l];
        acc[g][l] += diff * diff;
      }
    }
  }
}

template <std::size_t G>
void score_group(const TiledRows& tiled, const double* const* queries, const std::size_t* query_ids,
                 TopK* const* heaps) {
  double acc[kGroup][kLanes];
  for (std::size_t ti = 0; ti < tiled.tiles; ++ti) {
    tile_kernel<G>(queries, tiled.tile(ti), tiled.cols, acc);
    const std::size_t base = ti * kLanes;
    const std::size_t live = std::min(kLanes, tiled.rows - base);
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t l = 0; l < live; ++l) {
        const std::size_t j = base + l;
        if (j == query_ids[g]) continue;
        heaps[g]->offer({static_cast<VertexId>(j), std::sqrt(acc[g][l])});
      }
    }
  }
}

// Top-k for one contiguous run of queries, single-threaded.
void topk_chunk(const TiledRows& tiled, const EmbeddingMatrix& m, std::size_t begin, std::size_t end,
                std::size_t k, std::vector<std::vector<Neighbor>>& out, std::size_t out_offset) {
  const std::size_t cols = m.cols;
  std::vector<double> qbuf(kChunkRows * cols);
  std::vector<TopK> heaps;
  for (std::size_t c0 = begin; c0 < end; c0 += kChunkRows) {
    const std::size_t c1 = std::min(end, c0 + kChunkRows);
    heaps.assign(c1 - c0, TopK(k));
    for (std::size_t r = c0; r < c1; ++r) {
      const float* src = m.values.data() + r * cols;
      std::copy(src, src + cols, qbuf.begin() + static_cast<std::ptrdiff_t>((r - c0) * cols));
    }
    // Process the chunk group by group; each group streams all tiles.
    for (std::size_t g0 = c0; g0 < c1; g0 += kGroup) {
      const std::size_t gn = std::min(kGroup, c1 - g0);
      const double* queries[kGroup];
      std::size_t ids[kGroup];
      TopK* hp[kGroup];
      for (std::size_t g = 0; g < gn; ++g) {
        queries[g] = qbuf.data() + (g0 + g - c0) * cols;
        ids[g] = g0 + g;
        hp[g] = &heaps[g0 + g - c0];
      }
      switch (gn) {
        case 4: score_group<4>(tiled, queries, ids, hp); break;
        case 3: score_group<3>(tiled, queries, ids, hp); break;
        case 2: score_group<2>(tiled, queries, ids, hp); break;
        default: score_group<1>(tiled, queries, ids, hp); break;
      }
    }
    for (std::size_t r = c0; r < c1; ++r) out[r - out_offset] = heaps[r - c0].take();
  }
}

std::vector<std::vector<Neighbor>> topk_range(const TiledRows& tiled, const EmbeddingMatrix& m,
                                              std::size_t begin, std::size_t end, std::size_t k,
                                              const KnnOptions& opts) {
  std::vector<std::vector<Neighbor>> out(end - begin);
  const std::size_t block = std::max<std::size_t>(1, opts.block_rows);
  const auto blocks = static_cast<std::int64_t>((end - begin + block - 1) / block);
  // Each block writes a disjoint slice of `out`, so the schedule cannot
  // affect the result.
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(opts.threads))
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t lo = begin + static_cast<std::size_t>(b) * block;
    const std::size_t hi = std::min(end, lo + block);
    topk_chunk(tiled, m, lo, hi, k, out, begin);
  }
  return out;
}

std::size_t clamp_k(const EmbeddingMatrix& m, std::size_t k, std::vector<std::string>* warnings) {
  if (k == 0) fail(Errc::invalid_argument, "k must be at least 1");
  if (m.rows == 0) fail(Errc::empty_matrix, "no points");
  if (k >= m.rows) {
    const std::size_t used = m.rows - 1;
    if (warnings) {
      warnings->push_back("k=" + std::to_string(k) + " >= n=" + std::to_string(m.rows) +
                          "; clamped to " + std::to_string(used));
    }
    return used;
  }
  return k;
}

}  // namespace

KnnGraph KnnGraph::from_directed(const std::vector<std::vector<Neighbor>>& lists,
                                 std::size_t k_requested, std::size_t k_used) {
  const std::size_t n = lists.size();
  std::vector<std::vector<Edge>> adj(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& nb : lists[u]) {
      if (nb.id >= n || nb.id == u) fail(Errc::invariant, "bad neighbour in directed list");
      adj[u].push_back({nb.id, nb.dist});
      adj[nb.id].push_back({static_cast<VertexId>(u), nb.dist});
    }
  }
  KnnGraph g;
  g.k_requested_ = k_requested;
  g.k_used_ = k_used;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) {
    auto& list = adj[u];
    std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    auto last = std::unique(list.begin(), list.end(), [](const Edge& a, const Edge& b) {
      if (a.to != b.to) return false;
      if (a.weight != b.weight) fail(Errc::invariant, "asymmetric edge weight");
      return true;
    });
    list.erase(last, list.end());
    g.offsets_[u + 1] = g.offsets_[u] + list.size();
  }
  g.edges_.reserve(g.offsets_[n]);
  for (auto& list : adj) g.edges_.insert(g.edges_.end(), list.begin(), list.end());
  return g;
}

double euclidean(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double diff = static_cast<double>(a[t]) - static_cast<double>(b[t]);
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::vector<std::vector<Neighbor>> pairwise_topk(const EmbeddingMatrix& m, std::size_t row_begin,
                                                 std::size_t row_end, std::size_t k,
                                                 const KnnOptions& opts) {
  if (row_begin > row_end || row_end > m.rows) fail(Errc::invalid_argument, "query block out of bounds");
  const TiledRows tiled(m);
  return topk_range(tiled, m, row_begin, row_end, std::min(k, m.rows - 1), opts);
}

KnnGraph build_knn_graph(const EmbeddingMatrix& m, std::size_t k, const KnnOptions& opts) {
  validate(m);
  std::vector<std::string> warnings;
  const std::size_t used = clamp_k(m, k, &warnings);
  const TiledRows tiled(m);
  auto lists = topk_range(tiled, m, 0, m.rows, used, opts);
  KnnGraph g = KnnGraph::from_directed(lists, k, used);
  g.warnings_ = std::move(warnings);
  return g;
}

KnnGraph build_knn_graph_serial(const EmbeddingMatrix& m, std::size_t k) {
  validate(m);
  std::vector<std::string> warnings;
  const std::size_t used = clamp_k(m, k, &warnings);
  std::vector<std::vector<Neighbor>> lists(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    TopK best(used);
    for (std::size_t j = 0; j < m.rows; ++j) {
      if (j != i) best.offer({static_cast<VertexId>(j), euclidean(m.row(i), m.row(j))});
    }
    lists[i] = best.take();
  }
  KnnGraph g = KnnGraph::from_directed(lists, k, used);
  g.warnings_ = std::move(warnings);
  return g;
}

void write_graph_csv(const KnnGraph& g, std::ostream& out) {
  char buf[64];
  for (VertexId u = 0; u < g.size(); ++u) {
    for (const auto& e : g.neighbors(u)) {
      if (e.to <= u) continue;
      std::snprintf(buf, sizeof buf, "%.17g", e.weight);
      out << u << ',' << e.to << ',' << buf << '\n';
    }
  }
}

}  // namespace graphcvx
