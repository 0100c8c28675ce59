#include "graphcvx/convexity.hpp"

#include <algorithm>
#include <exception>
#include <random>
#include <span>
#include <unordered_set>

#include "graphcvx/errors.hpp"
#include "graphcvx/parallel.hpp"
#include "graphcvx/rng.hpp"

namespace graphcvx {
namespace {

// Pairs of one class, grouped by their smaller endpoint (the tree root).
struct ClassPlan {
  std::int32_t class_id = 0;
  std::vector<VertexId> members;                // ascending
  bool sampled = false;
  std::vector<std::vector<VertexId>> targets;   // per member, only when sampled

  std::span<const VertexId> targets_of(std::size_t member_pos) const {
    if (sampled) return targets[member_pos];
    return std::span<const VertexId>(members).subspan(member_pos + 1);
  }
};

struct SourceTask {
  std::size_t plan = 0;
  std::size_t member_pos = 0;
};

struct SourceResult {
  double sum = 0.0;
  std::uint64_t pairs = 0;
  std::uint64_t unreachable = 0;
};

std::vector<std::vector<VertexId>> members_by_class(const LabelVector& labels) {
  std::vector<std::vector<VertexId>> members(labels.num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[static_cast<std::size_t>(labels.labels[i])].push_back(static_cast<VertexId>(i));
  }
  return members;
}

// Floyd's algorithm: `count` distinct pair indices out of [0, total), sorted.
std::vector<std::uint64_t> sample_pair_indices(std::uint64_t total, std::uint64_t count,
                                               std::uint64_t seed, std::int32_t class_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(class_id)};
  rng::Engine eng(seq);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(count * 2);
  for (std::uint64_t j = total - count; j < total; ++j) {
    const std::uint64_t t = rng::below(eng, j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

ClassPlan make_plan(std::int32_t class_id, std::vector<VertexId> members, const PairBudget& budget) {
  ClassPlan plan;
  plan.class_id = class_id;
  plan.members = std::move(members);
  const std::uint64_t nc = plan.members.size();
  const std::uint64_t total = nc * (nc - 1) / 2;
  if (!budget.max_pairs || total <= *budget.max_pairs) return plan;

  plan.sampled = true;
  plan.targets.resize(nc);
  // Pair index p enumerates (a, b), a < b, row by row over a.
  std::uint64_t a = 0, row_start = 0, row_len = nc - 1;
  for (std::uint64_t p : sample_pair_indices(total, *budget.max_pairs, budget.seed, class_id)) {
    while (p >= row_start + row_len) {
      row_start += row_len;
      ++a;
      --row_len;
    }
    const std::uint64_t b = a + 1 + (p - row_start);
    plan.targets[a].push_back(plan.members[b]);
  }
  return plan;
}

std::vector<ClassPlan> make_plans(const LabelVector& labels, std::span<const std::int32_t> class_ids,
                                  const PairBudget& budget) {
  auto members = members_by_class(labels);
  std::vector<ClassPlan> plans;
  for (auto c : class_ids) plans.push_back(make_plan(c, std::move(members[c]), budget));
  return plans;
}

SourceResult score_source(const KnnGraph& g, const LabelVector& labels, const ClassPlan& plan,
                          std::size_t member_pos, DijkstraWorkspace& ws) {
  SourceResult r;
  const auto targets = plan.targets_of(member_pos);
  if (targets.empty()) return r;
  const VertexId source = plan.members[member_pos];
  ws.run(g, source, targets);
  for (VertexId t : targets) {
    ++r.pairs;
    if (!ws.settled(t)) {
      ++r.unreachable;
      continue;
    }
    std::uint64_t interior = 0, same = 0;
    for (VertexId v = ws.pred(t); v != source; v = ws.pred(v)) {
      ++interior;
      if (labels.labels[v] == plan.class_id) ++same;
    }
    r.sum += interior == 0 ? 1.0 : static_cast<double>(same) / static_cast<double>(interior);
  }
  return r;
}

// Folds per-source partials in ascending source order, which is also the
// task order, so the result does not depend on the thread schedule.
std::vector<ClassScore> reduce(const std::vector<ClassPlan>& plans, const std::vector<SourceTask>& tasks,
                               const std::vector<SourceResult>& results, const PairBudget& budget) {
  std::vector<ClassScore> scores(plans.size());
  for (std::size_t p = 0; p < plans.size(); ++p) {
    scores[p].class_id = plans[p].class_id;
    scores[p].num_points = plans[p].members.size();
    scores[p].sampled = plans[p].sampled;
    scores[p].seed = plans[p].sampled ? budget.seed : 0;
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& s = scores[tasks[i].plan];
    s.score_sum += results[i].sum;
    s.num_pairs_evaluated += results[i].pairs;
    s.num_pairs_unreachable += results[i].unreachable;
  }
  for (auto& s : scores) {
    if (s.num_pairs_evaluated == 0) fail(Errc::invariant, "class with no evaluated pairs");
    s.mean_pair_score = s.score_sum / static_cast<double>(s.num_pairs_evaluated);
  }
  return scores;
}

std::vector<ClassScore> score_classes(const KnnGraph& g, const LabelVector& labels,
                                      std::span<const std::int32_t> class_ids, const PairBudget& budget,
                                      const ScoreOptions& opts) {
  const auto plans = make_plans(labels, class_ids, budget);
  std::vector<SourceTask> tasks;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    for (std::size_t m = 0; m + 1 < plans[p].members.size(); ++m) tasks.push_back({p, m});
  }
  std::vector<SourceResult> results(tasks.size());
  std::exception_ptr error;

#pragma omp parallel num_threads(resolve_threads(opts.threads))
  {
    DijkstraWorkspace ws(g.size());
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tasks.size()); ++i) {
      try {
        const auto& task = tasks[static_cast<std::size_t>(i)];
        results[static_cast<std::size_t>(i)] = score_source(g, labels, plans[task.plan], task.member_pos, ws);
      } catch (...) {
#pragma omp critical(graphcvx_score_error)
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return reduce(plans, tasks, results, budget);
}

void check_inputs(const KnnGraph& g, const LabelVector& labels) {
  if (labels.size() != g.size()) {
    fail(Errc::count_mismatch, "graph has " + std::to_string(g.size()) + " vertices, labels " +
                                   std::to_string(labels.size()));
  }
}

// Classes with at least two points, and those without.
std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>> split_classes(const LabelVector& labels) {
  std::vector<std::size_t> counts(labels.num_classes, 0);
  for (auto l : labels.labels) ++counts[static_cast<std::size_t>(l)];
  std::vector<std::int32_t> scored, excluded;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    (counts[c] >= 2 ? scored : excluded).push_back(static_cast<std::int32_t>(c));
  }
  if (scored.empty()) fail(Errc::no_scorable_class, "every class has fewer than two points");
  return {std::move(scored), std::move(excluded)};
}

LayerScore aggregate(const KnnGraph& g, std::vector<ClassScore> classes, std::vector<std::int32_t> excluded) {
  LayerScore out;
  out.k_requested = g.k_requested();
  out.k_used = g.k_used();
  out.warnings = g.warnings();
  out.excluded_classes = std::move(excluded);
  double mean_sum = 0.0, pair_sum = 0.0;
  std::uint64_t pairs = 0;
  for (const auto& c : classes) {
    mean_sum += c.mean_pair_score;
    pair_sum += c.score_sum;
    pairs += c.num_pairs_evaluated;
  }
  const auto c = static_cast<double>(classes.size());
  out.macro = mean_sum / c;
  out.micro = pair_sum / static_cast<double>(pairs);
  out.baseline = 1.0 / c;
  out.classes = std::move(classes);
  return out;
}

}  // namespace

double pair_score(const std::optional<Path>& path, const LabelVector& labels, std::int32_t class_id) {
  if (!path) return 0.0;
  if (path->size() <= 2) return 1.0;
  std::uint64_t same = 0;
  for (std::size_t i = 1; i + 1 < path->size(); ++i) {
    if (labels.labels[(*path)[i]] == class_id) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(path->size() - 2);
}

ClassScore class_convexity(const KnnGraph& g, const LabelVector& labels, std::int32_t class_id,
                           const PairBudget& budget, const ScoreOptions& opts) {
  check_inputs(g, labels);
  if (class_id < 0 || static_cast<std::size_t>(class_id) >= labels.num_classes) {
    fail(Errc::invalid_argument, "class " + std::to_string(class_id) + " does not exist");
  }
  const auto count = std::count(labels.labels.begin(), labels.labels.end(), class_id);
  if (count < 2) {
    fail(Errc::invalid_argument, "class " + std::to_string(class_id) + " has fewer than two points");
  }
  const std::int32_t ids[] = {class_id};
  return score_classes(g, labels, ids, budget, opts).front();
}

LayerScore layer_convexity(const KnnGraph& g, const LabelVector& labels, const PairBudget& budget,
                           const ScoreOptions& opts) {
  check_inputs(g, labels);
  auto [scored, excluded] = split_classes(labels);
  return aggregate(g, score_classes(g, labels, scored, budget, opts), std::move(excluded));
}

LayerScore layer_convexity_serial(const KnnGraph& g, const LabelVector& labels, const PairBudget& budget) {
  check_inputs(g, labels);
  auto [scored, excluded] = split_classes(labels);
  const auto plans = make_plans(labels, scored, budget);
  std::vector<SourceTask> tasks;
  std::vector<SourceResult> results;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    const auto& plan = plans[p];
    for (std::size_t m = 0; m + 1 < plan.members.size(); ++m) {
      SourceResult r;
      const auto targets = plan.targets_of(m);
      if (!targets.empty()) {
        const ShortestPathTree tree = sssp(g, plan.members[m]);
        for (VertexId t : targets) {
          const auto path = reconstruct_path(tree, t);
          ++r.pairs;
          if (!path) ++r.unreachable;
          r.sum += pair_score(path, labels, plan.class_id);
        }
      }
      tasks.push_back({p, m});
      results.push_back(r);
    }
  }
  return aggregate(g, reduce(plans, tasks, results, budget), std::move(excluded));
}

LayerScore score_layer(const EmbeddingMatrix& m, const LabelVector& labels, std::size_t k,
                       const PairBudget& budget, int threads) {
  const KnnGraph g = build_knn_graph(m, k, {.threads = threads});
  LayerScore s = layer_convexity(g, labels, budget, {.threads = threads});
  s.layer_index = m.layer_index;
  return s;
}

}  // namespace graphcvx
