// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances and budgets are fixed here, not configurable.
//
//   acceptance            run everything
//   acceptance perf       run criteria whose name contains "perf"

#include <sys/resource.h>
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>

#include <json.hpp>

#include "graphcvx/convexity.hpp"
#include "graphcvx/errors.hpp"
#include "graphcvx/oracle.hpp"
#include "graphcvx/parallel.hpp"
#include "graphcvx/prune_rule.hpp"
#include "graphcvx/synth.hpp"
#include "test_util.hpp"

using namespace graphcvx;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* spec, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, spec, args...);
  return buf;
}

double peak_rss_gib() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<double>(ru.ru_maxrss) / (1024.0 * 1024.0);  // ru_maxrss is KiB
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(GRAPHCVX_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

bool classes_connected(const KnnGraph& g, const LabelVector& labels) {
  for (std::size_t c = 0; c < labels.num_classes; ++c) {
    const auto cls = static_cast<std::int32_t>(c);
    std::vector<char> seen(g.size(), 0);
    std::size_t members = 0, reached = 0;
    std::queue<VertexId> todo;
    for (VertexId v = 0; v < g.size(); ++v) {
      if (labels.labels[v] != cls) continue;
      if (members++ == 0) {
        seen[v] = 1;
        todo.push(v);
      }
    }
    while (!todo.empty()) {
      const VertexId u = todo.front();
      todo.pop();
      ++reached;
      for (const auto& e : g.neighbors(u)) {
        if (!seen[e.to] && labels.labels[e.to] == cls) {
          seen[e.to] = 1;
          todo.push(e.to);
        }
      }
    }
    if (reached != members) return false;
  }
  return true;
}

bool same_scores(const LayerScore& a, const LayerScore& b) {
  if (a.macro != b.macro || a.micro != b.micro || a.classes.size() != b.classes.size()) return false;
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    if (a.classes[i].mean_pair_score != b.classes[i].mean_pair_score ||
        a.classes[i].num_pairs_evaluated != b.classes[i].num_pairs_evaluated) {
      return false;
    }
  }
  return true;
}

bool same_adjacency(const KnnGraph& a, const KnnGraph& b) {
  if (a.size() != b.size()) return false;
  for (VertexId u = 0; u < a.size(); ++u) {
    const auto x = a.neighbors(u);
    const auto y = b.neighbors(u);
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].to != y[i].to) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  rng::Engine eng(20240917);
  int mismatches = 0;
  std::uint64_t pairs = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t n = 20 + rng::below(eng, 181);
    const std::size_t d = 2 + rng::below(eng, 7);
    const std::size_t c = 2 + rng::below(eng, 3);
    const std::size_t k = 1 + rng::below(eng, 6);
    const auto m = testutil::random_matrix(n, d, eng());
    const auto labels = testutil::random_labels(n, c, eng());

    const auto engine = layer_convexity(build_knn_graph(m, k), labels);
    const auto ref = oracle::oracle_convexity(m, labels, k);
    bool ok = engine.classes.size() == ref.classes.size() && engine.excluded_classes == ref.excluded_classes &&
              std::abs(engine.macro - ref.macro) <= 1e-12 && std::abs(engine.micro - ref.micro) <= 1e-12;
    for (std::size_t i = 0; ok && i < ref.classes.size(); ++i) {
      const auto& e = engine.classes[i];
      const auto& r = ref.classes[i];
      ok = e.class_id == r.class_id && e.num_pairs_evaluated == r.num_pairs_evaluated &&
           e.num_pairs_unreachable == r.num_pairs_unreachable &&
           std::abs(e.mean_pair_score - r.mean_pair_score) <= 1e-12;
      pairs += r.num_pairs_evaluated;
    }
    if (!ok) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0,
          fmt("100 instances, %llu pairs, %d mismatches, %.2f s (limit 60 s)",
              static_cast<unsigned long long>(pairs), mismatches, secs)};
}

Outcome baseline_recovery() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (std::size_t c : {2u, 5u, 10u}) {
    auto [m, labels] = synth::generate_uniform(2000, 8, c, 1000 + c);
    const double macro = layer_convexity(build_knn_graph(m, 10), labels).macro;
    const double target = 1.0 / static_cast<double>(c);
    ok = ok && std::abs(macro - target) <= 0.05;
    detail += fmt("c=%zu macro=%.4f (1/c=%.4f) ", c, macro, target);
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 30.0, detail + fmt("in %.2f s (limit 30 s)", secs)};
}

Outcome perfect_separation() {
  auto [m, labels] = synth::generate_clusters(
      {.n_per_class = 200, .dim = 8, .classes = 5, .std = 1.0, .separation = 100.0, .seed = 77});
  const auto g = build_knn_graph(m, 10);
  if (!classes_connected(g, labels)) return {false, "a class subgraph is disconnected"};
  const double macro = layer_convexity(g, labels).macro;
  return {macro == 1.0, fmt("every class subgraph connected, macro=%.17g", macro)};
}

Outcome invariance_suite() {
  std::string detail;
  bool ok = true;

  // Isometry plus uniform scaling: identical kNN adjacency, identical scores.
  int isometry_cases = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t d = 3 + seed % 5;
    const auto m = testutil::random_matrix(150, d, seed + 11);
    const auto labels = testutil::random_labels(150, 3, seed + 12);
    rng::Engine eng(seed);
    std::vector<double> rot(d * d);
    for (auto& x : rot) x = rng::normal(eng);
    for (std::size_t c = 0; c < d; ++c) {  // Gram-Schmidt on columns
      for (std::size_t p = 0; p < c; ++p) {
        double dot = 0;
        for (std::size_t r = 0; r < d; ++r) dot += rot[r * d + c] * rot[r * d + p];
        for (std::size_t r = 0; r < d; ++r) rot[r * d + c] -= dot * rot[r * d + p];
      }
      double norm = 0;
      for (std::size_t r = 0; r < d; ++r) norm += rot[r * d + c] * rot[r * d + c];
      for (std::size_t r = 0; r < d; ++r) rot[r * d + c] /= std::sqrt(norm);
    }
    const double scale = 0.5 + 4.0 * rng::unit(eng);
    EmbeddingMatrix moved = m;
    for (std::size_t i = 0; i < m.rows; ++i) {
      for (std::size_t r = 0; r < d; ++r) {
        double s = 0;
        for (std::size_t c = 0; c < d; ++c) s += rot[r * d + c] * m.values[i * d + c];
        moved.values[i * d + r] = static_cast<float>(scale * s + 2.5 - 0.5 * static_cast<double>(r));
      }
    }
    const auto g0 = build_knn_graph(m, 6);
    const auto g1 = build_knn_graph(moved, 6);
    if (!same_adjacency(g0, g1)) {
      ok = false;
      detail += fmt("seed %llu: adjacency changed; ", static_cast<unsigned long long>(seed));
      continue;
    }
    if (!same_scores(layer_convexity(g0, labels), layer_convexity(g1, labels))) {
      ok = false;
      detail += fmt("seed %llu: scores changed; ", static_cast<unsigned long long>(seed));
    }
    ++isometry_cases;
  }

  // Point-order permutation on general-position data.
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = testutil::random_matrix(160, 4, seed + 40);
    if (!testutil::general_position(m)) {
      ok = false;
      detail += "generator produced a tie; ";
      continue;
    }
    const auto labels = testutil::random_labels(160, 4, seed + 41);
    std::vector<std::size_t> order(m.rows);
    std::iota(order.begin(), order.end(), 0);
    rng::Engine eng(seed + 42);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng::below(eng, i)]);
    EmbeddingMatrix pm = m;
    LabelVector pl = labels;
    for (std::size_t i = 0; i < m.rows; ++i) {
      for (std::size_t t = 0; t < m.cols; ++t) pm.values[i * m.cols + t] = m.values[order[i] * m.cols + t];
      pl.labels[i] = labels.labels[order[i]];
    }
    const auto a = layer_convexity(build_knn_graph(m, 5), labels);
    const auto b = layer_convexity(build_knn_graph(pm, 5), pl);
    worst = std::max({worst, std::abs(a.macro - b.macro), std::abs(a.micro - b.micro)});
  }
  ok = ok && worst <= 1e-12;

  // Range under randomized fuzzing.
  int fuzz_cases = 0, out_of_range = 0;
  rng::Engine eng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng::below(eng, 120);
    const std::size_t d = 1 + rng::below(eng, 8);
    const std::size_t c = 1 + rng::below(eng, 6);
    const std::size_t k = 1 + rng::below(eng, 12);
    auto m = testutil::random_matrix(n, d, eng(), 1e-3 + 100.0 * rng::unit(eng));
    if (rng::below(eng, 4) == 0 && n > 2) {  // duplicate a point now and then
      std::copy_n(m.values.begin(), d, m.values.begin() + static_cast<std::ptrdiff_t>(d));
    }
    const auto labels = testutil::random_labels(n, c, eng());
    try {
      const auto s = layer_convexity(build_knn_graph(m, k), labels);
      ++fuzz_cases;
      auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
      bool good = in01(s.macro) && in01(s.micro);
      for (const auto& cs : s.classes) good = good && in01(cs.mean_pair_score);
      if (!good) ++out_of_range;
    } catch (const Error& e) {
      if (e.code() != Errc::no_scorable_class) ++out_of_range;
    }
  }
  ok = ok && out_of_range == 0;
  detail += fmt("isometry+scale bitwise on %d/10, permutation max diff %.3g (limit 1e-12), "
                "fuzz %d scored, %d out of range",
                isometry_cases, worst, fuzz_cases, out_of_range);
  return {ok, detail};
}

Outcome pruning_rule_units() {
  ConvexityCurve plateau_curve;
  const double scores[] = {0.10, 0.50, 0.70, 0.75, 0.755, 0.752};
  for (std::int64_t l = 0; l < 6; ++l) plateau_curve.push_back({l, scores[l]});
  const bool ex1 = select_prune_layer(plateau_curve, PruneMode::plateau, 0.01).selected_layer == 3;

  ConvexityCurve rising{{1, 0.1}, {2, 0.2}, {3, 0.3}, {4, 0.4}};
  const bool ex2 = select_prune_layer(rising, PruneMode::plateau, 0.0).selected_layer == 4;

  ConvexityCurve tie;
  for (std::int64_t l = 1; l <= 12; ++l) tie.push_back({l, (l == 8 || l == 10) ? 0.8 : 0.4});
  const bool ex3 = select_prune_layer(tie, PruneMode::argmax).selected_layer == 8;

  int violations = 0;
  rng::Engine eng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    ConvexityCurve c;
    const std::size_t len = 1 + rng::below(eng, 30);
    for (std::size_t l = 0; l < len; ++l) c.push_back({static_cast<std::int64_t>(l), rng::unit(eng)});
    std::int64_t prev = select_prune_layer(c, PruneMode::plateau, 0.0).selected_layer;
    for (int step = 1; step <= 100; ++step) {
      const auto layer = select_prune_layer(c, PruneMode::plateau, 0.01 * step).selected_layer;
      if (layer > prev) ++violations;
      prev = layer;
    }
  }
  return {ex1 && ex2 && ex3 && violations == 0,
          fmt("plateau example %s, increasing/eps=0 %s, tie 8 vs 10 %s, monotonicity violations %d/100000",
              ex1 ? "ok" : "WRONG", ex2 ? "ok" : "WRONG", ex3 ? "ok" : "WRONG", violations)};
}

Outcome synthetic_pipeline() {
  testutil::TempDir dir("acceptance_pipeline");
  const auto data = dir / "data";
  if (run_cli("synth --out " + q(data) + " --schedule 1,2,4,8,8,8 --n-per-class 150 --dim 16 --classes 4 --seed 11") != 0) {
    return {false, "synth failed"};
  }
  const auto report = dir / "report.json";
  if (run_cli("score --manifest " + q(data / "manifest.json") + " --out " + q(report)) != 0) {
    return {false, "score failed"};
  }
  const auto decision = dir / "decision.json";
  if (run_cli("prune-point " + q(report) + " --aggregate macro --mode plateau --epsilon 0.01 --out " +
              q(decision)) != 0) {
    return {false, "prune-point failed"};
  }
  const auto rj = nlohmann::json::parse(testutil::file_text(report));
  std::vector<double> curve;
  for (const auto& l : rj["layers"]) curve.push_back(l["macro"].get<double>());
  // Rising part may wobble by at most the plateau tolerance; the flat tail
  // (layers 4..6, identical separation) must agree to within it.
  constexpr double kNoise = 0.01;
  bool rising = true;
  for (std::size_t i = 1; i < 4; ++i) rising = rising && curve[i] >= curve[i - 1] - kNoise;
  bool flat = true;
  for (std::size_t i = 4; i < 6; ++i) flat = flat && std::abs(curve[i] - curve[3]) <= kNoise;
  const bool climbs = curve[2] < curve[3] - kNoise;  // otherwise layer 4 is not the first flat one
  const auto selected = nlohmann::json::parse(testutil::file_text(decision))["selected_layer"].get<int>();

  std::string shape;
  for (double v : curve) shape += fmt("%.4f ", v);
  return {rising && flat && climbs && selected == 4,
          "macro by layer [" + shape + "] -> selected layer " + std::to_string(selected) + " (expected 4)"};
}

Outcome performance() {
  constexpr std::size_t kN = 10000, kD = 768, kClasses = 35;
  const auto m = testutil::random_matrix(kN, kD, 314);
  const auto labels = testutil::random_labels(kN, kClasses, 315);

  const auto t0 = Clock::now();
  const KnnGraph g = build_knn_graph(m, 10);
  const double knn_secs = seconds_since(t0);
  const auto t1 = Clock::now();
  const LayerScore s = layer_convexity(g, labels);
  const double score_secs = seconds_since(t1);
  const double total = knn_secs + score_secs;
  const double rss = peak_rss_gib();
  std::uint64_t pairs = 0;
  for (const auto& c : s.classes) pairs += c.num_pairs_evaluated;
  return {knn_secs < 120.0 && total < 600.0 && rss < 4.0,
          fmt("n=%zu d=%zu k=10, %d thread(s): kNN %.1f s (limit 120), all %llu pairs %.1f s, total %.1f s "
              "(limit 600), peak RSS %.2f GiB (limit 4)",
              kN, kD, resolve_threads(0), knn_secs, static_cast<unsigned long long>(pairs), score_secs, total, rss)};
}

Outcome determinism() {
  testutil::TempDir dir("acceptance_det");
  const auto data = dir / "data";
  if (run_cli("synth --out " + q(data) + " --schedule 1,3,6 --n-per-class 120 --dim 12 --classes 5 --seed 2") != 0) {
    return {false, "synth failed"};
  }
  const std::string manifest = q(data / "manifest.json");
  const int threads[] = {1, 2, 4, 1};
  for (int i = 0; i < 4; ++i) {
    const auto base = dir / ("run" + std::to_string(i));
    if (run_cli("score --manifest " + manifest + " --threads " + std::to_string(threads[i]) + " --out " +
                q(base.string() + ".json")) != 0 ||
        run_cli("plot " + q(base.string() + ".json") + " --out " + q(base.string() + ".svg")) != 0) {
      return {false, "cli failed"};
    }
  }
  // Sampled budgets must be reproducible too.
  for (int i = 0; i < 2; ++i) {
    const auto base = dir / ("sampled" + std::to_string(i));
    if (run_cli("score --manifest " + manifest + " --max-pairs 2000 --seed 9 --threads " +
                std::to_string(threads[i + 1]) + " --out " + q(base.string() + ".json")) != 0) {
      return {false, "cli failed"};
    }
  }
  int differing = 0;
  for (const char* ext : {".json", ".csv", ".svg"}) {
    const auto ref = testutil::file_bytes(dir / (std::string("run0") + ext));
    for (int i = 1; i < 4; ++i) {
      if (testutil::file_bytes(dir / ("run" + std::to_string(i) + ext)) != ref) ++differing;
    }
  }
  for (const char* ext : {".json", ".csv"}) {
    if (testutil::file_bytes(dir / (std::string("sampled0") + ext)) !=
        testutil::file_bytes(dir / (std::string("sampled1") + ext))) {
      ++differing;
    }
  }
  return {differing == 0, fmt("4 runs (threads 1,2,4,1) + 2 sampled runs, %d differing artifacts", differing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string filter = argc > 1 ? argv[1] : "";
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"oracle-equivalence", oracle_equivalence},
      {"baseline-recovery", baseline_recovery},
      {"perfect-separation", perfect_separation},
      {"invariance-suite", invariance_suite},
      {"pruning-rule-units", pruning_rule_units},
      {"synthetic-pipeline", synthetic_pipeline},
      {"determinism", determinism},
      {"performance", performance},
  };
  int failed = 0, ran = 0;
  for (const auto& [name, fn] : criteria) {
    if (!filter.empty() && std::string(name).find(filter) == std::string::npos) continue;
    ++ran;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
  }
  std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
