// graphcvx: score per-layer class convexity, pick a prune layer, plot, and
// generate synthetic layer stacks.
//
//   graphcvx score --manifest data/manifest.json --out report.json
//   graphcvx prune-point report.json --aggregate macro --mode plateau
//   graphcvx plot report.json --out report.svg
//   graphcvx synth --out data --schedule 1,2,4,8,8,8

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "graphcvx/convexity.hpp"
#include "graphcvx/embed_io.hpp"
#include "graphcvx/errors.hpp"
#include "graphcvx/prune_rule.hpp"
#include "graphcvx/report.hpp"
#include "graphcvx/synth.hpp"

namespace fs = std::filesystem;
using namespace graphcvx;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_failure, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) fail(Errc::io_failure, "write error on " + path.string());
}

struct ScoreArgs {
  RunConfig config;
  std::uint64_t max_pairs = 0;
  std::string dump_graphs;
  bool quiet = false;
};

int cmd_score(const ScoreArgs& args) {
  RunConfig config = args.config;
  if (args.max_pairs > 0) config.max_pairs = args.max_pairs;

  const Dataset ds = Dataset::load(config.manifest);
  ConvexityReport report;
  report.tool_version = GRAPHCVX_VERSION;
  report.config = config;
  report.dataset_name = ds.manifest().dataset_name;
  report.class_names = ds.manifest().class_names;

  for (std::size_t pos = 0; pos < ds.layer_count(); ++pos) {
    const auto t0 = std::chrono::steady_clock::now();
    const EmbeddingMatrix m = ds.load_layer(pos);
    const KnnGraph g = build_knn_graph(m, config.k, {.threads = config.threads});
    if (!args.dump_graphs.empty()) {
      std::ostringstream csv;
      write_graph_csv(g, csv);
      write_text(fs::path(args.dump_graphs) / ("graph_layer_" + std::to_string(m.layer_index) + ".csv"),
                 csv.str());
    }
    LayerScore s = layer_convexity(g, ds.labels(), config.budget(), {.threads = config.threads});
    s.layer_index = m.layer_index;
    for (const auto& w : s.warnings) std::cerr << "warning: layer " << s.layer_index << ": " << w << '\n';
    if (!args.quiet) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      std::cerr << "layer " << s.layer_index << ": macro " << s.macro << ", micro " << s.micro
                << ", baseline " << s.baseline << " (" << dt.count() << " s)\n";
    }
    report.layers.push_back(std::move(s));
  }

  const fs::path json_path = config.out;
  write_text(json_path, report_to_json(report));
  fs::path csv_path = json_path;
  csv_path.replace_extension(".csv");
  write_text(csv_path, report_to_csv(report));
  std::cout << "wrote " << json_path.string() << " and " << csv_path.string() << '\n';
  return 0;
}

int cmd_prune_point(const std::string& report_path, const std::string& mode, double epsilon,
                    const std::string& aggregate, const std::string& out) {
  const ConvexityReport report = report_from_json(read_text(report_path));
  const ConvexityCurve curve = curve_from_report(report, parse_aggregate(aggregate));
  const PruneDecision d = select_prune_layer(curve, parse_prune_mode(mode), epsilon);
  const std::string json = decision_to_json(d);
  if (out.empty()) {
    std::cout << json;
  } else {
    write_text(out, json);
  }
  std::cout << "prune after layer " << d.selected_layer << '\n';
  return 0;
}

int cmd_plot(const std::string& report_path, const std::string& out) {
  const ConvexityReport report = report_from_json(read_text(report_path));
  write_text(out, report_to_svg(report));
  std::cout << "wrote " << out << '\n';
  return 0;
}

int cmd_synth(const synth::LayerStackSpec& spec, const std::string& out, const std::string& name) {
  synth::generate_layer_stack(spec, out, name);
  std::cout << "wrote " << (fs::path(out) / "manifest.json").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph convexity of class regions across layers, and convexity-guided layer pruning"};
  app.set_version_flag("--version", std::string(GRAPHCVX_VERSION));
  app.require_subcommand(1);

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "Score every layer of a dataset");
  sc->add_option("--manifest", score.config.manifest, "Dataset manifest (JSON)")->required();
  sc->add_option("--k", score.config.k, "Nearest neighbours per point")->capture_default_str();
  sc->add_option("--max-pairs", score.max_pairs, "Sample at most this many pairs per class (default: all)");
  sc->add_option("--seed", score.config.seed, "Seed for pair sampling")->capture_default_str();
  std::string score_aggregate = "macro", score_mode = "plateau";
  sc->add_option("--aggregate", score_aggregate, "Aggregate recorded for later decisions")
      ->check(CLI::IsMember({"macro", "micro"}))
      ->capture_default_str();
  sc->add_option("--mode", score_mode, "Prune rule recorded for later decisions")
      ->check(CLI::IsMember({"plateau", "argmax"}))
      ->capture_default_str();
  sc->add_option("--epsilon", score.config.epsilon, "Plateau tolerance")->capture_default_str();
  sc->add_option("--threads", score.config.threads, "Worker threads (0: all cores)")->capture_default_str();
  score.config.out = "report.json";
  sc->add_option("--out", score.config.out, "Report JSON; the CSV goes next to it")->capture_default_str();
  sc->add_option("--dump-graphs", score.dump_graphs, "Directory for per-layer kNN edge lists (CSV)");
  sc->add_flag("--quiet", score.quiet, "No per-layer progress on stderr");

  std::string pp_report, pp_mode = "plateau", pp_aggregate, pp_out;
  double pp_epsilon = kDefaultEpsilon;
  auto* pp = app.add_subcommand("prune-point", "Choose the layer after which to prune");
  pp->add_option("report", pp_report, "Report JSON from `score`")->required();
  pp->add_option("--mode", pp_mode, "plateau or argmax")
      ->check(CLI::IsMember({"plateau", "argmax"}))
      ->capture_default_str();
  pp->add_option("--epsilon", pp_epsilon, "Plateau tolerance in score units")->capture_default_str();
  pp->add_option("--aggregate", pp_aggregate, "Score to decide on")
      ->check(CLI::IsMember({"macro", "micro"}))
      ->required();
  pp->add_option("--out", pp_out, "Decision JSON (default: stdout)");

  std::string plot_report, plot_out = "report.svg";
  auto* pl = app.add_subcommand("plot", "Render a report as an SVG line chart");
  pl->add_option("report", plot_report, "Report JSON from `score`")->required();
  pl->add_option("--out", plot_out, "Output SVG")->capture_default_str();

  synth::LayerStackSpec stack;
  stack.base.n_per_class = 200;
  stack.base.dim = 16;
  stack.base.classes = 4;
  std::string synth_out, synth_name = "synthetic";
  std::vector<double> schedule{1, 2, 4, 8, 8, 8};
  auto* sy = app.add_subcommand("synth", "Write a synthetic Gaussian-cluster layer stack");
  sy->add_option("--out", synth_out, "Output directory")->required();
  sy->add_option("--schedule", schedule, "Centre separation per layer, in units of std")
      ->delimiter(',')
      ->capture_default_str();
  sy->add_option("--n-per-class", stack.base.n_per_class, "Points per class")->capture_default_str();
  sy->add_option("--dim", stack.base.dim, "Embedding dimension")->capture_default_str();
  sy->add_option("--classes", stack.base.classes, "Number of classes (at most dim + 1)")->capture_default_str();
  sy->add_option("--std", stack.base.std, "Per-coordinate noise standard deviation")->capture_default_str();
  sy->add_option("--seed", stack.base.seed, "Generator seed")->capture_default_str();
  sy->add_option("--name", synth_name, "Dataset name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sc) {
      score.config.aggregate = parse_aggregate(score_aggregate);
      score.config.mode = parse_prune_mode(score_mode);
      return cmd_score(score);
    }
    if (*pp) return cmd_prune_point(pp_report, pp_mode, pp_epsilon, pp_aggregate, pp_out);
    if (*pl) return cmd_plot(plot_report, plot_out);
    if (*sy) {
      stack.separations = schedule;
      return cmd_synth(stack, synth_out, synth_name);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::validation: return kExitValidation;
      case ErrorKind::io: return kExitIo;
      case ErrorKind::internal: return kExitInternal;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
