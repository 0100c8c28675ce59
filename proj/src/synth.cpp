#include "graphcvx/synth.hpp"

#include <cmath>
#include <cstdio>

#include "graphcvx/errors.hpp"
#include "graphcvx/rng.hpp"

namespace graphcvx::synth {
namespace {

std::vector<std::string> default_class_names(std::size_t classes) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < classes; ++c) names.push_back("class_" + std::to_string(c));
  return names;
}

LabelVector class_major_labels(const ClusterSpec& spec) {
  std::vector<std::int32_t> labels(spec.n_per_class * spec.classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<std::int32_t>(i / spec.n_per_class);
  }
  return make_labels(std::move(labels), default_class_names(spec.classes));
}

// Zero-mean noise with the given std, one row per point.
std::vector<double> cluster_noise(const ClusterSpec& spec) {
  rng::Engine eng(spec.seed);
  std::vector<double> noise(spec.n_per_class * spec.classes * spec.dim);
  for (auto& v : noise) v = spec.std * rng::normal(eng);
  return noise;
}

EmbeddingMatrix place(const ClusterSpec& spec, const std::vector<double>& noise,
                      const std::vector<double>& unit_simplex, double separation) {
  EmbeddingMatrix m;
  m.rows = spec.n_per_class * spec.classes;
  m.cols = spec.dim;
  m.values.resize(m.rows * m.cols);
  const double spacing = separation * spec.std;
  for (std::size_t i = 0; i < m.rows; ++i) {
    const std::size_t c = i / spec.n_per_class;
    for (std::size_t t = 0; t < m.cols; ++t) {
      const double centre = spacing * unit_simplex[c * spec.dim + t];
      m.values[i * m.cols + t] = static_cast<float>(centre + noise[i * m.cols + t]);
    }
  }
  return m;
}

}  // namespace

void validate(const ClusterSpec& spec) {
  if (spec.n_per_class == 0 || spec.dim == 0 || spec.classes == 0) {
    fail(Errc::invalid_argument, "n_per_class, dim and classes must be positive");
  }
  if (!(spec.std > 0.0) || !std::isfinite(spec.std)) fail(Errc::invalid_argument, "std must be positive");
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation)) {
    fail(Errc::invalid_argument, "separation must be finite and >= 0");
  }
  if (spec.dim + 1 < spec.classes) {
    fail(Errc::invalid_argument, "a simplex of " + std::to_string(spec.classes) + " centres needs dim >= " +
                                     std::to_string(spec.classes - 1));
  }
}

std::vector<double> simplex_vertices(std::size_t classes, std::size_t dim) {
  if (dim + 1 < classes) fail(Errc::invalid_argument, "dim too small for simplex");
  // Helmert basis of the sum-zero hyperplane applied to the standard basis:
  // coordinate j of vertex i is h_j[i], giving edge length sqrt(2).
  std::vector<double> v(classes * dim, 0.0);
  for (std::size_t j = 1; j < classes; ++j) {
    const double norm = std::sqrt(static_cast<double>(j * (j + 1)));
    for (std::size_t i = 0; i < j; ++i) v[i * dim + (j - 1)] = 1.0 / norm;
    v[j * dim + (j - 1)] = -static_cast<double>(j) / norm;
  }
  for (auto& x : v) x /= std::sqrt(2.0);
  return v;
}

std::pair<EmbeddingMatrix, LabelVector> generate_clusters(const ClusterSpec& spec) {
  validate(spec);
  const auto noise = cluster_noise(spec);
  EmbeddingMatrix m = place(spec, noise, simplex_vertices(spec.classes, spec.dim), spec.separation);
  return {std::move(m), class_major_labels(spec)};
}

DatasetManifest generate_layer_stack(const LayerStackSpec& spec, const std::filesystem::path& dir,
                                     const std::string& dataset_name) {
  if (spec.separations.empty()) fail(Errc::invalid_argument, "layer stack needs at least one layer");
  ClusterSpec base = spec.base;
  for (double s : spec.separations) {
    base.separation = s;
    validate(base);
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::io_failure, "cannot create " + dir.string() + ": " + ec.message());

  const auto noise = cluster_noise(base);
  const auto simplex = simplex_vertices(base.classes, base.dim);
  const LabelVector labels = class_major_labels(base);

  DatasetManifest manifest;
  manifest.dataset_name = dataset_name;
  manifest.num_points = labels.size();
  manifest.labels_path = "labels.cvxl";
  manifest.class_names = labels.class_names;
  write_labels(labels, dir / manifest.labels_path);

  for (std::size_t l = 0; l < spec.separations.size(); ++l) {
    char name[32];
    std::snprintf(name, sizeof name, "layer_%02zu.cvxe", l + 1);
    EmbeddingMatrix m = place(base, noise, simplex, spec.separations[l]);
    m.layer_index = static_cast<std::int64_t>(l + 1);
    write_embeddings(m, dir / name);
    manifest.layers.push_back({m.layer_index, name});
  }
  write_manifest(manifest, dir / "manifest.json");
  return manifest;
}

std::pair<EmbeddingMatrix, LabelVector> generate_uniform(std::size_t n, std::size_t dim, std::size_t classes,
                                                         std::uint64_t seed) {
  if (n == 0 || dim == 0 || classes == 0) fail(Errc::invalid_argument, "n, dim and classes must be positive");
  rng::Engine eng(seed);
  EmbeddingMatrix m;
  m.rows = n;
  m.cols = dim;
  m.values.resize(n * dim);
  for (auto& v : m.values) v = static_cast<float>(rng::unit(eng));

  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::int32_t>(i % classes);
  for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[rng::below(eng, i)]);
  return {std::move(m), make_labels(std::move(labels), default_class_names(classes))};
}

}  // namespace graphcvx::synth
