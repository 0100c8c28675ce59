#pragma once

// Seeded synthetic datasets: Gaussian clusters whose centres sit on a
// regular simplex, so every pair of centres is `separation * std` apart.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "graphcvx/embed_io.hpp"

namespace graphcvx::synth {

struct ClusterSpec {
  std::size_t n_per_class = 100;
  std::size_t dim = 8;
  std::size_t classes = 3;
  double std = 1.0;
  double separation = 4.0;  // centre distance in units of std
  std::uint64_t seed = 0;
};

struct LayerStackSpec {
  std::vector<double> separations;  // one per layer
  ClusterSpec base;                 // base.separation is ignored
};

void validate(const ClusterSpec& spec);

// Class-major labels: point i belongs to class i / n_per_class.
// Throws Error{invalid_argument} when dim < classes - 1.
std::pair<EmbeddingMatrix, LabelVector> generate_clusters(const ClusterSpec& spec);

// Writes labels.cvxl, layer_<l>.cvxe and manifest.json under `dir`. Layer
// l (1-based index) uses separations[l-1]; the per-point noise and class
// assignment are shared by all layers, so only the centre spacing moves.
DatasetManifest generate_layer_stack(const LayerStackSpec& spec, const std::filesystem::path& dir,
                                     const std::string& dataset_name = "synthetic");

// Uniform points in [0, 1)^dim with balanced labels in random order.
std::pair<EmbeddingMatrix, LabelVector> generate_uniform(std::size_t n, std::size_t dim, std::size_t classes,
                                                         std::uint64_t seed);

// Regular simplex with unit edge length: `classes` points in `dim`
// dimensions, row-major. Needs dim >= classes - 1.
std::vector<double> simplex_vertices(std::size_t classes, std::size_t dim);

}  // namespace graphcvx::synth
