#pragma once

// Binary interchange for per-layer activations and class labels.
//
//   .cvxe  "CVXE" | version u16 | dtype u16 (1 = f32) | n u64 | d u64 | n*d f32
//   .cvxl  "CVXL" | version u16 | n u64 | n * i32
//
// All multi-byte fields are little-endian. A dataset is a JSON manifest that
// names one labels file and one embeddings file per layer.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace graphcvx {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::uint16_t kDtypeF32 = 1;
inline constexpr std::size_t kEmbeddingsHeaderBytes = 24;
inline constexpr std::size_t kLabelsHeaderBytes = 14;

struct EmbeddingMatrix {
  std::int64_t layer_index = 0;  // carried by the manifest, not the file
  std::size_t rows = 0;          // data points
  std::size_t cols = 0;          // dimension
  std::vector<float> values;     // row-major, rows * cols

  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
};

// Throws Error{empty_matrix | count_mismatch | non_finite}.
void validate(const EmbeddingMatrix& m);

void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);

struct EmbeddingsHeader {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Validates the header and that the file length matches it, without reading
// the payload.
EmbeddingsHeader read_embeddings_header(const std::filesystem::path& path);

struct LabelVector {
  std::vector<std::int32_t> labels;
  std::size_t num_classes = 0;
  std::vector<std::string> class_names;  // empty, or num_classes entries

  std::size_t size() const { return labels.size(); }
};

// Derives num_classes from class_names when present, otherwise from the
// largest label. Throws Error{negative_label | label_out_of_range}.
LabelVector make_labels(std::vector<std::int32_t> labels,
                        std::vector<std::string> class_names = {});

void validate(const LabelVector& labels);

void write_labels(const LabelVector& labels, const std::filesystem::path& path);

// declared_classes, when given, bounds every label.
LabelVector read_labels(const std::filesystem::path& path,
                        std::optional<std::size_t> declared_classes = std::nullopt);

struct LayerEntry {
  std::int64_t index = 0;
  std::string path;  // relative to the manifest directory
};

struct DatasetManifest {
  std::string dataset_name;
  std::size_t num_points = 0;
  std::string labels_path;
  std::vector<std::string> class_names;
  std::vector<LayerEntry> layers;
  std::optional<std::string> pooling;  // recorded by extractors
};

DatasetManifest parse_manifest(const std::string& json_text);
std::string manifest_to_json(const DatasetManifest& manifest);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// A validated dataset. Layer payloads are read on demand; headers and the
// labels are checked up front.
class Dataset {
 public:
  static Dataset load(const std::filesystem::path& manifest_path);

  const DatasetManifest& manifest() const { return manifest_; }
  const LabelVector& labels() const { return labels_; }
  const std::filesystem::path& manifest_path() const { return manifest_path_; }

  std::size_t layer_count() const { return manifest_.layers.size(); }
  std::int64_t layer_index(std::size_t pos) const { return manifest_.layers.at(pos).index; }

  // Thread-safe; each call reads the file independently.
  EmbeddingMatrix load_layer(std::size_t pos) const;

 private:
  DatasetManifest manifest_;
  LabelVector labels_;
  std::filesystem::path manifest_path_;
  std::filesystem::path root_;
};

}  // namespace graphcvx
