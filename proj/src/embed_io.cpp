#include "graphcvx/embed_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "graphcvx/errors.hpp"

namespace graphcvx {
namespace {

namespace fs = std::filesystem;
using Bytes = std::vector<unsigned char>;

constexpr char kEmbeddingsMagic[4] = {'C', 'V', 'X', 'E'};
constexpr char kLabelsMagic[4] = {'C', 'V', 'X', 'L'};

template <typename U>
void put_le(Bytes& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<unsigned char>(value >> (8 * i)));
  }
}

template <typename U>
U get_le(const unsigned char* p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(p[i]) << (8 * i);
  }
  return value;
}

Bytes slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::io_failure, "read error on " + path.string());
  return data;
}

void spill(const Bytes& data, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_failure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) fail(Errc::io_failure, "write error on " + path.string());
}

std::uintmax_t file_size_or_fail(const fs::path& path) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) fail(Errc::io_failure, "cannot stat " + path.string() + ": " + ec.message());
  return size;
}

// Checks everything in the fixed 24-byte header against the total file length.
EmbeddingsHeader check_embeddings_header(const unsigned char* head, std::uintmax_t file_len,
                                         const std::string& where) {
  if (file_len < 4) fail(Errc::truncated, where + ": shorter than the magic");
  if (std::memcmp(head, kEmbeddingsMagic, 4) != 0) {
    fail(Errc::bad_magic, where + ": expected \"CVXE\"");
  }
  if (file_len < kEmbeddingsHeaderBytes) fail(Errc::truncated, where + ": header cut short");
  const auto version = get_le<std::uint16_t>(head + 4);
  if (version != kFormatVersion) {
    fail(Errc::unsupported_version, where + ": version " + std::to_string(version));
  }
  const auto dtype = get_le<std::uint16_t>(head + 6);
  if (dtype != kDtypeF32) fail(Errc::unsupported_dtype, where + ": dtype " + std::to_string(dtype));
  const auto n = get_le<std::uint64_t>(head + 8);
  const auto d = get_le<std::uint64_t>(head + 16);
  if (n == 0 || d == 0) fail(Errc::empty_matrix, where + ": n and d must be positive");
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (n > kMax / d || n * d > (kMax - kEmbeddingsHeaderBytes) / 4) {
    fail(Errc::truncated, where + ": declared payload does not fit");
  }
  const std::uint64_t expected = kEmbeddingsHeaderBytes + n * d * 4;
  if (file_len < expected) {
    fail(Errc::truncated, where + ": payload has " + std::to_string(file_len - kEmbeddingsHeaderBytes) +
                              " bytes, header promises " + std::to_string(n * d * 4));
  }
  if (file_len > expected) fail(Errc::trailing_bytes, where + ": bytes past the payload");
  return {static_cast<std::size_t>(n), static_cast<std::size_t>(d)};
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(Errc::manifest_field, std::string("missing key \"") + key + "\"");
  return *it;
}

}  // namespace

void validate(const EmbeddingMatrix& m) {
  if (m.rows == 0 || m.cols == 0) fail(Errc::empty_matrix, "n and d must be positive");
  if (m.values.size() != m.rows * m.cols) {
    fail(Errc::count_mismatch, "values hold " + std::to_string(m.values.size()) + " floats, n*d = " +
                                   std::to_string(m.rows * m.cols));
  }
  const auto bad = std::find_if(m.values.begin(), m.values.end(),
                                [](float v) { return !std::isfinite(v); });
  if (bad != m.values.end()) {
    const auto at = static_cast<std::size_t>(bad - m.values.begin());
    fail(Errc::non_finite, "row " + std::to_string(at / m.cols) + ", column " +
                               std::to_string(at % m.cols));
  }
}

void write_embeddings(const EmbeddingMatrix& m, const fs::path& path) {
  validate(m);
  Bytes out;
  out.reserve(kEmbeddingsHeaderBytes + m.values.size() * 4);
  out.insert(out.end(), std::begin(kEmbeddingsMagic), std::end(kEmbeddingsMagic));
  put_le<std::uint16_t>(out, kFormatVersion);
  put_le<std::uint16_t>(out, kDtypeF32);
  put_le<std::uint64_t>(out, m.rows);
  put_le<std::uint64_t>(out, m.cols);
  for (float v : m.values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  spill(out, path);
}

EmbeddingMatrix read_embeddings(const fs::path& path) {
  const Bytes data = slurp(path);
  unsigned char head[kEmbeddingsHeaderBytes] = {};
  std::copy_n(data.begin(), std::min(data.size(), kEmbeddingsHeaderBytes), head);
  const auto header = check_embeddings_header(head, data.size(), path.string());

  EmbeddingMatrix m;
  m.rows = header.rows;
  m.cols = header.cols;
  m.values.resize(m.rows * m.cols);
  const unsigned char* p = data.data() + kEmbeddingsHeaderBytes;
  for (std::size_t i = 0; i < m.values.size(); ++i, p += 4) {
    m.values[i] = std::bit_cast<float>(get_le<std::uint32_t>(p));
  }
  try {
    validate(m);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  return m;
}

EmbeddingsHeader read_embeddings_header(const fs::path& path) {
  const auto len = file_size_or_fail(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open " + path.string());
  unsigned char head[kEmbeddingsHeaderBytes] = {};
  in.read(reinterpret_cast<char*>(head), kEmbeddingsHeaderBytes);
  return check_embeddings_header(head, len, path.string());
}

LabelVector make_labels(std::vector<std::int32_t> labels, std::vector<std::string> class_names) {
  LabelVector out;
  out.labels = std::move(labels);
  out.class_names = std::move(class_names);
  if (!out.class_names.empty()) {
    out.num_classes = out.class_names.size();
  } else {
    std::int32_t top = -1;
    for (auto l : out.labels) top = std::max(top, l);
    out.num_classes = static_cast<std::size_t>(top + 1);
  }
  validate(out);
  return out;
}

void validate(const LabelVector& labels) {
  if (!labels.class_names.empty() && labels.class_names.size() != labels.num_classes) {
    fail(Errc::count_mismatch, std::to_string(labels.class_names.size()) + " class names for " +
                                   std::to_string(labels.num_classes) + " classes");
  }
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const auto l = labels.labels[i];
    if (l < 0) fail(Errc::negative_label, "point " + std::to_string(i) + " has label " + std::to_string(l));
    if (static_cast<std::size_t>(l) >= labels.num_classes) {
      fail(Errc::label_out_of_range, "point " + std::to_string(i) + " has label " + std::to_string(l) +
                                         " with " + std::to_string(labels.num_classes) + " classes");
    }
  }
}

void write_labels(const LabelVector& labels, const fs::path& path) {
  validate(labels);
  Bytes out;
  out.reserve(kLabelsHeaderBytes + labels.size() * 4);
  out.insert(out.end(), std::begin(kLabelsMagic), std::end(kLabelsMagic));
  put_le<std::uint16_t>(out, kFormatVersion);
  put_le<std::uint64_t>(out, labels.size());
  for (auto l : labels.labels) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l));
  spill(out, path);
}

LabelVector read_labels(const fs::path& path, std::optional<std::size_t> declared_classes) {
  const Bytes data = slurp(path);
  const std::string where = path.string();
  if (data.size() < 4) fail(Errc::truncated, where + ": shorter than the magic");
  if (std::memcmp(data.data(), kLabelsMagic, 4) != 0) fail(Errc::bad_magic, where + ": expected \"CVXL\"");
  if (data.size() < kLabelsHeaderBytes) fail(Errc::truncated, where + ": header cut short");
  const auto version = get_le<std::uint16_t>(data.data() + 4);
  if (version != kFormatVersion) {
    fail(Errc::unsupported_version, where + ": version " + std::to_string(version));
  }
  const auto n = get_le<std::uint64_t>(data.data() + 6);
  const std::uint64_t payload = data.size() - kLabelsHeaderBytes;
  if (n > payload / 4) {
    fail(Errc::truncated, where + ": " + std::to_string(payload / 4) + " labels present, header promises " +
                              std::to_string(n));
  }
  if (payload != n * 4) fail(Errc::trailing_bytes, where + ": bytes past the labels");

  std::vector<std::int32_t> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = static_cast<std::int32_t>(get_le<std::uint32_t>(data.data() + kLabelsHeaderBytes + 4 * i));
  }
  LabelVector out;
  out.labels = std::move(values);
  try {
    if (declared_classes) {
      out.num_classes = *declared_classes;
      validate(out);
    } else {
      out = make_labels(std::move(out.labels));
    }
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.what());
  }
  return out;
}

DatasetManifest parse_manifest(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::manifest_syntax, e.what());
  }
  if (!doc.is_object()) fail(Errc::manifest_syntax, "top level must be an object");

  DatasetManifest m;
  try {
    m.dataset_name = require(doc, "dataset_name").get<std::string>();
    const auto& num_points = require(doc, "num_points");
    if (!num_points.is_number_integer() || num_points.get<std::int64_t>() <= 0) {
      fail(Errc::manifest_field, "num_points must be a positive integer");
    }
    m.num_points = num_points.get<std::size_t>();
    m.labels_path = require(doc, "labels_path").get<std::string>();
    m.class_names = require(doc, "class_names").get<std::vector<std::string>>();
    const auto& layers = require(doc, "layers");
    if (!layers.is_array()) fail(Errc::manifest_field, "layers must be an array");
    for (const auto& entry : layers) {
      const auto& index = require(entry, "index");
      if (!index.is_number_integer()) fail(Errc::manifest_field, "layer index must be an integer");
      m.layers.push_back({index.get<std::int64_t>(), require(entry, "path").get<std::string>()});
    }
    if (auto it = doc.find("pooling"); it != doc.end() && !it->is_null()) {
      m.pooling = it->get<std::string>();
    }
  } catch (const nlohmann::json::type_error& e) {
    fail(Errc::manifest_field, e.what());
  }

  if (m.layers.empty()) fail(Errc::no_layers, "manifest lists no layers");
  for (std::size_t i = 1; i < m.layers.size(); ++i) {
    if (m.layers[i].index <= m.layers[i - 1].index) {
      fail(Errc::layer_order, "layer " + std::to_string(m.layers[i].index) + " follows layer " +
                                  std::to_string(m.layers[i - 1].index));
    }
  }
  return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json doc;
  doc["dataset_name"] = m.dataset_name;
  doc["num_points"] = m.num_points;
  doc["labels_path"] = m.labels_path;
  doc["class_names"] = m.class_names;
  auto layers = nlohmann::ordered_json::array();
  for (const auto& l : m.layers) layers.push_back({{"index", l.index}, {"path", l.path}});
  doc["layers"] = std::move(layers);
  if (m.pooling) doc["pooling"] = *m.pooling;
  return doc.dump(2) + "\n";
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  const std::string text = manifest_to_json(manifest);
  spill(Bytes(text.begin(), text.end()), path);
}

Dataset Dataset::load(const fs::path& manifest_path) {
  const Bytes raw = slurp(manifest_path);
  Dataset ds;
  ds.manifest_ = parse_manifest(std::string(raw.begin(), raw.end()));
  ds.manifest_path_ = manifest_path;
  ds.root_ = manifest_path.parent_path();

  const auto& m = ds.manifest_;
  std::optional<std::size_t> declared;
  if (!m.class_names.empty()) declared = m.class_names.size();
  ds.labels_ = read_labels(ds.root_ / m.labels_path, declared);
  ds.labels_.class_names = m.class_names;
  if (ds.labels_.size() != m.num_points) {
    fail(Errc::count_mismatch, "labels have n=" + std::to_string(ds.labels_.size()) +
                                   ", manifest num_points=" + std::to_string(m.num_points));
  }
  for (const auto& layer : m.layers) {
    EmbeddingsHeader header;
    try {
      header = read_embeddings_header(ds.root_ / layer.path);
    } catch (const Error& e) {
      throw Error(e.code(), "layer " + std::to_string(layer.index) + ": " + e.what());
    }
    if (header.rows != m.num_points) {
      fail(Errc::count_mismatch, "layer " + std::to_string(layer.index) + " has n=" +
                                     std::to_string(header.rows) + " but labels have n=" +
                                     std::to_string(m.num_points));
    }
  }
  return ds;
}

EmbeddingMatrix Dataset::load_layer(std::size_t pos) const {
  const auto& layer = manifest_.layers.at(pos);
  EmbeddingMatrix m;
  try {
    m = read_embeddings(root_ / layer.path);
  } catch (const Error& e) {
    throw Error(e.code(), "layer " + std::to_string(layer.index) + ": " + e.what());
  }
  if (m.rows != manifest_.num_points) {
    fail(Errc::count_mismatch, "layer " + std::to_string(layer.index) + " changed on disk");
  }
  m.layer_index = layer.index;
  return m;
}

}  // namespace graphcvx
