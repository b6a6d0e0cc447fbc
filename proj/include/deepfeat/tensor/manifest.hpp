#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deepfeat/core/error.hpp"
#include "deepfeat/tensor/activation_tensor.hpp"
#include "deepfeat/tensor/tensor_file.hpp"

namespace deepfeat {

struct LayerInfo {
  std::string id;
  TensorShape shape;
  // 1-based position in the source network; defaults to the manifest position.
  std::size_t index = 0;
};

struct SampleEntry {
  std::string id;
  std::size_t label = 0;
  std::map<std::string, std::string> tensors;  // layer id -> path as written in the manifest
};

struct DatasetManifest {
  std::vector<std::string> classes;
  std::vector<LayerInfo> layers;  // network order
  std::vector<SampleEntry> samples;
  std::filesystem::path base_dir;

  [[nodiscard]] std::vector<std::size_t> labels() const {
    std::vector<std::size_t> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.label);
    return out;
  }

  [[nodiscard]] std::optional<std::size_t> layer_position(const std::string& id) const {
    for (std::size_t i = 0; i < layers.size(); ++i)
      if (layers[i].id == id) return i;
    return std::nullopt;
  }

  [[nodiscard]] std::filesystem::path tensor_path(const SampleEntry& sample, const std::string& layer_id) const {
    std::filesystem::path p(sample.tensors.at(layer_id));
    return p.is_absolute() ? p : base_dir / p;
  }
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw FormatError(where + ": missing key '" + key + "'");
  return obj.at(key);
}

inline std::uint32_t require_dim(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0 || v.get<std::uint64_t>() > 0xFFFFFFFFull)
    throw FormatError(where + ": '" + key + "' must be a positive integer");
  return v.get<std::uint32_t>();
}

}  // namespace detail

inline DatasetManifest parse_manifest(const nlohmann::json& doc, std::filesystem::path base_dir) {
  using detail::require;
  DatasetManifest m;
  m.base_dir = std::move(base_dir);
  try {
    for (const auto& c : require(doc, "classes", "manifest")) m.classes.push_back(c.get<std::string>());
    const auto& layers = require(doc, "layers", "manifest");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string where = "manifest layers[" + std::to_string(i) + "]";
      LayerInfo layer;
      layer.id = require(layers[i], "id", where).get<std::string>();
      layer.shape.channels = detail::require_dim(layers[i], "d", where);
      layer.shape.height = detail::require_dim(layers[i], "m", where);
      layer.shape.width = detail::require_dim(layers[i], "n", where);
      layer.index = layers[i].contains("index") ? layers[i].at("index").get<std::size_t>() : i + 1;
      m.layers.push_back(std::move(layer));
    }
    const auto& samples = require(doc, "samples", "manifest");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string where = "manifest samples[" + std::to_string(i) + "]";
      SampleEntry s;
      s.id = require(samples[i], "id", where).get<std::string>();
      s.label = require(samples[i], "label", where).get<std::size_t>();
      for (const auto& [layer, path] : require(samples[i], "tensors", where).items())
        s.tensors.emplace(layer, path.get<std::string>());
      m.samples.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return parse_manifest(doc, path.parent_path());
}

// Structural invariants that do not need the tensor files. Empty result means clean.
inline std::vector<std::string> check_manifest(const DatasetManifest& m) {
  std::vector<std::string> issues;
  if (m.classes.size() < 2) issues.push_back("manifest declares " + std::to_string(m.classes.size()) + " classes, need >= 2");
  if (m.layers.empty()) issues.push_back("manifest declares no layers");
  std::set<std::string> layer_ids;
  for (const auto& l : m.layers)
    if (!layer_ids.insert(l.id).second) issues.push_back("duplicate layer id '" + l.id + "'");
  std::set<std::string> sample_ids;
  std::vector<std::size_t> counts(m.classes.size(), 0);
  for (const auto& s : m.samples) {
    if (!sample_ids.insert(s.id).second) issues.push_back("duplicate sample id '" + s.id + "'");
    if (s.label >= m.classes.size())
      issues.push_back("sample '" + s.id + "': label " + std::to_string(s.label) + " out of range");
    else
      ++counts[s.label];
    for (const auto& l : m.layers)
      if (!s.tensors.contains(l.id)) issues.push_back("sample '" + s.id + "': no tensor for layer '" + l.id + "'");
    for (const auto& [layer, path] : s.tensors)
      if (!layer_ids.contains(layer)) issues.push_back("sample '" + s.id + "': unknown layer '" + layer + "'");
  }
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] < 2)
      issues.push_back("class '" + m.classes[c] + "' has " + std::to_string(counts[c]) + " samples, need >= 2");
  return issues;
}

// Manifest plus every tensor, indexed [layer position][sample position].
struct Dataset {
  DatasetManifest manifest;
  std::vector<std::vector<ActivationTensor>> tensors;
  std::vector<std::size_t> labels;

  [[nodiscard]] std::size_t size() const { return labels.size(); }
  [[nodiscard]] std::size_t class_count() const { return manifest.classes.size(); }
};

// Loads one tensor and checks it against the declared layer shape.
inline ActivationTensor load_layer_tensor(const DatasetManifest& m, const SampleEntry& sample, const LayerInfo& layer) {
  const auto path = m.tensor_path(sample, layer.id).string();
  auto tensor = read_tensor(path);
  if (tensor.shape() != layer.shape)
    throw ValidationError(path + ": sample '" + sample.id + "' layer '" + layer.id + "' has dims " +
                          tensor.shape().str() + ", manifest declares " + layer.shape.str());
  return tensor;
}

inline Dataset load_dataset(DatasetManifest manifest) {
  if (auto issues = check_manifest(manifest); !issues.empty()) throw ValidationError(issues.front());
  Dataset ds;
  ds.labels = manifest.labels();
  ds.tensors.resize(manifest.layers.size());
  for (std::size_t l = 0; l < manifest.layers.size(); ++l) {
    ds.tensors[l].reserve(manifest.samples.size());
    for (const auto& s : manifest.samples) ds.tensors[l].push_back(load_layer_tensor(manifest, s, manifest.layers[l]));
  }
  ds.manifest = std::move(manifest);
  return ds;
}

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json doc;
  doc["classes"] = m.classes;
  doc["layers"] = nlohmann::json::array();
  for (const auto& l : m.layers)
    doc["layers"].push_back(
        {{"id", l.id}, {"d", l.shape.channels}, {"m", l.shape.height}, {"n", l.shape.width}, {"index", l.index}});
  doc["samples"] = nlohmann::json::array();
  for (const auto& s : m.samples) doc["samples"].push_back({{"id", s.id}, {"label", s.label}, {"tensors", s.tensors}});
  return doc;
}

}  // namespace deepfeat
