#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deepfeat/core/error.hpp"
#include "deepfeat/eval/cross_validation.hpp"
#include "deepfeat/eval/row_spec.hpp"
#include "deepfeat/reducers/layer_selection.hpp"
#include "deepfeat/reducers/reduction.hpp"
#include "deepfeat/svm/multiclass.hpp"
#include "deepfeat/tensor/manifest.hpp"

namespace deepfeat {

// Layer selection as written in the config, resolved against a manifest later.
struct LayerSelection {
  enum class Kind { All, Ids, Rule };
  Kind kind = Kind::All;
  std::vector<std::string> ids;
  std::size_t network_depth = 0;  // 0: the largest index in the manifest
  std::size_t stride = 10;
  std::size_t tail = 4;
};

struct PipelineConfig {
  std::string dataset_id;
  std::filesystem::path manifest;
  std::filesystem::path output_dir;
  LayerSelection layers;
  std::size_t reduction_threshold = kReductionThreshold;
  std::size_t raw_tail_layers = 4;
  std::vector<MethodSpec> methods;
  std::vector<std::string> rows;  // unparsed; resolved against method labels
  Coding coding = Coding::OneVsAll;
  SvmOptions svm;
  double sffs_validation_fraction = 0.2;
  std::uint64_t sffs_seed = 0;
  std::size_t folds = 5;
  std::uint64_t cv_seed = 0;
  std::size_t jobs = 1;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (allowed.count(key)) continue;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(where + ": unknown key '" + key + "' (allowed: " + list + ")");
  }
}

template <typename T>
T config_value(const nlohmann::json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type (" + obj.at(key).dump() + ")");
  }
}

inline std::size_t config_count(const nlohmann::json& obj, const char* key, std::size_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(where + "." + key + ": expected a non-negative integer, got " + v.dump());
  return v.get<std::size_t>();
}

inline std::uint64_t config_seed(const nlohmann::json& obj, const char* key, const std::string& where) {
  return static_cast<std::uint64_t>(config_count(obj, key, 0, where));
}

inline Scope parse_scope(const std::string& s, const std::string& where) {
  if (s == "local") return Scope::Local;
  if (s == "global") return Scope::Global;
  throw ConfigError(where + ": scope must be 'local' or 'global', got '" + s + "'");
}

inline Method require_method(const std::string& name, const std::string& where) {
  const auto m = parse_method(name);
  if (!m) throw ConfigError(where + ": unknown method '" + name + "' (valid methods: " + valid_method_list() + ")");
  return *m;
}

}  // namespace detail

// Parses the config document. Relative paths resolve against `base_dir`.
inline PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  using detail::config_count;
  using detail::config_value;
  detail::reject_unknown_keys(doc,
                              {"dataset_id", "manifest", "output_dir", "layers", "reduction", "methods", "rows", "svm",
                               "sffs", "cv", "jobs"},
                              "config");
  PipelineConfig cfg;
  if (!doc.contains("manifest")) throw ConfigError("config: missing 'manifest'");
  cfg.manifest = base_dir / config_value<std::string>(doc, "manifest", "", "config");
  cfg.output_dir = base_dir / config_value<std::string>(doc, "output_dir", "results", "config");
  cfg.dataset_id = config_value<std::string>(doc, "dataset_id", cfg.manifest.parent_path().filename().string(), "config");
  if (cfg.dataset_id.empty()) cfg.dataset_id = "dataset";
  cfg.jobs = config_count(doc, "jobs", 1, "config");
  if (cfg.jobs == 0) throw ConfigError("config.jobs: must be at least 1");

  if (doc.contains("layers")) {
    const auto& l = doc["layers"];
    if (l.is_string()) {
      if (l.get<std::string>() != "all") throw ConfigError("config.layers: expected \"all\", a list of ids, or a rule object");
    } else if (l.is_array()) {
      cfg.layers.kind = LayerSelection::Kind::Ids;
      for (const auto& id : l) {
        if (!id.is_string()) throw ConfigError("config.layers: layer ids must be strings");
        cfg.layers.ids.push_back(id.get<std::string>());
      }
      if (cfg.layers.ids.empty()) throw ConfigError("config.layers: empty layer list");
    } else if (l.is_object()) {
      detail::reject_unknown_keys(l, {"network_depth", "stride", "tail"}, "config.layers");
      cfg.layers.kind = LayerSelection::Kind::Rule;
      cfg.layers.network_depth = config_count(l, "network_depth", 0, "config.layers");
      cfg.layers.stride = config_count(l, "stride", 10, "config.layers");
      cfg.layers.tail = config_count(l, "tail", 4, "config.layers");
      if (cfg.layers.stride == 0) throw ConfigError("config.layers.stride: must be at least 1");
    } else {
      throw ConfigError("config.layers: expected \"all\", a list of ids, or a rule object");
    }
  }

  ReductionPlan defaults;
  if (doc.contains("reduction")) {
    const auto& r = doc["reduction"];
    detail::reject_unknown_keys(r, {"threshold", "raw_tail_layers", "budget", "chi_bins", "cooc_radius", "cooc_epsilon"},
                                "config.reduction");
    cfg.reduction_threshold = config_count(r, "threshold", kReductionThreshold, "config.reduction");
    cfg.raw_tail_layers = config_count(r, "raw_tail_layers", 4, "config.reduction");
    defaults.budget = config_count(r, "budget", kTotalFeatureBudget, "config.reduction");
    defaults.chi_bins = config_count(r, "chi_bins", kChi2Bins, "config.reduction");
    defaults.cooc_radius = config_count(r, "cooc_radius", 1, "config.reduction");
    defaults.cooc_epsilon = config_value<double>(r, "cooc_epsilon", 0.0, "config.reduction");
  }

  if (!doc.contains("methods") || !doc["methods"].is_array() || doc["methods"].empty())
    throw ConfigError("config.methods: expected a non-empty list (valid methods: " + valid_method_list() + ")");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < doc["methods"].size(); ++i) {
    const auto& m = doc["methods"][i];
    const std::string where = "config.methods[" + std::to_string(i) + "]";
    MethodSpec spec;
    if (m.is_string()) {
      const auto method = detail::require_method(m.get<std::string>(), where);
      spec.label = m.get<std::string>();
      spec.plan = ReductionPlan::for_method(method);
    } else if (m.is_object()) {
      detail::reject_unknown_keys(m, {"name", "label", "scope", "budget", "pca_postprocess", "pca_postprocess_keep"}, where);
      if (!m.contains("name")) throw ConfigError(where + ": missing 'name'");
      const auto name = config_value<std::string>(m, "name", "", where);
      const auto method = detail::require_method(name, where);
      std::optional<Scope> scope;
      if (m.contains("scope")) scope = detail::parse_scope(config_value<std::string>(m, "scope", "", where), where);
      spec.plan = ReductionPlan::for_method(method, scope);
      spec.label = config_value<std::string>(m, "label", name, where);
      spec.plan.pca_postprocess = config_value<bool>(m, "pca_postprocess", false, where);
      spec.plan.pca_postprocess_keep = config_count(m, "pca_postprocess_keep", 0, where);
    } else {
      throw ConfigError(where + ": expected a method name or an object");
    }
    spec.plan.budget = m.is_object() ? config_count(m, "budget", defaults.budget, where) : defaults.budget;
    spec.plan.chi_bins = defaults.chi_bins;
    spec.plan.cooc_radius = defaults.cooc_radius;
    spec.plan.cooc_epsilon = defaults.cooc_epsilon;
    try {
      spec.plan.validate();
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (spec.label.empty()) throw ConfigError(where + ": empty label");
    if (!labels.insert(spec.label).second) throw ConfigError(where + ": duplicate method label '" + spec.label + "'");
    cfg.methods.push_back(std::move(spec));
  }

  if (doc.contains("rows")) {
    if (!doc["rows"].is_array()) throw ConfigError("config.rows: expected a list of row expressions");
    for (const auto& r : doc["rows"]) {
      if (!r.is_string()) throw ConfigError("config.rows: row expressions must be strings");
      cfg.rows.push_back(r.get<std::string>());
    }
  } else {
    for (const auto& m : cfg.methods) cfg.rows.push_back(m.label);
  }

  if (doc.contains("svm")) {
    const auto& s = doc["svm"];
    detail::reject_unknown_keys(s, {"coding", "c", "tol", "max_epochs", "seed"}, "config.svm");
    if (s.contains("coding")) {
      const auto coding = parse_coding(config_value<std::string>(s, "coding", "", "config.svm"));
      if (!coding) throw ConfigError("config.svm.coding: expected 'one-vs-all' or 'one-vs-one'");
      cfg.coding = *coding;
    }
    cfg.svm.c = config_value<double>(s, "c", cfg.svm.c, "config.svm");
    cfg.svm.tol = config_value<double>(s, "tol", cfg.svm.tol, "config.svm");
    cfg.svm.max_epochs = config_count(s, "max_epochs", cfg.svm.max_epochs, "config.svm");
    cfg.svm.seed = detail::config_seed(s, "seed", "config.svm");
    if (!(cfg.svm.c > 0.0)) throw ConfigError("config.svm.c: must be positive");
    if (!(cfg.svm.tol > 0.0)) throw ConfigError("config.svm.tol: must be positive");
    if (cfg.svm.max_epochs == 0) throw ConfigError("config.svm.max_epochs: must be at least 1");
  }
  if (doc.contains("sffs")) {
    const auto& s = doc["sffs"];
    detail::reject_unknown_keys(s, {"validation_fraction", "seed"}, "config.sffs");
    cfg.sffs_validation_fraction = config_value<double>(s, "validation_fraction", 0.2, "config.sffs");
    cfg.sffs_seed = detail::config_seed(s, "seed", "config.sffs");
    if (!(cfg.sffs_validation_fraction > 0.0 && cfg.sffs_validation_fraction < 1.0))
      throw ConfigError("config.sffs.validation_fraction: must lie strictly between 0 and 1");
  }
  if (doc.contains("cv")) {
    const auto& c = doc["cv"];
    detail::reject_unknown_keys(c, {"folds", "seed"}, "config.cv");
    cfg.folds = config_count(c, "folds", 5, "config.cv");
    cfg.cv_seed = detail::config_seed(c, "seed", "config.cv");
    if (cfg.folds < 2) throw ConfigError("config.cv.folds: must be at least 2");
  }
  // Rows are checked here so that a bad row fails before any data is read.
  for (const auto& r : cfg.rows) (void)parse_row(r, labels);
  return cfg;
}

// Comments (// and /* */) are allowed in config files.
inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str(), nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

// Manifest positions of the configured layers, in network order.
inline std::vector<std::size_t> resolve_layers(const LayerSelection& sel, const DatasetManifest& m) {
  std::vector<std::size_t> out;
  switch (sel.kind) {
    case LayerSelection::Kind::All:
      for (std::size_t i = 0; i < m.layers.size(); ++i) out.push_back(i);
      break;
    case LayerSelection::Kind::Ids:
      for (const auto& id : sel.ids) {
        const auto pos = m.layer_position(id);
        if (!pos) throw ConfigError("config.layers: unknown layer '" + id + "'");
        out.push_back(*pos);
      }
      break;
    case LayerSelection::Kind::Rule: {
      std::size_t depth = sel.network_depth;
      if (depth == 0)
        for (const auto& l : m.layers) depth = std::max(depth, l.index);
      const auto wanted = select_layers(depth, sel.stride, sel.tail);
      for (auto idx : wanted)
        for (std::size_t i = 0; i < m.layers.size(); ++i)
          if (m.layers[i].index == idx) out.push_back(i);
      if (out.empty()) throw ConfigError("config.layers: the selection rule matched no manifest layer");
      break;
    }
  }
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return m.layers[a].index < m.layers[b].index; });
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw ConfigError("config.layers: a layer is listed twice");
  return out;
}

inline CvSettings make_settings(const PipelineConfig& cfg, const DatasetManifest& m) {
  CvSettings s;
  s.layers = resolve_layers(cfg.layers, m);
  s.methods = cfg.methods;
  std::set<std::string> labels;
  for (const auto& spec : cfg.methods) labels.insert(spec.label);
  for (const auto& r : cfg.rows) s.rows.push_back(parse_row(r, labels));
  s.reduction_threshold = cfg.reduction_threshold;
  s.raw_tail_layers = cfg.raw_tail_layers;
  s.coding = cfg.coding;
  s.svm = cfg.svm;
  s.sffs_validation_fraction = cfg.sffs_validation_fraction;
  s.sffs_seed = cfg.sffs_seed;
  s.jobs = cfg.jobs;
  return s;
}

}  // namespace deepfeat
