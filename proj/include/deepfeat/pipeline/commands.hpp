#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deepfeat/core/binary_io.hpp"
#include "deepfeat/core/error.hpp"
#include "deepfeat/eval/cross_validation.hpp"
#include "deepfeat/eval/report.hpp"
#include "deepfeat/eval/wilcoxon.hpp"
#include "deepfeat/pipeline/config.hpp"
#include "deepfeat/reducers/reducer_io.hpp"
#include "deepfeat/svm/model_io.hpp"
#include "deepfeat/tensor/folds.hpp"
#include "deepfeat/tensor/manifest.hpp"
#include "deepfeat/tensor/tensor_file.hpp"

namespace deepfeat {

enum class OutputFormat { Table, Json };

// Each command writes its report to `out`, diagnostics to `err`, and returns
// the process exit code: 0 exactly when the report holds no errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

// Checks the manifest, then opens every referenced tensor.
inline int cmd_validate(const std::filesystem::path& manifest_path, std::ostream& out, std::ostream& err) {
  DatasetManifest m;
  try {
    m = load_manifest(manifest_path);
  } catch (const Error& e) {
    err << manifest_path.string() << ": " << e.what() << '\n';
    return kExitFailure;
  }
  std::size_t problems = 0;
  for (const auto& issue : check_manifest(m)) {
    err << manifest_path.string() << ": " << issue << '\n';
    ++problems;
  }
  std::size_t checked = 0;
  for (const auto& sample : m.samples) {
    for (const auto& layer : m.layers) {
      const auto it = sample.tensors.find(layer.id);
      if (it == sample.tensors.end()) continue;  // already reported by check_manifest
      try {
        (void)load_layer_tensor(m, sample, layer);
        ++checked;
      } catch (const Error& e) {
        err << e.what() << '\n';
        ++problems;
      }
    }
  }
  if (problems > 0) {
    err << problems << " problem(s) found\n";
    return kExitFailure;
  }
  out << "ok: " << m.samples.size() << " samples, " << m.layers.size() << " layers, " << checked << " tensors\n";
  return kExitOk;
}

// File-name-safe form of a classifier id.
inline std::string sanitize_id(const std::string& id) {
  std::string s;
  for (char ch : id) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '-' ||
                      ch == '_' || ch == '.';
    s += keep ? ch : '_';
  }
  return s;
}

struct RunOptions {
  OutputFormat format = OutputFormat::Table;
  std::optional<std::size_t> jobs;  // overrides the config
  bool save_models = true;
};

// Writes <output_dir>/results.json, results.txt and models/fold_<f>/<id>.{reducer,svm}.
inline int cmd_run(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& out,
                   std::ostream& err) {
  PipelineConfig cfg;
  DatasetManifest manifest;
  CvSettings settings;
  try {
    cfg = load_config(config_path);
    if (options.jobs) {
      if (*options.jobs == 0) throw ConfigError("--jobs must be at least 1");
      cfg.jobs = *options.jobs;
    }
    manifest = load_manifest(cfg.manifest);
    const auto issues = check_manifest(manifest);
    if (!issues.empty()) {
      for (const auto& i : issues) err << cfg.manifest.string() << ": " << i << '\n';
      return kExitConfig;
    }
    settings = make_settings(cfg, manifest);
    check_settings(Dataset{manifest, {}, {}}, settings);
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const Dataset data = load_dataset(manifest);
    const FoldSpec folds = stratified_folds(data.labels, cfg.folds, cfg.cv_seed);
    for (const auto& w : folds.warnings) err << "warning: " << w << '\n';

    std::filesystem::create_directories(cfg.output_dir);
    ClassifierSink sink = [&](std::size_t fold, const std::string& id, const FittedReducer& reducer,
                              const MulticlassSvmModel& model) {
      const auto dir = cfg.output_dir / "models" / ("fold_" + std::to_string(fold));
      std::filesystem::create_directories(dir);
      const auto stem = sanitize_id(id);
      save_reducer(reducer, (dir / (stem + ".reducer")).string());
      save_svm(model, (dir / (stem + ".svm")).string());
    };
    const auto report = run_cv(data, folds, settings, options.save_models ? &sink : nullptr);

    const auto doc = results_document({run_json(cfg.dataset_id, data, settings, folds, report)});
    const std::string json_text = doc.dump(2) + "\n";
    const std::string table_text = results_table(doc);
    binary::write_file_atomic((cfg.output_dir / "results.json").string(), std::string_view(json_text));
    binary::write_file_atomic((cfg.output_dir / "results.txt").string(), std::string_view(table_text));
    out << (options.format == OutputFormat::Json ? json_text : table_text);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

// Row mean accuracy per data set id.
inline std::map<std::string, double> row_means(const nlohmann::json& doc, const std::string& row, const std::string& path) {
  std::map<std::string, double> means;
  for (const auto& run : doc.at("runs")) {
    const auto ds = run.at("dataset").get<std::string>();
    for (const auto& r : run.at("rows"))
      if (r.at("id").get<std::string>() == row) {
        if (!means.emplace(ds, r.at("mean_accuracy").get<double>()).second)
          throw FormatError(path + ": data set '" + ds + "' appears twice");
      }
  }
  if (means.empty()) throw ArgumentError(path + ": no run has a row named '" + row + "'");
  return means;
}

inline std::string first_row(const nlohmann::json& doc, const std::string& path) {
  for (const auto& run : doc.at("runs"))
    if (!run.at("rows").empty()) return run.at("rows")[0].at("id").get<std::string>();
  throw FormatError(path + ": results contain no rows");
}

struct CompareOptions {
  OutputFormat format = OutputFormat::Table;
  std::optional<std::string> row_a;  // default: first row of each file
  std::optional<std::string> row_b;
};

// Pairs the chosen rows' mean accuracies by data set id and runs the signed-rank test.
inline int cmd_compare(const std::string& path_a, const std::string& path_b, const CompareOptions& options,
                       std::ostream& out, std::ostream& err) {
  try {
    const auto doc_a = load_results(path_a);
    const auto doc_b = load_results(path_b);
    const auto row_a = options.row_a.value_or(first_row(doc_a, path_a));
    const auto row_b = options.row_b.value_or(first_row(doc_b, path_b));
    const auto ma = row_means(doc_a, row_a, path_a);
    const auto mb = row_means(doc_b, row_b, path_b);

    std::vector<std::string> only_a, only_b;
    for (const auto& [id, _] : ma)
      if (!mb.contains(id)) only_a.push_back(id);
    for (const auto& [id, _] : mb)
      if (!ma.contains(id)) only_b.push_back(id);
    if (!only_a.empty() || !only_b.empty()) {
      auto join = [](const auto& ids) {
        std::string s;
        for (const auto& [id, _] : ids) s += (s.empty() ? "" : ", ") + id;
        return s;
      };
      auto join_list = [](const std::vector<std::string>& ids) {
        std::string s;
        for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
        return s;
      };
      err << "data set ids do not match\n";
      err << "  " << path_a << ": " << join(ma) << '\n';
      err << "  " << path_b << ": " << join(mb) << '\n';
      if (!only_a.empty()) err << "  only in " << path_a << ": " << join_list(only_a) << '\n';
      if (!only_b.empty()) err << "  only in " << path_b << ": " << join_list(only_b) << '\n';
      return kExitFailure;
    }

    std::vector<double> a, b;
    for (const auto& [id, v] : ma) {
      a.push_back(v);
      b.push_back(mb.at(id));
    }
    const auto w = wilcoxon_signed_rank(a, b);
    if (options.format == OutputFormat::Json) {
      const nlohmann::json doc = {{"row_a", row_a},
                                  {"row_b", row_b},
                                  {"datasets", a.size()},
                                  {"n_effective", w.n_effective},
                                  {"w", w.w},
                                  {"w_plus", w.w_plus},
                                  {"w_minus", w.w_minus},
                                  {"p_value", w.p_value},
                                  {"method", std::string(wilcoxon_method_name(w.method))}};
      out << doc.dump(2) << '\n';
    } else {
      char p[64];
      std::snprintf(p, sizeof p, "%.6g", w.p_value);
      out << "a: " << row_a << " (" << path_a << ")\n";
      out << "b: " << row_b << " (" << path_b << ")\n";
      out << "data sets: " << a.size() << "\n";
      out << "W = " << w.w << "  n = " << w.n_effective << "  p = " << p << "  method = "
          << wilcoxon_method_name(w.method) << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

// Concatenates the runs of several results files; data set ids must stay unique.
inline int cmd_merge(const std::vector<std::string>& inputs, const std::string& output, OutputFormat format,
                     std::ostream& out, std::ostream& err) {
  try {
    std::vector<nlohmann::json> runs;
    std::set<std::string> seen;
    for (const auto& path : inputs) {
      const auto doc = load_results(path);
      for (const auto& run : doc.at("runs")) {
        const auto ds = run.at("dataset").get<std::string>();
        if (!seen.insert(ds).second) throw ArgumentError(path + ": data set '" + ds + "' already merged");
        runs.push_back(run);
      }
    }
    const auto doc = results_document(std::move(runs));
    const std::string json_text = doc.dump(2) + "\n";
    binary::write_file_atomic(output, std::string_view(json_text));
    out << (format == OutputFormat::Json ? json_text : results_table(doc));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace deepfeat
