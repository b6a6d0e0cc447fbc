#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deepfeat/core/error.hpp"
#include "deepfeat/eval/cross_validation.hpp"

namespace deepfeat {

inline constexpr const char* kResultsFormat = "deepfeat-results";
inline constexpr int kResultsVersion = 1;

inline nlohmann::json cv_result_json(const CvResult& r) {
  return {{"id", r.id}, {"fold_accuracies", r.fold_accuracies}, {"mean_accuracy", r.mean_accuracy}};
}

// One run = one data set evaluated under one configuration.
inline nlohmann::json run_json(const std::string& dataset_id, const Dataset& data, const CvSettings& settings,
                               const FoldSpec& folds, const CvReport& report) {
  nlohmann::json run;
  run["dataset"] = dataset_id;
  run["folds"] = folds.k;
  run["samples"] = data.size();
  run["classes"] = data.manifest.classes;
  nlohmann::json layers = nlohmann::json::array();
  for (auto pos : settings.layers) layers.push_back(data.manifest.layers[pos].id);
  run["layers"] = layers;
  run["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) run["rows"].push_back(cv_result_json(r));
  run["classifiers"] = nlohmann::json::array();
  for (const auto& r : report.classifiers) run["classifiers"].push_back(cv_result_json(r));
  run["selections"] = nlohmann::json::array();
  for (const auto& s : report.selections) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& st : s.selection.steps)
      steps.push_back({{"action", st.action == SelectionStep::Action::Add ? "add" : "remove"},
                       {"id", st.id},
                       {"criterion", st.criterion}});
    run["selections"].push_back(
        {{"row", s.row}, {"fold", s.fold}, {"ids", s.selection.ids}, {"criterion", s.selection.criterion}, {"steps", steps}});
  }
  return run;
}

inline nlohmann::json results_document(std::vector<nlohmann::json> runs) {
  return {{"format", kResultsFormat}, {"version", kResultsVersion}, {"runs", std::move(runs)}};
}

// Accepts a results document; rejects anything else with a clear message.
inline nlohmann::json load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kResultsFormat || !doc.contains("runs") ||
      !doc["runs"].is_array())
    throw FormatError(path + ": not a deepfeat results document");
  if (doc.value("version", 0) != kResultsVersion)
    throw FormatError(path + ": unsupported results version " + doc["version"].dump());
  return doc;
}

namespace detail {

inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

inline std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& body) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : body)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        out << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : body) emit(row);
  return out.str();
}

}  // namespace detail

// Single run: methods x folds + Avg. Several runs: methods x data sets + Avg
// (row mean accuracies). Values are percentages with one decimal.
inline std::string results_table(const nlohmann::json& doc) {
  const auto& runs = doc.at("runs");
  if (runs.empty()) return "(no runs)\n";
  if (runs.size() == 1) {
    const auto& run = runs[0];
    std::vector<std::string> header{"Method"};
    for (std::size_t f = 0; f < run.at("folds").get<std::size_t>(); ++f) header.push_back("F" + std::to_string(f + 1));
    header.push_back("Avg");
    std::vector<std::vector<std::string>> body;
    for (const auto& row : run.at("rows")) {
      std::vector<std::string> line{row.at("id").get<std::string>()};
      for (const auto& a : row.at("fold_accuracies")) line.push_back(detail::percent(a.get<double>()));
      line.push_back(detail::percent(row.at("mean_accuracy").get<double>()));
      body.push_back(std::move(line));
    }
    return detail::render_table(header, body);
  }
  std::vector<std::string> header{"Method"};
  std::vector<std::string> methods;
  std::map<std::string, std::map<std::string, double>> cell;  // method -> dataset -> mean
  for (const auto& run : runs) {
    const auto ds = run.at("dataset").get<std::string>();
    header.push_back(ds);
    for (const auto& row : run.at("rows")) {
      const auto id = row.at("id").get<std::string>();
      if (std::find(methods.begin(), methods.end(), id) == methods.end()) methods.push_back(id);
      cell[id][ds] = row.at("mean_accuracy").get<double>();
    }
  }
  header.push_back("Avg");
  std::vector<std::vector<std::string>> body;
  for (const auto& m : methods) {
    std::vector<std::string> line{m};
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 1; i + 1 < header.size(); ++i) {
      const auto it = cell[m].find(header[i]);
      if (it == cell[m].end()) {
        line.push_back("---");
      } else {
        line.push_back(detail::percent(it->second));
        sum += it->second;
        ++count;
      }
    }
    line.push_back(count ? detail::percent(sum / static_cast<double>(count)) : "---");
    body.push_back(std::move(line));
  }
  return detail::render_table(header, body);
}

}  // namespace deepfeat
