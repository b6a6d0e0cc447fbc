#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "deepfeat/core/error.hpp"
#include "deepfeat/core/parallel.hpp"
#include "deepfeat/core/random.hpp"
#include "deepfeat/ensemble/pool.hpp"
#include "deepfeat/ensemble/sffs.hpp"
#include "deepfeat/eval/accuracy.hpp"
#include "deepfeat/eval/row_spec.hpp"
#include "deepfeat/reducers/layer_selection.hpp"
#include "deepfeat/reducers/reduction.hpp"
#include "deepfeat/svm/multiclass.hpp"
#include "deepfeat/tensor/folds.hpp"
#include "deepfeat/tensor/manifest.hpp"

namespace deepfeat {

// A configured method family; `label` is what rows refer to.
struct MethodSpec {
  std::string label;
  ReductionPlan plan;
};

struct CvSettings {
  std::vector<std::size_t> layers;  // manifest layer positions, network order
  std::vector<MethodSpec> methods;
  std::vector<RowSpec> rows;
  std::size_t reduction_threshold = kReductionThreshold;
  std::size_t raw_tail_layers = 4;  // last layers always fed to the SVM unreduced
  Coding coding = Coding::OneVsAll;
  SvmOptions svm;
  double sffs_validation_fraction = 0.2;
  std::uint64_t sffs_seed = 0;
  std::size_t jobs = 1;
};

struct CvResult {
  std::string id;
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  std::vector<ScoreMatrix> fold_scores;  // fused test-fold scores, rows follow FoldSpec::test_indices
};

struct FoldSelection {
  std::string row;
  std::size_t fold = 0;
  EnsembleSelection selection;
};

struct CvReport {
  std::vector<CvResult> rows;
  std::vector<CvResult> classifiers;  // every (layer, method) classifier on its own
  std::vector<FoldSelection> selections;
};

// Receives every classifier fitted on a full training fold (for persisting models).
using ClassifierSink = std::function<void(std::size_t fold, const std::string& id, const FittedReducer&,
                                          const MulticlassSvmModel&)>;

namespace detail {

struct ClassifierPlan {
  std::string id;
  std::string layer_id;
  std::string method;
  std::size_t layer_pos = 0;  // manifest position
  ReductionPlan effective;
  std::uint64_t slot = 0;  // seed tag; identical for classifiers sharing an effective plan
  std::size_t twin_of = 0;  // index of the first classifier with the same (layer, effective plan)
};

inline constexpr std::uint64_t kRawSlot = 0xFFFF;

inline std::vector<ClassifierPlan> plan_classifiers(const Dataset& data, const CvSettings& settings) {
  std::vector<ClassifierPlan> plans;
  const std::size_t n_layers = settings.layers.size();
  for (std::size_t m = 0; m < settings.methods.size(); ++m) {
    for (std::size_t l = 0; l < n_layers; ++l) {
      const auto pos = settings.layers[l];
      const auto& layer = data.manifest.layers[pos];
      const bool in_tail = l + settings.raw_tail_layers >= n_layers;
      const bool raw = in_tail || !needs_reduction(layer.shape.size(), settings.reduction_threshold);
      ClassifierPlan p;
      p.id = classifier_id(layer.id, settings.methods[m].label);
      p.layer_id = layer.id;
      p.method = settings.methods[m].label;
      p.layer_pos = pos;
      p.effective = raw ? ReductionPlan::for_method(Method::RAW) : settings.methods[m].plan;
      p.slot = raw ? kRawSlot : m;
      p.twin_of = plans.size();
      for (std::size_t q = 0; q < plans.size(); ++q)
        if (raw && plans[q].layer_pos == pos && plans[q].slot == kRawSlot) {
          p.twin_of = q;
          break;
        }
      plans.push_back(std::move(p));
    }
  }
  return plans;
}

inline std::vector<const ActivationTensor*> gather(const Dataset& data, std::size_t layer_pos,
                                                   std::span<const std::size_t> idx) {
  std::vector<const ActivationTensor*> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(&data.tensors[layer_pos][i]);
  return out;
}

inline std::vector<std::size_t> gather_labels(const Dataset& data, std::span<const std::size_t> idx) {
  std::vector<std::size_t> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(data.labels[i]);
  return out;
}

// Fits every planned classifier on `train` and scores `eval`. Only training-side
// tensors and labels reach the fit calls.
inline ClassifierPool train_and_score(const Dataset& data, const CvSettings& settings,
                                      const std::vector<ClassifierPlan>& plans, std::span<const std::size_t> train,
                                      std::span<const std::size_t> eval, std::uint64_t stage, std::size_t fold,
                                      const ClassifierSink* sink) {
  const auto train_labels = gather_labels(data, train);
  std::vector<ScoreMatrix> scores(plans.size());
  std::vector<std::size_t> unique;
  for (std::size_t i = 0; i < plans.size(); ++i)
    if (plans[i].twin_of == i) unique.push_back(i);

  std::vector<std::optional<std::pair<FittedReducer, MulticlassSvmModel>>> fitted(plans.size());
  parallel_for(unique.size(), settings.jobs, [&](std::size_t u) {
    const auto& p = plans[unique[u]];
    const auto& shape = data.manifest.layers[p.layer_pos].shape;
    const auto train_t = gather(data, p.layer_pos, train);
    const auto eval_t = gather(data, p.layer_pos, eval);
    auto reducer = fit_reducer(p.effective, shape, train_t, train_labels);
    const Matrix train_x = reducer.transform(train_t);
    SvmOptions opts = settings.svm;
    opts.seed = derive_seed(settings.svm.seed, {stage, fold, p.layer_pos, p.slot});
    auto model = train_multiclass(train_x, train_labels, data.class_count(), settings.coding, opts);
    scores[unique[u]] = predict_scores(model, reducer.transform(eval_t));
    if (sink) fitted[unique[u]].emplace(std::move(reducer), std::move(model));
  });

  ClassifierPool pool;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    pool.add({plans[i].id, plans[i].layer_id, plans[i].method, scores[plans[i].twin_of]});
    if (sink) {
      const auto& f = fitted[plans[i].twin_of];
      (*sink)(fold, plans[i].id, f->first, f->second);
    }
  }
  return pool;
}

inline std::vector<std::size_t> fusion_members(const ClassifierPool& pool, const RowSpec& row,
                                               std::span<const std::string> layer_order) {
  std::set<std::string> dropped;
  if (row.drop_last > 0) dropped.insert(layer_order.end() - static_cast<std::ptrdiff_t>(row.drop_last), layer_order.end());
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& e = pool[i];
    if (dropped.contains(e.layer_id)) continue;
    if (std::find(row.methods.begin(), row.methods.end(), e.method) != row.methods.end()) members.push_back(i);
  }
  return members;
}

inline void finish(CvResult& r) {
  r.mean_accuracy = std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) /
                    static_cast<double>(r.fold_accuracies.size());
}

}  // namespace detail

inline void check_settings(const Dataset& data, const CvSettings& settings) {
  if (settings.layers.empty()) throw ConfigError("no layers selected");
  if (settings.methods.empty()) throw ConfigError("no methods configured");
  if (settings.rows.empty()) throw ConfigError("no result rows configured");
  std::set<std::string> labels;
  for (const auto& m : settings.methods) {
    m.plan.validate();
    if (!labels.insert(m.label).second) throw ConfigError("duplicate method label '" + m.label + "'");
  }
  for (auto pos : settings.layers)
    if (pos >= data.manifest.layers.size()) throw ConfigError("layer position " + std::to_string(pos) + " out of range");
  for (const auto& row : settings.rows) {
    if (row.kind == RowSpec::Kind::Fusion) {
      if (row.drop_last >= settings.layers.size())
        throw ConfigError("row '" + row.label + "' drops " + std::to_string(row.drop_last) + " of only " +
                          std::to_string(settings.layers.size()) + " layers");
      for (const auto& m : row.methods)
        if (!labels.contains(m)) throw ConfigError("row '" + row.label + "' references unknown method '" + m + "'");
    }
  }
  // Reduced layers must be compatible with their method.
  for (const auto& p : detail::plan_classifiers(data, settings)) {
    const auto& shape = data.manifest.layers[p.layer_pos].shape;
    if (p.effective.method == Method::LBP_CHI && (shape.height < 3 || shape.width < 3))
      throw ConfigError("method LB needs maps of at least 3x3; layer '" + p.layer_id + "' is " + shape.str());
  }
}

// K-fold evaluation. Per fold: reducers and SVMs are fitted on the training folds,
// the test fold is scored, and each configured row is fused and scored. SFFS rows
// select on an inner stratified hold-out of the training folds, then fuse the
// selected full-training-fold classifiers.
inline CvReport run_cv(const Dataset& data, const FoldSpec& folds, const CvSettings& settings,
                       const ClassifierSink* sink = nullptr) {
  check_settings(data, settings);
  if (folds.assignment.size() != data.size()) throw ConfigError("fold assignment does not cover the data set");
  const auto plans = detail::plan_classifiers(data, settings);
  std::vector<std::string> layer_order;
  for (auto pos : settings.layers) layer_order.push_back(data.manifest.layers[pos].id);
  const bool any_sffs = std::any_of(settings.rows.begin(), settings.rows.end(),
                                    [](const RowSpec& r) { return r.kind == RowSpec::Kind::Sffs; });

  CvReport report;
  for (const auto& row : settings.rows) report.rows.push_back({row.label, {}, 0.0, {}});
  for (const auto& p : plans) report.classifiers.push_back({p.id, {}, 0.0, {}});

  for (std::size_t fold = 0; fold < folds.k; ++fold) {
    const auto train = folds.train_indices(fold);
    const auto test = folds.test_indices(fold);
    if (test.empty()) throw ConfigError("fold " + std::to_string(fold) + " has no test samples");
    const auto test_labels = detail::gather_labels(data, test);
    const auto pool = detail::train_and_score(data, settings, plans, train, test, 0, fold, sink);

    for (std::size_t c = 0; c < pool.size(); ++c) {
      report.classifiers[c].fold_accuracies.push_back(accuracy(argmax_predict(pool[c].scores), test_labels));
    }

    std::optional<ClassifierPool> inner_pool;
    std::vector<std::size_t> validation_labels;
    if (any_sffs) {
      const auto train_labels = detail::gather_labels(data, train);
      const auto split =
          stratified_holdout(train_labels, settings.sffs_validation_fraction, derive_seed(settings.sffs_seed, {fold}));
      std::vector<std::size_t> inner_train, validation;
      for (auto i : split.train) inner_train.push_back(train[i]);
      for (auto i : split.validation) validation.push_back(train[i]);
      validation_labels = detail::gather_labels(data, validation);
      inner_pool = detail::train_and_score(data, settings, plans, inner_train, validation, 1, fold, nullptr);
    }

    for (std::size_t r = 0; r < settings.rows.size(); ++r) {
      const auto& row = settings.rows[r];
      std::vector<std::size_t> members;
      if (row.kind == RowSpec::Kind::Fusion) {
        members = detail::fusion_members(pool, row, layer_order);
        if (members.empty()) throw ConfigError("row '" + row.label + "' selects no classifiers");
      } else {
        auto selection = sffs_select(*inner_pool, validation_labels, row.sffs_size);
        members = selection.indices;  // inner and outer pools share classifier order
        report.selections.push_back({row.label, fold, std::move(selection)});
      }
      auto fused = sum_rule_indices(pool, members);
      report.rows[r].fold_accuracies.push_back(accuracy(argmax_predict(fused), test_labels));
      report.rows[r].fold_scores.push_back(std::move(fused));
    }
  }
  for (auto& r : report.rows) detail::finish(r);
  for (auto& r : report.classifiers) detail::finish(r);
  return report;
}

}  // namespace deepfeat
