#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "deepfeat/core/error.hpp"
#include "deepfeat/ensemble/pool.hpp"

namespace deepfeat {

struct SelectionStep {
  enum class Action { Add, Remove };
  Action action = Action::Add;
  std::string id;
  double criterion = 0.0;  // sum-rule accuracy after the step
};

struct EnsembleSelection {
  std::vector<std::string> ids;        // final subset, ordered by inclusion
  std::vector<std::size_t> indices;    // pool indices matching `ids`
  std::vector<double> criterion;       // one value per accepted step
  std::vector<SelectionStep> steps;

  [[nodiscard]] double final_criterion() const { return criterion.empty() ? 0.0 : criterion.back(); }
};

// Accuracy of the sum-rule fusion of `members` against `labels`.
inline double subset_accuracy(const ClassifierPool& pool, std::span<const std::size_t> members,
                              std::span<const std::size_t> labels) {
  const auto fused = sum_rule_indices(pool, members, false);
  const auto pred = argmax_predict(fused);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

// Sequential forward floating selection with sum-rule accuracy as the criterion.
// Forward: add the candidate giving the best accuracy, stopping when nothing improves
// or max_size is reached. Backward: after each addition, drop the member whose removal
// gives the best accuracy while that strictly improves. Ties go to the lower pool index.
inline EnsembleSelection sffs_select(const ClassifierPool& pool, std::span<const std::size_t> validation_labels,
                                     std::size_t max_size) {
  if (pool.empty()) throw ArgumentError("SFFS needs a non-empty pool");
  if (max_size == 0) throw ArgumentError("SFFS max_size must be >= 1");
  if (static_cast<std::size_t>(pool.samples()) != validation_labels.size())
    throw ArgumentError("SFFS labels do not align with the pool's score rows");

  EnsembleSelection sel;
  std::vector<std::size_t> current;
  double current_acc = 0.0;

  while (current.size() < max_size && current.size() < pool.size()) {
    std::size_t best_candidate = pool.size();
    double best_acc = -1.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      if (std::find(current.begin(), current.end(), c) != current.end()) continue;
      auto trial = current;
      trial.push_back(c);
      const double acc = subset_accuracy(pool, trial, validation_labels);
      if (acc > best_acc) {
        best_acc = acc;
        best_candidate = c;
      }
    }
    if (!current.empty() && !(best_acc > current_acc)) break;
    current.push_back(best_candidate);
    current_acc = best_acc;
    sel.criterion.push_back(current_acc);
    sel.steps.push_back({SelectionStep::Action::Add, pool[best_candidate].id, current_acc});

    while (current.size() > 1) {
      std::size_t worst_pos = current.size();
      double best_removed_acc = -1.0;
      std::size_t worst_index = pool.size();
      for (std::size_t pos = 0; pos < current.size(); ++pos) {
        auto trial = current;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(pos));
        const double acc = subset_accuracy(pool, trial, validation_labels);
        if (acc > best_removed_acc || (acc == best_removed_acc && current[pos] < worst_index)) {
          best_removed_acc = acc;
          worst_pos = pos;
          worst_index = current[pos];
        }
      }
      if (!(best_removed_acc > current_acc)) break;
      const std::size_t removed = current[worst_pos];
      current.erase(current.begin() + static_cast<std::ptrdiff_t>(worst_pos));
      current_acc = best_removed_acc;
      sel.criterion.push_back(current_acc);
      sel.steps.push_back({SelectionStep::Action::Remove, pool[removed].id, current_acc});
    }
  }

  sel.indices = current;
  for (auto i : current) sel.ids.push_back(pool[i].id);
  return sel;
}

}  // namespace deepfeat
