#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deepfeat/core/error.hpp"
#include "deepfeat/core/matrix.hpp"
#include "deepfeat/core/parallel.hpp"
#include "deepfeat/core/random.hpp"
#include "deepfeat/svm/linear_svm.hpp"
#include "deepfeat/svm/standardize.hpp"

namespace deepfeat {

enum class Coding { OneVsAll, OneVsOne };

inline std::string_view coding_name(Coding c) { return c == Coding::OneVsAll ? "one-vs-all" : "one-vs-one"; }

inline std::optional<Coding> parse_coding(std::string_view s) {
  if (s == "one-vs-all") return Coding::OneVsAll;
  if (s == "one-vs-one") return Coding::OneVsOne;
  return std::nullopt;
}

inline constexpr std::size_t kRestOfClasses = std::numeric_limits<std::size_t>::max();

// `positive` scores +1. `negative` is a class index, or kRestOfClasses for one-vs-all.
struct BinaryTask {
  std::size_t positive = 0;
  std::size_t negative = kRestOfClasses;
  friend bool operator==(const BinaryTask&, const BinaryTask&) = default;
};

// Rows are n_samples x K; each row is nonnegative and sums to 1.
using ScoreMatrix = Matrix;

struct MulticlassSvmModel {
  std::size_t classes = 0;
  Coding coding = Coding::OneVsAll;
  StandardizationStats stats;
  std::vector<BinaryTask> tasks;
  std::vector<BinarySvmModel> machines;

  [[nodiscard]] Eigen::Index dim() const { return stats.dim(); }
};

// One-vs-all with K = 2 degenerates to the single pair (0, 1), same as one-vs-one.
inline std::vector<BinaryTask> coding_tasks(std::size_t classes, Coding coding) {
  std::vector<BinaryTask> tasks;
  if (classes == 2) return {BinaryTask{0, 1}};
  if (coding == Coding::OneVsAll) {
    for (std::size_t k = 0; k < classes; ++k) tasks.push_back({k, kRestOfClasses});
  } else {
    for (std::size_t a = 0; a < classes; ++a)
      for (std::size_t b = a + 1; b < classes; ++b) tasks.push_back({a, b});
  }
  return tasks;
}

inline MulticlassSvmModel train_multiclass(const Matrix& rows, std::span<const std::size_t> labels,
                                           std::size_t classes, Coding coding, const SvmOptions& options,
                                           std::size_t jobs = 1) {
  if (classes < 2) throw TrainingError("need at least 2 classes, got " + std::to_string(classes));
  if (static_cast<std::size_t>(rows.rows()) != labels.size())
    throw ArgumentError("SVM rows and labels differ in length");
  std::vector<std::size_t> counts(classes, 0);
  for (auto y : labels) {
    if (y >= classes) throw TrainingError("label " + std::to_string(y) + " out of range");
    ++counts[y];
  }
  for (std::size_t k = 0; k < classes; ++k)
    if (counts[k] == 0) throw TrainingError("class " + std::to_string(k) + " missing from training data");

  MulticlassSvmModel model;
  model.classes = classes;
  model.coding = coding;
  model.stats = StandardizationStats::fit(rows);
  model.tasks = coding_tasks(classes, coding);
  model.machines.resize(model.tasks.size());
  const Matrix z = model.stats.apply(rows);

  parallel_for(model.tasks.size(), jobs, [&](std::size_t t) {
    const auto& task = model.tasks[t];
    std::vector<Eigen::Index> members;
    std::vector<int> y;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == task.positive) {
        members.push_back(static_cast<Eigen::Index>(i));
        y.push_back(1);
      } else if (task.negative == kRestOfClasses || labels[i] == task.negative) {
        members.push_back(static_cast<Eigen::Index>(i));
        y.push_back(-1);
      }
    }
    SvmOptions opts = options;
    opts.seed = derive_seed(options.seed, {t});
    model.machines[t] = train_binary(z(members, Eigen::all), y, opts);
  });
  return model;
}

// n x tasks matrix of raw decision values on standardized rows.
inline Matrix decision_values(const MulticlassSvmModel& model, const Matrix& rows) {
  const Matrix z = model.stats.apply(rows);
  Matrix out(rows.rows(), static_cast<Eigen::Index>(model.machines.size()));
  for (std::size_t t = 0; t < model.machines.size(); ++t) {
    out.col(static_cast<Eigen::Index>(t)) = (z * model.machines[t].weights).array() + model.machines[t].bias;
  }
  return out;
}

inline void softmax_row(Eigen::Ref<Vector> row) {
  const double peak = row.maxCoeff();
  row = (row.array() - peak).exp();
  row /= row.sum();
}

// One-vs-all: softmax over per-class decision values. One-vs-one: pairwise vote
// fractions (a zero decision goes to the lower class index).
inline ScoreMatrix predict_scores(const MulticlassSvmModel& model, const Matrix& rows) {
  const Matrix dv = decision_values(model, rows);
  const auto k = static_cast<Eigen::Index>(model.classes);
  ScoreMatrix scores = ScoreMatrix::Zero(rows.rows(), k);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    if (model.coding == Coding::OneVsAll) {
      Vector logits(k);
      if (model.classes == 2) {
        logits << dv(i, 0), -dv(i, 0);
      } else {
        logits = dv.row(i).transpose();
      }
      softmax_row(logits);
      scores.row(i) = logits.transpose();
    } else {
      for (std::size_t t = 0; t < model.tasks.size(); ++t) {
        const auto& task = model.tasks[t];
        const auto winner = dv(i, static_cast<Eigen::Index>(t)) >= 0.0 ? task.positive : task.negative;
        scores(i, static_cast<Eigen::Index>(winner)) += 1.0;
      }
      scores.row(i) /= scores.row(i).sum();
    }
  }
  return scores;
}

}  // namespace deepfeat
