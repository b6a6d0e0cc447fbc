#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "deepfeat/core/error.hpp"
#include "deepfeat/svm/multiclass.hpp"

namespace deepfeat {

inline std::string classifier_id(const std::string& layer_id, std::string_view method) {
  return layer_id + ":" + std::string(method);
}

struct PoolEntry {
  std::string id;
  std::string layer_id;
  std::string method;
  ScoreMatrix scores;
};

// Classifiers scored on the same samples and classes, in insertion order.
class ClassifierPool {
 public:
  void add(PoolEntry entry) {
    if (!entries_.empty() &&
        (entry.scores.rows() != entries_.front().scores.rows() || entry.scores.cols() != entries_.front().scores.cols()))
      throw ArgumentError("classifier '" + entry.id + "' has a " + std::to_string(entry.scores.rows()) + "x" +
                          std::to_string(entry.scores.cols()) + " score matrix, pool uses " +
                          std::to_string(samples()) + "x" + std::to_string(classes()));
    if (find(entry.id)) throw ArgumentError("duplicate classifier id '" + entry.id + "'");
    entries_.push_back(std::move(entry));
  }

  [[nodiscard]] const std::vector<PoolEntry>& entries() const { return entries_; }
  [[nodiscard]] const PoolEntry& operator[](std::size_t i) const { return entries_[i]; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] Eigen::Index samples() const { return entries_.empty() ? 0 : entries_.front().scores.rows(); }
  [[nodiscard]] Eigen::Index classes() const { return entries_.empty() ? 0 : entries_.front().scores.cols(); }

  [[nodiscard]] std::optional<std::size_t> find(const std::string& id) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].id == id) return i;
    return std::nullopt;
  }

  [[nodiscard]] std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.id);
    return out;
  }

 private:
  std::vector<PoolEntry> entries_;
};

// Sum of the members' score matrices, divided by the member count when `normalize`.
inline ScoreMatrix sum_rule_indices(const ClassifierPool& pool, std::span<const std::size_t> members,
                                    bool normalize = true) {
  if (members.empty()) throw ArgumentError("sum rule needs a non-empty subset");
  ScoreMatrix fused = ScoreMatrix::Zero(pool.samples(), pool.classes());
  for (auto m : members) {
    if (m >= pool.size()) throw ArgumentError("classifier index out of range");
    fused += pool[m].scores;
  }
  if (normalize) fused /= static_cast<double>(members.size());
  return fused;
}

inline ScoreMatrix sum_rule(const ClassifierPool& pool, std::span<const std::string> subset) {
  if (subset.empty()) throw ArgumentError("sum rule needs a non-empty subset");
  std::vector<std::size_t> members;
  for (const auto& id : subset) {
    const auto idx = pool.find(id);
    if (!idx) throw ArgumentError("unknown classifier id '" + id + "'");
    members.push_back(*idx);
  }
  return sum_rule_indices(pool, members);
}

// Per-row argmax; ties resolve to the lowest class index.
inline std::vector<std::size_t> argmax_predict(const ScoreMatrix& scores) {
  std::vector<std::size_t> out(static_cast<std::size_t>(scores.rows()), 0);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < scores.cols(); ++k)
      if (scores(i, k) > scores(i, best)) best = k;
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
  }
  return out;
}

// Removes every classifier built on one of the last k layers of `layer_order`.
inline ClassifierPool drop_last_layers(const ClassifierPool& pool, std::span<const std::string> layer_order,
                                       std::size_t k = 2) {
  std::set<std::string> in_pool;
  for (const auto& e : pool.entries()) in_pool.insert(e.layer_id);
  if (k >= in_pool.size())
    throw ArgumentError("cannot drop " + std::to_string(k) + " layers from a pool spanning " +
                        std::to_string(in_pool.size()));
  if (k > layer_order.size()) throw ArgumentError("layer order shorter than the drop count");
  const std::set<std::string> dropped(layer_order.end() - static_cast<std::ptrdiff_t>(k), layer_order.end());
  ClassifierPool out;
  for (const auto& e : pool.entries())
    if (!dropped.contains(e.layer_id)) out.add(e);
  return out;
}

}  // namespace deepfeat
