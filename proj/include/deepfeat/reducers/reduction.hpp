#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deepfeat/core/error.hpp"
#include "deepfeat/core/matrix.hpp"
#include "deepfeat/reducers/chi2.hpp"
#include "deepfeat/reducers/cooc.hpp"
#include "deepfeat/reducers/dct.hpp"
#include "deepfeat/reducers/global_pooling.hpp"
#include "deepfeat/reducers/layer_selection.hpp"
#include "deepfeat/reducers/lbp.hpp"
#include "deepfeat/reducers/pca.hpp"
#include "deepfeat/tensor/activation_tensor.hpp"

namespace deepfeat {

enum class Method { DCT, GDCT, PCA, CHI, LBP_CHI, COOC, GEP, GMTP, RAW };
enum class Scope { Local, Global };

inline constexpr std::array kAllMethods = {Method::DCT,  Method::GDCT, Method::PCA,  Method::CHI, Method::LBP_CHI,
                                           Method::COOC, Method::GEP,  Method::GMTP, Method::RAW};

// Short labels used in configuration files and result tables.
inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::DCT: return "DC";
    case Method::GDCT: return "g-DC";
    case Method::PCA: return "PC";
    case Method::CHI: return "CHI";
    case Method::LBP_CHI: return "LB";
    case Method::COOC: return "CoOC";
    case Method::GEP: return "GEP";
    case Method::GMTP: return "GMTP";
    case Method::RAW: return "RAW";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (auto m : kAllMethods)
    if (method_name(m) == name) return m;
  return std::nullopt;
}

inline std::string valid_method_list() {
  std::string out;
  for (auto m : kAllMethods) {
    if (!out.empty()) out += ", ";
    out += method_name(m);
  }
  return out;
}

inline std::string_view scope_name(Scope s) { return s == Scope::Local ? "local" : "global"; }

struct ReductionPlan {
  Method method = Method::RAW;
  Scope scope = Scope::Local;
  std::size_t budget = kTotalFeatureBudget;  // total output features; local scope splits it per channel
  bool pca_postprocess = false;
  std::size_t pca_postprocess_keep = 0;  // 0: keep min(dim, n - 1)
  std::size_t chi_bins = kChi2Bins;
  std::size_t cooc_radius = 1;
  double cooc_epsilon = 0.0;

  // Plan with the scope each method implies (g-DC global, pooling methods local).
  static ReductionPlan for_method(Method method, std::optional<Scope> scope = std::nullopt) {
    ReductionPlan plan;
    plan.method = method;
    switch (method) {
      case Method::GDCT:
      case Method::RAW: plan.scope = Scope::Global; break;
      case Method::PCA:
      case Method::CHI: plan.scope = scope.value_or(Scope::Local); break;
      default: plan.scope = Scope::Local; break;
    }
    if (scope && *scope != plan.scope)
      throw ConfigError("method " + std::string(method_name(method)) + " cannot run with " +
                        std::string(scope_name(*scope)) + " scope");
    return plan;
  }

  void validate() const {
    const bool must_be_global = method == Method::GDCT;
    const bool must_be_local = method == Method::DCT || method == Method::LBP_CHI || method == Method::COOC ||
                               method == Method::GEP || method == Method::GMTP;
    if ((must_be_global && scope != Scope::Global) || (must_be_local && scope != Scope::Local))
      throw ConfigError("method " + std::string(method_name(method)) + " cannot run with " +
                        std::string(scope_name(scope)) + " scope");
    if (budget == 0) throw ConfigError("reduction budget must be >= 1");
    if (chi_bins == 0) throw ConfigError("chi-square bin count must be >= 1");
    if (cooc_radius == 0) throw ConfigError("co-occurrence radius must be >= 1");
  }
};

// Learned state for one (layer, method). Immutable after fit; transform is pure.
class FittedReducer {
 public:
  [[nodiscard]] const ReductionPlan& plan() const { return plan_; }
  [[nodiscard]] const TensorShape& shape() const { return shape_; }
  [[nodiscard]] std::size_t output_dim() const { return postprocess_ ? postprocess_->kept() : base_dim_; }
  [[nodiscard]] std::size_t keep_per_channel() const { return keep_per_channel_; }
  [[nodiscard]] const std::vector<PcaModel>& channel_pca() const { return channel_pca_; }
  [[nodiscard]] const std::optional<PcaModel>& global_pca() const { return global_pca_; }
  [[nodiscard]] const std::vector<std::vector<std::size_t>>& channel_selection() const { return channel_selection_; }
  [[nodiscard]] const std::vector<std::size_t>& global_selection() const { return global_selection_; }
  [[nodiscard]] const std::optional<PcaModel>& postprocess() const { return postprocess_; }

  [[nodiscard]] std::vector<double> transform(const ActivationTensor& tensor) const {
    check_shape(tensor);
    auto base = base_features(tensor);
    if (!postprocess_) return base;
    return pca_project(*postprocess_, base);
  }

  [[nodiscard]] Matrix transform(std::span<const ActivationTensor* const> tensors) const {
    Matrix out(static_cast<Eigen::Index>(tensors.size()), static_cast<Eigen::Index>(output_dim()));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const auto row = transform(*tensors[i]);
      out.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size()));
    }
    return out;
  }

  friend FittedReducer fit_reducer(const ReductionPlan&, const TensorShape&, std::span<const ActivationTensor* const>,
                                   std::span<const std::size_t>);
  friend class ReducerCodec;

 private:
  void check_shape(const ActivationTensor& tensor) const {
    if (tensor.shape() != shape_)
      throw ConfigError("reducer fitted for " + shape_.str() + " tensors, got " + tensor.shape().str());
  }

  void build_plans() {
    if (plan_.method == Method::DCT) dct2d_ = std::make_shared<const Dct2d>(shape_.height, shape_.width);
    if (plan_.method == Method::GDCT) dct1d_ = std::make_shared<const Dct1d>(shape_.size());
  }

  [[nodiscard]] std::vector<double> base_features(const ActivationTensor& tensor) const {
    const std::size_t d = shape_.channels;
    std::vector<double> out;
    out.reserve(base_dim_);
    switch (plan_.method) {
      case Method::RAW:
        for (float v : tensor.values()) out.push_back(static_cast<double>(v));
        break;
      case Method::DCT:
        for (std::size_t c = 0; c < d; ++c) {
          const auto coef = dct2d_->forward(tensor.channel_map(c), keep_per_channel_);
          out.insert(out.end(), coef.begin(), coef.end());
        }
        break;
      case Method::GDCT: out = dct1d_->forward(tensor.values(), keep_per_channel_); break;
      case Method::PCA:
        if (plan_.scope == Scope::Global) {
          std::vector<double> flat(tensor.values().begin(), tensor.values().end());
          out = pca_project(*global_pca_, flat);
        } else {
          for (std::size_t c = 0; c < d; ++c) {
            const auto ch = tensor.channel(c);
            const std::vector<double> row(ch.begin(), ch.end());
            const auto proj = pca_project(channel_pca_[c], row);
            out.insert(out.end(), proj.begin(), proj.end());
          }
        }
        break;
      case Method::CHI:
        if (plan_.scope == Scope::Global) {
          for (auto idx : global_selection_) out.push_back(static_cast<double>(tensor.values()[idx]));
        } else {
          for (std::size_t c = 0; c < d; ++c) {
            const auto ch = tensor.channel(c);
            for (auto idx : channel_selection_[c]) out.push_back(static_cast<double>(ch[idx]));
          }
        }
        break;
      case Method::LBP_CHI:
        for (std::size_t c = 0; c < d; ++c) {
          const auto hist = lbp_histogram(tensor.channel_map(c));
          for (auto idx : channel_selection_[c]) out.push_back(hist[idx]);
        }
        break;
      case Method::COOC: out = cooc_channel_values(cooc_tensor(tensor, plan_.cooc_radius, plan_.cooc_epsilon)); break;
      case Method::GEP:
        for (std::size_t c = 0; c < d; ++c) out.push_back(gep_value(tensor.channel(c)));
        break;
      case Method::GMTP: out = gmtp_values(tensor); break;
    }
    return out;
  }

  ReductionPlan plan_;
  TensorShape shape_;
  std::size_t base_dim_ = 0;
  std::size_t keep_per_channel_ = 0;  // DCT: per channel; g-DC: total
  std::vector<PcaModel> channel_pca_;
  std::optional<PcaModel> global_pca_;
  std::vector<std::vector<std::size_t>> channel_selection_;
  std::vector<std::size_t> global_selection_;
  std::optional<PcaModel> postprocess_;
  std::shared_ptr<const Dct2d> dct2d_;
  std::shared_ptr<const Dct1d> dct1d_;
};

namespace detail {

inline Matrix channel_rows(std::span<const ActivationTensor* const> tensors, std::size_t c) {
  const auto map = tensors.front()->shape().map_size();
  Matrix rows(static_cast<Eigen::Index>(tensors.size()), static_cast<Eigen::Index>(map));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto ch = tensors[i]->channel(c);
    for (std::size_t p = 0; p < map; ++p) rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = ch[p];
  }
  return rows;
}

inline Matrix flat_rows(std::span<const ActivationTensor* const> tensors) {
  const auto size = tensors.front()->shape().size();
  Matrix rows(static_cast<Eigen::Index>(tensors.size()), static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto v = tensors[i]->values();
    for (std::size_t p = 0; p < size; ++p) rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = v[p];
  }
  return rows;
}

}  // namespace detail

// Fits on training-fold tensors only. Every tensor must have `shape`.
inline FittedReducer fit_reducer(const ReductionPlan& plan, const TensorShape& shape,
                                 std::span<const ActivationTensor* const> train,
                                 std::span<const std::size_t> train_labels) {
  plan.validate();
  if (train.empty()) throw FitError("no training tensors");
  if (train.size() != train_labels.size()) throw ArgumentError("training tensors and labels differ in length");
  for (const auto* t : train)
    if (t->shape() != shape)
      throw ConfigError("dimension mismatch: layer declared " + shape.str() + ", tensor is " + t->shape().str());

  FittedReducer r;
  r.plan_ = plan;
  r.shape_ = shape;
  const std::size_t d = shape.channels;
  const std::size_t map = shape.map_size();
  const std::size_t per_channel = channel_budget(d, plan.budget);

  switch (plan.method) {
    case Method::RAW: r.base_dim_ = shape.size(); break;
    case Method::DCT:
      r.keep_per_channel_ = std::min(per_channel, map);
      r.base_dim_ = r.keep_per_channel_ * d;
      break;
    case Method::GDCT:
      r.keep_per_channel_ = std::min(plan.budget, shape.size());
      r.base_dim_ = r.keep_per_channel_;
      break;
    case Method::PCA:
      if (plan.scope == Scope::Global) {
        r.global_pca_ = pca_fit(detail::flat_rows(train), plan.budget);
        r.base_dim_ = r.global_pca_->kept();
      } else {
        for (std::size_t c = 0; c < d; ++c) {
          r.channel_pca_.push_back(pca_fit(detail::channel_rows(train, c), std::min(per_channel, map)));
          r.base_dim_ += r.channel_pca_.back().kept();
        }
      }
      break;
    case Method::CHI:
      if (plan.scope == Scope::Global) {
        const auto scores = chi2_scores(detail::flat_rows(train), train_labels, plan.chi_bins);
        r.global_selection_ = chi2_select(scores, plan.budget);
        r.base_dim_ = r.global_selection_.size();
      } else {
        for (std::size_t c = 0; c < d; ++c) {
          const auto scores = chi2_scores(detail::channel_rows(train, c), train_labels, plan.chi_bins);
          r.channel_selection_.push_back(chi2_select(scores, per_channel));
          r.base_dim_ += r.channel_selection_.back().size();
        }
      }
      break;
    case Method::LBP_CHI: {
      if (shape.height < 3 || shape.width < 3)
        throw ConfigError("LB needs channel maps of at least 3x3, layer is " + shape.str());
      for (std::size_t c = 0; c < d; ++c) {
        Matrix hists(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(kUniformLbpBins));
        for (std::size_t i = 0; i < train.size(); ++i) {
          const auto h = lbp_histogram(train[i]->channel_map(c));
          for (std::size_t b = 0; b < kUniformLbpBins; ++b)
            hists(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = h[b];
        }
        r.channel_selection_.push_back(chi2_select(chi2_scores(hists, train_labels, plan.chi_bins), per_channel));
        r.base_dim_ += r.channel_selection_.back().size();
      }
      break;
    }
    case Method::COOC:
    case Method::GEP:
    case Method::GMTP: r.base_dim_ = d; break;
  }
  r.build_plans();

  if (plan.pca_postprocess) {
    Matrix base(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(r.base_dim_));
    for (std::size_t i = 0; i < train.size(); ++i) {
      const auto row = r.base_features(*train[i]);
      base.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size()));
    }
    const std::size_t keep = plan.pca_postprocess_keep == 0 ? r.base_dim_ : plan.pca_postprocess_keep;
    r.postprocess_ = pca_fit(base, keep);
  }
  return r;
}

struct LayerReduction {
  FittedReducer reducer;
  Matrix features;  // one row per tensor in apply_to
};

inline LayerReduction reduce_layer(const ReductionPlan& plan, const TensorShape& shape,
                                   std::span<const ActivationTensor* const> train,
                                   std::span<const std::size_t> train_labels,
                                   std::span<const ActivationTensor* const> apply_to) {
  auto reducer = fit_reducer(plan, shape, train, train_labels);
  auto features = reducer.transform(apply_to);
  return {std::move(reducer), std::move(features)};
}

}  // namespace deepfeat
