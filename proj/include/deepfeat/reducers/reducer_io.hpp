#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepfeat/core/binary_io.hpp"
#include "deepfeat/reducers/reduction.hpp"

namespace deepfeat {

inline constexpr std::string_view kReducerMagic = "DFRD";
inline constexpr std::uint16_t kReducerVersion = 1;

namespace detail {

inline void write_pca(binary::Writer& w, const PcaModel& pca) {
  w.f64_array(std::span<const double>(pca.mean.data(), static_cast<std::size_t>(pca.mean.size())));
  w.uint(static_cast<std::uint64_t>(pca.components.rows()));
  w.uint(static_cast<std::uint64_t>(pca.components.cols()));
  for (Eigen::Index i = 0; i < pca.components.size(); ++i) w.f64(pca.components.data()[i]);
  w.f64_array(std::span<const double>(pca.explained_variance.data(),
                                      static_cast<std::size_t>(pca.explained_variance.size())));
}

inline PcaModel read_pca(binary::Reader& r) {
  PcaModel pca;
  const auto mean = r.f64_array();
  pca.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  const auto rows = r.uint<std::uint64_t>();
  const auto cols = r.uint<std::uint64_t>();
  if (cols != mean.size() || rows > cols || rows * cols * 8 > r.remaining())
    throw FormatError(r.context() + ": inconsistent PCA dimensions");
  pca.components.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < pca.components.size(); ++i) pca.components.data()[i] = r.f64();
  const auto var = r.f64_array();
  if (var.size() != rows) throw FormatError(r.context() + ": inconsistent PCA variance count");
  pca.explained_variance = Eigen::Map<const Vector>(var.data(), static_cast<Eigen::Index>(var.size()));
  return pca;
}

}  // namespace detail

// Versioned binary sidecar for FittedReducer, so fit and apply can run in separate processes.
class ReducerCodec {
 public:
  static std::vector<char> encode(const FittedReducer& r) {
    binary::Writer w;
    w.bytes(kReducerMagic);
    w.uint(kReducerVersion);
    const auto& p = r.plan_;
    w.uint(static_cast<std::uint8_t>(p.method));
    w.uint(static_cast<std::uint8_t>(p.scope));
    w.uint(static_cast<std::uint64_t>(p.budget));
    w.uint(static_cast<std::uint8_t>(p.pca_postprocess ? 1 : 0));
    w.uint(static_cast<std::uint64_t>(p.pca_postprocess_keep));
    w.uint(static_cast<std::uint64_t>(p.chi_bins));
    w.uint(static_cast<std::uint64_t>(p.cooc_radius));
    w.f64(p.cooc_epsilon);
    w.uint(r.shape_.channels);
    w.uint(r.shape_.height);
    w.uint(r.shape_.width);
    w.uint(static_cast<std::uint64_t>(r.base_dim_));
    w.uint(static_cast<std::uint64_t>(r.keep_per_channel_));
    w.uint(static_cast<std::uint64_t>(r.channel_pca_.size()));
    for (const auto& pca : r.channel_pca_) detail::write_pca(w, pca);
    w.uint(static_cast<std::uint8_t>(r.global_pca_ ? 1 : 0));
    if (r.global_pca_) detail::write_pca(w, *r.global_pca_);
    w.uint(static_cast<std::uint64_t>(r.channel_selection_.size()));
    for (const auto& sel : r.channel_selection_) w.index_array(sel);
    w.index_array(r.global_selection_);
    w.uint(static_cast<std::uint8_t>(r.postprocess_ ? 1 : 0));
    if (r.postprocess_) detail::write_pca(w, *r.postprocess_);
    return w.data();
  }

  static FittedReducer decode(std::span<const char> bytes, const std::string& context) {
    binary::Reader rd(bytes, context);
    if (rd.bytes(4) != kReducerMagic) throw FormatError(context + ": bad magic (expected \"DFRD\")");
    if (const auto v = rd.uint<std::uint16_t>(); v != kReducerVersion)
      throw FormatError(context + ": unsupported reducer version " + std::to_string(v));
    FittedReducer r;
    auto& p = r.plan_;
    const auto method = rd.uint<std::uint8_t>();
    const auto scope = rd.uint<std::uint8_t>();
    if (method >= kAllMethods.size() || scope > 1) throw FormatError(context + ": bad method/scope code");
    p.method = static_cast<Method>(method);
    p.scope = static_cast<Scope>(scope);
    p.budget = static_cast<std::size_t>(rd.uint<std::uint64_t>());
    p.pca_postprocess = rd.uint<std::uint8_t>() != 0;
    p.pca_postprocess_keep = static_cast<std::size_t>(rd.uint<std::uint64_t>());
    p.chi_bins = static_cast<std::size_t>(rd.uint<std::uint64_t>());
    p.cooc_radius = static_cast<std::size_t>(rd.uint<std::uint64_t>());
    p.cooc_epsilon = rd.f64();
    r.shape_.channels = rd.uint<std::uint32_t>();
    r.shape_.height = rd.uint<std::uint32_t>();
    r.shape_.width = rd.uint<std::uint32_t>();
    r.base_dim_ = static_cast<std::size_t>(rd.uint<std::uint64_t>());
    r.keep_per_channel_ = static_cast<std::size_t>(rd.uint<std::uint64_t>());
    const auto n_pca = rd.uint<std::uint64_t>();
    if (n_pca > r.shape_.channels) throw FormatError(context + ": too many channel PCA models");
    for (std::uint64_t i = 0; i < n_pca; ++i) r.channel_pca_.push_back(detail::read_pca(rd));
    if (rd.uint<std::uint8_t>() != 0) r.global_pca_ = detail::read_pca(rd);
    const auto n_sel = rd.uint<std::uint64_t>();
    if (n_sel > r.shape_.channels) throw FormatError(context + ": too many channel selections");
    for (std::uint64_t i = 0; i < n_sel; ++i) r.channel_selection_.push_back(rd.index_array());
    r.global_selection_ = rd.index_array();
    if (rd.uint<std::uint8_t>() != 0) r.postprocess_ = detail::read_pca(rd);
    if (rd.remaining() != 0) throw FormatError(context + ": trailing bytes");
    p.validate();
    r.build_plans();
    return r;
  }
};

inline void save_reducer(const FittedReducer& reducer, const std::string& path) {
  binary::write_file_atomic(path, ReducerCodec::encode(reducer));
}

inline FittedReducer load_reducer(const std::string& path) {
  const auto bytes = binary::read_file(path);
  return ReducerCodec::decode(bytes, path);
}

}  // namespace deepfeat
