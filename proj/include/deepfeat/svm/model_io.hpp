#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepfeat/core/binary_io.hpp"
#include "deepfeat/svm/multiclass.hpp"

namespace deepfeat {

inline constexpr std::string_view kSvmMagic = "DFSV";
inline constexpr std::uint16_t kSvmVersion = 1;

inline std::vector<char> encode_svm(const MulticlassSvmModel& model) {
  binary::Writer w;
  w.bytes(kSvmMagic);
  w.uint(kSvmVersion);
  w.uint(static_cast<std::uint32_t>(model.classes));
  w.uint(static_cast<std::uint8_t>(model.coding));
  const auto dim = static_cast<std::size_t>(model.dim());
  w.f64_array(std::span<const double>(model.stats.mean.data(), dim));
  w.f64_array(std::span<const double>(model.stats.stddev.data(), dim));
  w.uint(static_cast<std::uint32_t>(model.machines.size()));
  for (std::size_t t = 0; t < model.machines.size(); ++t) {
    const auto& task = model.tasks[t];
    const auto& m = model.machines[t];
    w.uint(static_cast<std::uint64_t>(task.positive));
    w.uint(static_cast<std::uint64_t>(task.negative));
    w.f64_array(std::span<const double>(m.weights.data(), static_cast<std::size_t>(m.weights.size())));
    w.f64(m.bias);
    w.f64(m.c);
    w.uint(static_cast<std::uint64_t>(m.epochs));
    w.f64(m.final_violation);
    w.uint(static_cast<std::uint8_t>(m.converged ? 1 : 0));
  }
  return w.data();
}

inline MulticlassSvmModel decode_svm(std::span<const char> bytes, const std::string& context) {
  binary::Reader r(bytes, context);
  if (r.bytes(4) != kSvmMagic) throw FormatError(context + ": bad magic (expected \"DFSV\")");
  if (const auto v = r.uint<std::uint16_t>(); v != kSvmVersion)
    throw FormatError(context + ": unsupported model version " + std::to_string(v));
  MulticlassSvmModel model;
  model.classes = r.uint<std::uint32_t>();
  const auto coding = r.uint<std::uint8_t>();
  if (coding > 1 || model.classes < 2) throw FormatError(context + ": bad coding or class count");
  model.coding = static_cast<Coding>(coding);
  auto to_vector = [](const std::vector<double>& v) {
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  model.stats.mean = to_vector(r.f64_array());
  model.stats.stddev = to_vector(r.f64_array());
  if (model.stats.mean.size() != model.stats.stddev.size()) throw FormatError(context + ": inconsistent dims");
  const auto n_machines = r.uint<std::uint32_t>();
  for (std::uint32_t t = 0; t < n_machines; ++t) {
    BinaryTask task;
    task.positive = static_cast<std::size_t>(r.uint<std::uint64_t>());
    task.negative = static_cast<std::size_t>(r.uint<std::uint64_t>());
    BinarySvmModel m;
    m.weights = to_vector(r.f64_array());
    if (m.weights.size() != model.stats.mean.size()) throw FormatError(context + ": weight length mismatch");
    m.bias = r.f64();
    m.c = r.f64();
    m.epochs = static_cast<std::size_t>(r.uint<std::uint64_t>());
    m.final_violation = r.f64();
    m.converged = r.uint<std::uint8_t>() != 0;
    model.tasks.push_back(task);
    model.machines.push_back(std::move(m));
  }
  if (model.tasks != coding_tasks(model.classes, model.coding))
    throw FormatError(context + ": binary tasks do not match the coding");
  if (r.remaining() != 0) throw FormatError(context + ": trailing bytes");
  return model;
}

inline void save_svm(const MulticlassSvmModel& model, const std::string& path) {
  binary::write_file_atomic(path, encode_svm(model));
}

inline MulticlassSvmModel load_svm(const std::string& path) {
  const auto bytes = binary::read_file(path);
  return decode_svm(bytes, path);
}

}  // namespace deepfeat
