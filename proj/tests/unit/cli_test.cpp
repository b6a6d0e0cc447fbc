#include <sys/wait.h>

#include <array>
#include <cstring>
#include <limits>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "deepfeat/tensor/tensor_file.hpp"
#include "oracles/wilcoxon_oracle.hpp"
#include "test_paths.hpp"
#include "unit/test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string(DEEPFEAT_CLI) + " " + args + " 2>&1";
  Outcome out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.output.append(buf.data(), got);
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_json(const fs::path& p, const json& doc) { std::ofstream(p) << doc.dump(2) << "\n"; }

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Copy of the synthetic data set that tests may edit.
fs::path synthetic_copy(const testutil::TempDir& dir) {
  const auto dst = dir.path() / "synthetic";
  fs::copy(fs::path(DEEPFEAT_TEST_DATA) / "synthetic", dst, fs::copy_options::recursive);
  fs::remove_all(dst / "results");
  return dst;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::vector<std::string>& methods,
                      const std::vector<std::string>& rows, const fs::path& manifest, const std::string& output) {
  json doc = {{"dataset_id", "synthetic"},
              {"manifest", manifest.string()},
              {"output_dir", output},
              {"reduction", {{"threshold", 0}, {"raw_tail_layers", 0}, {"budget", 64}}},
              {"methods", methods},
              {"rows", rows},
              {"cv", {{"folds", 5}, {"seed", 1}}}};
  write_json(dir / name, doc);
  return dir / name;
}

// Results document with one run per data set; `row` gets the given mean accuracy.
json results_with(const std::vector<std::pair<std::string, double>>& means, const std::string& row = "DC") {
  json runs = json::array();
  for (const auto& [ds, acc] : means)
    runs.push_back({{"dataset", ds},
                    {"folds", 1},
                    {"samples", 10},
                    {"classes", {"a", "b"}},
                    {"layers", {"l1"}},
                    {"rows", {{{"id", row}, {"fold_accuracies", {acc}}, {"mean_accuracy", acc}}}},
                    {"classifiers", json::array()},
                    {"selections", json::array()}});
  return {{"format", "deepfeat-results"}, {"version", 1}, {"runs", runs}};
}

}  // namespace

TEST(CliValidate, WellFormedManifest) {
  const auto r = cli("validate " + quote(fs::path(DEEPFEAT_TEST_DATA) / "synthetic" / "manifest.json"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "ok: 60 samples, 3 layers, 180 tensors")) << r.output;
}

TEST(CliValidate, MissingTensorFileNamesThePath) {
  testutil::TempDir dir;
  const auto root = synthetic_copy(dir);
  fs::remove(root / "tensors" / "s007_conv4.actv");
  const auto r = cli("validate " + quote(root / "manifest.json"));
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(contains(r.output, "s007_conv4.actv")) << r.output;
}

TEST(CliValidate, DimsMismatchNamesLayerAndSample) {
  testutil::TempDir dir;
  const auto root = synthetic_copy(dir);
  deepfeat::write_tensor(deepfeat::ActivationTensor({12, 2, 8}, std::vector<float>(192, 0.5f)),
                         (root / "tensors" / "s012_conv4.actv").string());
  const auto r = cli("validate " + quote(root / "manifest.json"));
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(contains(r.output, "conv4")) << r.output;
  EXPECT_TRUE(contains(r.output, "s012")) << r.output;
}

TEST(CliValidate, NonFiniteValueIsReported) {
  testutil::TempDir dir;
  const auto root = synthetic_copy(dir);
  auto bytes = slurp(root / "tensors" / "s003_fc5.actv");
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + 19 + 4 * 5, &nan, 4);
  std::ofstream(root / "tensors" / "s003_fc5.actv", std::ios::binary) << bytes;
  const auto r = cli("validate " + quote(root / "manifest.json"));
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(contains(r.output, "s003_fc5.actv")) << r.output;
  EXPECT_TRUE(contains(r.output, "element offset 5")) << r.output;
}

TEST(CliRun, TwoRunsGiveByteIdenticalJson) {
  testutil::TempDir dir;
  const auto manifest = fs::path(DEEPFEAT_TEST_DATA) / "synthetic" / "manifest.json";
  const auto a = write_config(dir.path(), "a.json", {"DC", "PC", "GMTP"}, {"DC", "PC", "GMTP", "DC+GMTP", "SFFS(3)"},
                              manifest, "out_a");
  const auto b = write_config(dir.path(), "b.json", {"DC", "PC", "GMTP"}, {"DC", "PC", "GMTP", "DC+GMTP", "SFFS(3)"},
                              manifest, "out_b");
  const auto ra = cli("--format json run " + quote(a));
  const auto rb = cli("--format json run " + quote(b));
  ASSERT_EQ(ra.code, 0) << ra.output;
  ASSERT_EQ(rb.code, 0) << rb.output;
  EXPECT_EQ(ra.output, rb.output);
  const auto ja = slurp(dir.path() / "out_a" / "results.json");
  EXPECT_FALSE(ja.empty());
  EXPECT_EQ(ja, slurp(dir.path() / "out_b" / "results.json"));
  EXPECT_EQ(slurp(dir.path() / "out_a" / "results.txt"), slurp(dir.path() / "out_b" / "results.txt"));
  EXPECT_TRUE(fs::exists(dir.path() / "out_a" / "models" / "fold_0" / "conv3_DC.reducer"));
  EXPECT_TRUE(fs::exists(dir.path() / "out_a" / "models" / "fold_4" / "fc5_GMTP.svm"));
}

TEST(CliRun, TableHasExactlyTheConfiguredRows) {
  testutil::TempDir dir;
  const auto cfg = write_config(dir.path(), "c.json", {"DC", "GMTP"}, {"DC", "GMTP", "DC+GMTP"},
                                fs::path(DEEPFEAT_TEST_DATA) / "synthetic" / "manifest.json", "out");
  const auto r = cli("run --no-models " + quote(cfg));
  ASSERT_EQ(r.code, 0) << r.output;
  std::istringstream lines(slurp(dir.path() / "out" / "results.txt"));
  std::vector<std::vector<std::string>> table;
  for (std::string line; std::getline(lines, line);) {
    std::istringstream words(line);
    std::vector<std::string> cells;
    for (std::string w; words >> w;) cells.push_back(w);
    if (!cells.empty()) table.push_back(cells);
  }
  ASSERT_EQ(table.size(), 4u);
  EXPECT_EQ(table[0], (std::vector<std::string>{"Method", "F1", "F2", "F3", "F4", "F5", "Avg"}));
  EXPECT_EQ(table[1][0], "DC");
  EXPECT_EQ(table[2][0], "GMTP");
  EXPECT_EQ(table[3][0], "DC+GMTP");
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(table[i].size(), 7u);
  EXPECT_EQ(slurp(dir.path() / "out" / "results.txt"), r.output);
  EXPECT_FALSE(fs::exists(dir.path() / "out" / "models"));
}

TEST(CliRun, UnknownMethodFailsBeforeTraining) {
  testutil::TempDir dir;
  const auto cfg = write_config(dir.path(), "bad.json", {"DC", "FOO"}, {"DC"},
                                fs::path(DEEPFEAT_TEST_DATA) / "synthetic" / "manifest.json", "out");
  const auto r = cli("run " + quote(cfg));
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(contains(r.output, "FOO")) << r.output;
  for (const char* m : {"DC", "g-DC", "PC", "CHI", "LB", "CoOC", "GEP", "GMTP", "RAW"})
    EXPECT_TRUE(contains(r.output, m)) << m << " missing from: " << r.output;
  EXPECT_FALSE(fs::exists(dir.path() / "out"));
}

TEST(CliRun, MissingConfigIsAnError) {
  const auto r = cli("run /nonexistent/config.json");
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(contains(r.output, "/nonexistent/config.json")) << r.output;
}

TEST(CliCompare, FileAgainstItself) {
  testutil::TempDir dir;
  write_json(dir.path() / "r.json", results_with({{"d1", 0.8}, {"d2", 0.6}, {"d3", 0.9}}));
  const auto r = cli("--format json compare " + quote(dir.path() / "r.json") + " " + quote(dir.path() / "r.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto doc = json::parse(r.output);
  EXPECT_EQ(doc.at("p_value").get<double>(), 1.0);
  EXPECT_EQ(doc.at("w").get<double>(), 0.0);
}

TEST(CliCompare, FiveDataSetsAllInFavour) {
  testutil::TempDir dir;
  std::vector<std::pair<std::string, double>> ones, zeros;
  for (int i = 1; i <= 5; ++i) {
    ones.emplace_back("d" + std::to_string(i), 1.0);
    zeros.emplace_back("d" + std::to_string(i), 0.0);
  }
  write_json(dir.path() / "a.json", results_with(ones));
  write_json(dir.path() / "b.json", results_with(zeros));
  const auto ref = oracle::wilcoxon_enumerate(std::vector<double>(5, 1.0), std::vector<double>(5, 0.0));
  const auto r = cli("--format json compare " + quote(dir.path() / "a.json") + " " + quote(dir.path() / "b.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto doc = json::parse(r.output);
  EXPECT_DOUBLE_EQ(doc.at("p_value").get<double>(), ref.p);
  EXPECT_DOUBLE_EQ(doc.at("p_value").get<double>(), 0.0625);
  EXPECT_EQ(doc.at("n_effective").get<int>(), 5);
  EXPECT_EQ(doc.at("method").get<std::string>(), "exact");

  const auto table = cli("compare " + quote(dir.path() / "a.json") + " " + quote(dir.path() / "b.json"));
  EXPECT_TRUE(contains(table.output, "p = 0.0625")) << table.output;
}

TEST(CliCompare, DisjointIdsListBothSets) {
  testutil::TempDir dir;
  write_json(dir.path() / "a.json", results_with({{"alpha", 0.8}, {"beta", 0.7}}));
  write_json(dir.path() / "b.json", results_with({{"gamma", 0.8}, {"delta", 0.7}}));
  const auto r = cli("compare " + quote(dir.path() / "a.json") + " " + quote(dir.path() / "b.json"));
  EXPECT_NE(r.code, 0);
  for (const char* id : {"alpha", "beta", "gamma", "delta"}) EXPECT_TRUE(contains(r.output, id)) << r.output;
}

TEST(CliMerge, CombinesRunsAndRejectsDuplicates) {
  testutil::TempDir dir;
  write_json(dir.path() / "a.json", results_with({{"d1", 0.8}}));
  write_json(dir.path() / "b.json", results_with({{"d2", 0.6}}));
  const auto ok = cli("merge " + quote(dir.path() / "a.json") + " " + quote(dir.path() / "b.json") + " -o " +
                      quote(dir.path() / "m.json"));
  ASSERT_EQ(ok.code, 0) << ok.output;
  const auto merged = json::parse(slurp(dir.path() / "m.json"));
  EXPECT_EQ(merged.at("runs").size(), 2u);
  EXPECT_TRUE(contains(ok.output, "d1"));
  EXPECT_TRUE(contains(ok.output, "d2"));
  const auto dup = cli("merge " + quote(dir.path() / "a.json") + " " + quote(dir.path() / "a.json") + " -o " +
                       quote(dir.path() / "n.json"));
  EXPECT_NE(dup.code, 0);
  EXPECT_TRUE(contains(dup.output, "d1")) << dup.output;
}
