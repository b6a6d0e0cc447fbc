#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deepfeat/pipeline/commands.hpp"

int main(int argc, char** argv) {
  using namespace deepfeat;
  CLI::App app{"deepfeat: layer-wise activation reduction, SVM ensembles and cross-validated evaluation"};
  app.require_subcommand(1);

  std::string format = "table";
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"table", "json"}));
  std::optional<std::size_t> jobs;
  app.add_option("--jobs", jobs, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check a manifest and every tensor it references");
  std::string manifest;
  validate->add_option("manifest", manifest, "Manifest JSON")->required();

  auto* run = app.add_subcommand("run", "Run cross-validation as described by a config file");
  std::string config;
  run->add_option("config", config, "Pipeline config JSON")->required();
  bool no_models = false;
  run->add_flag("--no-models", no_models, "Do not write fitted reducers and SVMs");

  auto* compare = app.add_subcommand("compare", "Wilcoxon signed-rank test between two results files");
  std::string a, b;
  std::optional<std::string> row, row_a, row_b;
  compare->add_option("a", a, "Results JSON")->required();
  compare->add_option("b", b, "Results JSON")->required();
  compare->add_option("--row", row, "Row compared in both files");
  compare->add_option("--row-a", row_a, "Row taken from the first file");
  compare->add_option("--row-b", row_b, "Row taken from the second file");

  auto* merge = app.add_subcommand("merge", "Combine results files of different data sets");
  std::vector<std::string> inputs;
  std::string output;
  merge->add_option("inputs", inputs, "Results JSON files")->required();
  merge->add_option("-o,--output", output, "Merged results JSON")->required();

  CLI11_PARSE(app, argc, argv);
  const auto fmt = format == "json" ? OutputFormat::Json : OutputFormat::Table;

  if (*validate) return cmd_validate(manifest, std::cout, std::cerr);
  if (*run) return cmd_run(config, RunOptions{fmt, jobs, !no_models}, std::cout, std::cerr);
  if (*compare) {
    CompareOptions opts{fmt, row_a ? row_a : row, row_b ? row_b : row};
    return cmd_compare(a, b, opts, std::cout, std::cerr);
  }
  if (*merge) return cmd_merge(inputs, output, fmt, std::cout, std::cerr);
  return kExitFailure;
}
