#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "deepfeat/tensor/manifest.hpp"
#include "deepfeat/tensor/tensor_file.hpp"
#include "unit/test_util.hpp"

using namespace deepfeat;

namespace {

std::vector<unsigned char> file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST(TensorFile, SmallestTensorLayout) {
  testutil::TempDir dir;
  write_tensor(ActivationTensor({1, 1, 1}, {0.0f}), dir.file("t.actv"));
  const std::vector<unsigned char> expected = {'A', 'C', 'T', 'V', 0x01, 0x00, 0x01, 0x01, 0x00, 0x00, 0x00, 0x01, 0x00,
                                               0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00};
  // 4 magic + 2 version + 1 dtype + 3 x 4 dims = 19 header bytes, then one float.
  EXPECT_EQ(file_bytes(dir.file("t.actv")), expected);
  EXPECT_EQ(kTensorHeaderBytes, 19u);
}

TEST(TensorFile, SizeIsHeaderPlusPayload) {
  testutil::TempDir dir;
  write_tensor(ActivationTensor({2, 2, 2}, std::vector<float>(8, 1.5f)), dir.file("t.actv"));
  EXPECT_EQ(std::filesystem::file_size(dir.file("t.actv")), 19u + 32u);
}

TEST(TensorFile, PayloadIsLittleEndianChannelMajor) {
  testutil::TempDir dir;
  write_tensor(ActivationTensor({2, 1, 2}, {1.0f, 2.0f, 3.0f, -0.5f}), dir.file("t.actv"));
  const auto bytes = file_bytes(dir.file("t.actv"));
  ASSERT_EQ(bytes.size(), 19u + 16u);
  const float expected[4] = {1.0f, 2.0f, 3.0f, -0.5f};
  for (int i = 0; i < 4; ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(expected[i]);
    for (int b = 0; b < 4; ++b) EXPECT_EQ(bytes[19 + 4 * i + b], (bits >> (8 * b)) & 0xFF);
  }
}

TEST(TensorFile, ReadsTheSmallestFile) {
  testutil::TempDir dir;
  write_bytes(dir.file("t.actv"), {'A', 'C', 'T', 'V', 1, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0});
  const auto t = read_tensor(dir.file("t.actv"));
  EXPECT_EQ(t.shape(), (TensorShape{1, 1, 1}));
  EXPECT_EQ(t.values()[0], 0.0f);
}

TEST(TensorFile, RoundTripIsBitExact) {
  testutil::TempDir dir;
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const TensorShape shape{static_cast<std::uint32_t>(1 + uniform_below(rng, 64)),
                            static_cast<std::uint32_t>(1 + uniform_below(rng, 32)),
                            static_cast<std::uint32_t>(1 + uniform_below(rng, 32))};
    auto values = testutil::random_floats(rng, shape.size(), 1e3);
    values[0] = -0.0f;
    values[values.size() - 1] = std::numeric_limits<float>::denorm_min();
    const ActivationTensor t(shape, values);
    write_tensor(t, dir.file("t.actv"));
    const auto back = read_tensor(dir.file("t.actv"));
    ASSERT_EQ(back.shape(), shape);
    ASSERT_EQ(std::memcmp(back.values().data(), t.values().data(), shape.size() * sizeof(float)), 0);
  }
}

TEST(TensorFile, BadMagicIsFormatError) {
  testutil::TempDir dir;
  write_bytes(dir.file("t.actv"), {'X', 'X', 'X', 'X', 1, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_THROW(read_tensor(dir.file("t.actv")), FormatError);
}

TEST(TensorFile, BadVersionAndDtypeAreFormatErrors) {
  testutil::TempDir dir;
  write_bytes(dir.file("v.actv"), {'A', 'C', 'T', 'V', 2, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_THROW(read_tensor(dir.file("v.actv")), FormatError);
  write_bytes(dir.file("d.actv"), {'A', 'C', 'T', 'V', 1, 0, 2, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_THROW(read_tensor(dir.file("d.actv")), FormatError);
}

TEST(TensorFile, NanPayloadIsValidationErrorNamingOffset) {
  testutil::TempDir dir;
  write_tensor(ActivationTensor({1, 1, 3}, {1.0f, 2.0f, 3.0f}), dir.file("t.actv"));
  auto bytes = file_bytes(dir.file("t.actv"));
  const auto nan_bits = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
  for (int b = 0; b < 4; ++b) bytes[19 + 4 + b] = (nan_bits >> (8 * b)) & 0xFF;
  write_bytes(dir.file("t.actv"), bytes);
  try {
    (void)read_tensor(dir.file("t.actv"));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("element offset 1"), std::string::npos) << e.what();
  }
}

TEST(TensorFile, InfinityRejectedOnConstruction) {
  EXPECT_THROW(ActivationTensor({1, 1, 1}, {std::numeric_limits<float>::infinity()}), ValidationError);
}

TEST(TensorFile, TruncatedAndTrailingBytesAreLengthErrors) {
  testutil::TempDir dir;
  write_tensor(ActivationTensor({1, 2, 2}, {1, 2, 3, 4}), dir.file("t.actv"));
  auto bytes = file_bytes(dir.file("t.actv"));
  auto truncated = bytes;
  truncated.pop_back();
  write_bytes(dir.file("short.actv"), truncated);
  EXPECT_THROW(read_tensor(dir.file("short.actv")), LengthError);
  write_bytes(dir.file("header.actv"), std::vector<unsigned char>(bytes.begin(), bytes.begin() + 10));
  EXPECT_THROW(read_tensor(dir.file("header.actv")), LengthError);
  bytes.push_back(0);
  write_bytes(dir.file("long.actv"), bytes);
  EXPECT_THROW(read_tensor(dir.file("long.actv")), LengthError);
}

TEST(TensorFile, MissingFileIsIoErrorWithPath) {
  try {
    (void)read_tensor("/nonexistent/dir/x.actv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/x.actv"), std::string::npos);
  }
}

TEST(TensorFile, UnwritableDestinationIsIoError) {
  EXPECT_THROW(write_tensor(ActivationTensor({1, 1, 1}, {0.0f}), "/nonexistent/dir/x.actv"), IoError);
}

TEST(ActivationTensorTest, RejectsWrongLengthAndZeroDims) {
  EXPECT_THROW(ActivationTensor({2, 2, 2}, std::vector<float>(7)), ValidationError);
  EXPECT_THROW(ActivationTensor({0, 2, 2}, {}), ValidationError);
}

TEST(Flatten, ChannelMajorConcatenation) {
  const ActivationTensor t({2, 1, 2}, {1, 2, 3, 4});
  EXPECT_EQ(flatten(t), (std::vector<float>{1, 2, 3, 4}));
  EXPECT_EQ(t.at(1, 0, 0), 3.0f);
}

TEST(Flatten, SingleChannelIsRowMajorMap) {
  const ActivationTensor t({1, 2, 3}, {1, 2, 3, 4, 5, 6});
  const auto map = t.channel_map(0);
  std::vector<float> row_major;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) row_major.push_back(map(i, j));
  EXPECT_EQ(flatten(t), row_major);
}

TEST(Flatten, ReshapeRoundTrip) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const TensorShape shape{static_cast<std::uint32_t>(1 + uniform_below(rng, 6)),
                            static_cast<std::uint32_t>(1 + uniform_below(rng, 6)),
                            static_cast<std::uint32_t>(1 + uniform_below(rng, 6))};
    const auto t = testutil::random_tensor(rng, shape);
    const auto flat = flatten(t);
    const auto back = reshape(flat, shape);
    ASSERT_EQ(flatten(back), flat);
    for (std::uint32_t c = 0; c < shape.channels; ++c)
      ASSERT_EQ(flat[c * shape.map_size()], t.at(c, 0, 0));
  }
}

namespace {

nlohmann::json small_manifest() {
  return nlohmann::json::parse(R"({
    "classes": ["a", "b"],
    "layers": [{"id": "l1", "d": 1, "m": 1, "n": 2}],
    "samples": [
      {"id": "s0", "label": 0, "tensors": {"l1": "s0.actv"}},
      {"id": "s1", "label": 0, "tensors": {"l1": "s1.actv"}},
      {"id": "s2", "label": 1, "tensors": {"l1": "s2.actv"}},
      {"id": "s3", "label": 1, "tensors": {"l1": "s3.actv"}}
    ]})");
}

}  // namespace

TEST(Manifest, ParsesAndResolvesRelativePaths) {
  testutil::TempDir dir;
  const auto m = parse_manifest(small_manifest(), dir.path());
  EXPECT_EQ(m.classes.size(), 2u);
  EXPECT_EQ(m.layers[0].shape, (TensorShape{1, 1, 2}));
  EXPECT_EQ(m.layers[0].index, 1u);
  EXPECT_EQ(m.tensor_path(m.samples[2], "l1"), dir.path() / "s2.actv");
  EXPECT_TRUE(check_manifest(m).empty());
}

TEST(Manifest, LoadsDatasetAndChecksDims) {
  testutil::TempDir dir;
  for (int s = 0; s < 4; ++s)
    write_tensor(ActivationTensor({1, 1, 2}, {float(s), 1.0f}), dir.file("s" + std::to_string(s) + ".actv"));
  const auto data = load_dataset(parse_manifest(small_manifest(), dir.path()));
  EXPECT_EQ(data.size(), 4u);
  EXPECT_EQ(data.labels, (std::vector<std::size_t>{0, 0, 1, 1}));
  EXPECT_EQ(data.tensors[0][3].values()[0], 3.0f);

  write_tensor(ActivationTensor({1, 2, 1}, {0.0f, 1.0f}), dir.file("s1.actv"));
  try {
    (void)load_dataset(parse_manifest(small_manifest(), dir.path()));
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'s1'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'l1'"), std::string::npos) << msg;
  }
}

TEST(Manifest, ReportsStructuralProblems) {
  auto doc = small_manifest();
  doc["samples"][3]["label"] = 0;                   // class b left with one sample
  doc["samples"][2]["tensors"] = nlohmann::json::object();  // missing layer
  doc["samples"][1]["id"] = "s0";                    // duplicate id
  const auto issues = check_manifest(parse_manifest(doc, "."));
  ASSERT_EQ(issues.size(), 3u);
  std::string all;
  for (const auto& i : issues) all += i + "\n";
  EXPECT_NE(all.find("duplicate sample id"), std::string::npos);
  EXPECT_NE(all.find("no tensor for layer"), std::string::npos);
  EXPECT_NE(all.find("class 'b' has 1 samples"), std::string::npos);
}

TEST(Manifest, MissingKeyIsFormatError) {
  auto doc = small_manifest();
  doc.erase("layers");
  EXPECT_THROW(parse_manifest(doc, "."), FormatError);
}

TEST(Manifest, JsonRoundTrip) {
  const auto m = parse_manifest(small_manifest(), ".");
  const auto again = parse_manifest(manifest_to_json(m), ".");
  EXPECT_EQ(manifest_to_json(again), manifest_to_json(m));
}
