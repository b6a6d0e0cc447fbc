#include <gtest/gtest.h>

#include "deepfeat/reducers/cooc.hpp"
#include "oracles/cooc_oracle.hpp"
#include "unit/test_util.hpp"

using namespace deepfeat;

TEST(Cooc, ConstantTensorIsZero) {
  const ActivationTensor t({3, 4, 4}, std::vector<float>(48, 2.0f));
  for (double v : cooc_tensor(t).values) EXPECT_EQ(v, 0.0);
}

TEST(Cooc, SingleChannelWithZeroEpsilonIsZero) {
  Rng rng(41);
  const auto t = testutil::random_tensor(rng, {1, 5, 5});
  for (double v : cooc_tensor(t, 1, 0.0).values) EXPECT_EQ(v, 0.0);
}

TEST(Cooc, HandCase) {
  // Channel 0 fires at (0,0) only; channel 1 fires at (0,1) and (1,1). Mean = 1.
  const ActivationTensor t({2, 2, 2}, {4, 0, 0, 0, 0, 2, 0, 2});
  const auto c = cooc_tensor(t);
  EXPECT_DOUBLE_EQ(c.at(0, 0, 0), 4.0);  // both channel-1 hits are in the 3x3 window
  EXPECT_DOUBLE_EQ(c.at(1, 0, 1), 4.0);  // channel-0 hit at (0,0)
  EXPECT_DOUBLE_EQ(c.at(1, 1, 1), 4.0);
  EXPECT_DOUBLE_EQ(c.at(0, 1, 1), 0.0);  // below threshold
}

TEST(Cooc, MatchesNestedLoopOracle) {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const TensorShape shape{static_cast<std::uint32_t>(1 + uniform_below(rng, 4)),
                            static_cast<std::uint32_t>(1 + uniform_below(rng, 5)),
                            static_cast<std::uint32_t>(1 + uniform_below(rng, 5))};
    const auto t = testutil::random_tensor(rng, shape);
    const std::size_t radius = 1 + uniform_below(rng, 2);
    const double eps = trial % 2 == 0 ? 0.0 : 0.01;
    const auto lib = cooc_tensor(t, radius, eps);
    const std::vector<float> values(t.values().begin(), t.values().end());
    const auto ref = oracle::cooc(values, shape.channels, shape.height, shape.width, static_cast<long>(radius), eps);
    ASSERT_EQ(lib.values.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(lib.values[i], ref[i], 1e-6) << "trial " << trial;
  }
}

TEST(CoocChannelValues, SpatialSums) {
  CoocTensor zero{{3, 2, 2}, std::vector<double>(12, 0.0)};
  EXPECT_EQ(cooc_channel_values(zero), (std::vector<double>{0, 0, 0}));
  CoocTensor ones{{3, 2, 2}, {1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0}};
  EXPECT_EQ(cooc_channel_values(ones), (std::vector<double>{4, 0, 0}));

  Rng rng(43);
  const auto t = testutil::random_tensor(rng, {4, 5, 3});
  const auto c = cooc_tensor(t);
  const auto sums = cooc_channel_values(c);
  for (std::size_t k = 0; k < 4; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 3; ++j) s += c.at(k, i, j);
    EXPECT_NEAR(sums[k], s, 1e-6);
  }
}
