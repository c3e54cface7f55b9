#include "patternlab/workload.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace patternlab;

namespace {
const std::vector<RequestType> kTwoTypes = {{0, "r1"}, {1, "r2"}};
}

TEST(EnumerateMixes, Granularity5) {
  auto sweep = enumerate_mixes(5, kTwoTypes);
  ASSERT_EQ(sweep.mixes.size(), 6u);
  const double expected[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(sweep.mixes[static_cast<std::size_t>(i)].probability("r1"), expected[i], 1e-12);
    EXPECT_DOUBLE_EQ(sweep.mixes[static_cast<std::size_t>(i)].probability("r1") +
                         sweep.mixes[static_cast<std::size_t>(i)].probability("r2"),
                     1.0);
  }
}

TEST(EnumerateMixes, SmallGranularities) {
  auto g1 = enumerate_mixes(1, kTwoTypes);
  ASSERT_EQ(g1.mixes.size(), 2u);
  EXPECT_DOUBLE_EQ(g1.mixes[0].probability("r1"), 0.0);
  EXPECT_DOUBLE_EQ(g1.mixes[1].probability("r1"), 1.0);

  auto g2 = enumerate_mixes(2, kTwoTypes);
  ASSERT_EQ(g2.mixes.size(), 3u);
  EXPECT_DOUBLE_EQ(g2.mixes[1].probability("r1"), 0.5);
}

TEST(EnumerateMixes, RejectsAnythingButTwoTypes) {
  std::vector<RequestType> three = {{0, "a"}, {1, "b"}, {2, "c"}};
  EXPECT_THROW(enumerate_mixes(5, three), std::invalid_argument);
  EXPECT_THROW(enumerate_mixes(5, {{0, "solo"}}), std::invalid_argument);
  EXPECT_THROW(enumerate_mixes(0, kTwoTypes), std::invalid_argument);
}

TEST(EnumerateMixes, SortedAndDistinct) {
  auto sweep = enumerate_mixes(7, kTwoTypes);
  for (std::size_t i = 1; i < sweep.mixes.size(); ++i)
    EXPECT_LT(sweep.mixes[i - 1].probability("r1"), sweep.mixes[i].probability("r1"));
}

// Reversing the request-type order mirrors the probabilities.
TEST(EnumerateMixes, SymmetricUnderTypeReversal) {
  std::vector<RequestType> reversed = {{0, "r2"}, {1, "r1"}};
  auto forward = enumerate_mixes(5, kTwoTypes);
  auto backward = enumerate_mixes(5, reversed);
  for (std::size_t i = 0; i < forward.mixes.size(); ++i) {
    std::size_t j = forward.mixes.size() - 1 - i;
    EXPECT_NEAR(forward.mixes[i].probability("r1"), backward.mixes[j].probability("r1"), 1e-12);
    EXPECT_NEAR(forward.mixes[i].probability("r2"), backward.mixes[j].probability("r2"), 1e-12);
  }
}

TEST(SampleRequestType, DegenerateMixes) {
  Rng rng(99);
  LoadMix all_r1{{{"r1", 1.0}, {"r2", 0.0}}};
  LoadMix all_r2{{{"r1", 0.0}, {"r2", 1.0}}};
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(sample_request_type(all_r1, kTwoTypes, rng).label, "r1");
    EXPECT_EQ(sample_request_type(all_r2, kTwoTypes, rng).label, "r2");
  }
}

TEST(SampleRequestType, DeterministicGivenSeed) {
  LoadMix mix{{{"r1", 0.3}, {"r2", 0.7}}};
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i)
    EXPECT_EQ(sample_request_type(mix, kTwoTypes, a).id, sample_request_type(mix, kTwoTypes, b).id);
}

TEST(SampleRequestType, LawOfLargeNumbers) {
  LoadMix mix{{{"r1", 0.5}, {"r2", 0.5}}};
  Rng rng(12345);
  const int draws = 100000;
  int r1 = 0;
  for (int i = 0; i < draws; ++i)
    if (sample_request_type(mix, kTwoTypes, rng).id == 0) ++r1;
  EXPECT_NEAR(static_cast<double>(r1) / draws, 0.5, 0.01);
}

// Chi-square goodness of fit at alpha = 0.01 (1 degree of freedom, critical
// value 6.635) for a few biased mixes.
TEST(SampleRequestType, ChiSquareGoodnessOfFit) {
  const int draws = 100000;
  for (double p : {0.2, 0.5, 0.8}) {
    LoadMix mix{{{"r1", p}, {"r2", 1.0 - p}}};
    Rng rng(42);
    int r1 = 0;
    for (int i = 0; i < draws; ++i)
      if (sample_request_type(mix, kTwoTypes, rng).id == 0) ++r1;
    double expected1 = p * draws;
    double expected2 = (1.0 - p) * draws;
    double chi2 = (r1 - expected1) * (r1 - expected1) / expected1 +
                  (draws - r1 - expected2) * (draws - r1 - expected2) / expected2;
    EXPECT_LT(chi2, 6.635) << "p = " << p;
  }
}

TEST(CheckMix, CatchesBrokenMixes) {
  EXPECT_EQ(check_mix(LoadMix{{{"r1", 0.5}, {"r2", 0.5}}}, kTwoTypes), "");
  EXPECT_NE(check_mix(LoadMix{{{"r1", 0.5}}}, kTwoTypes), "");
  EXPECT_NE(check_mix(LoadMix{{{"r1", 0.6}, {"r2", 0.6}}}, kTwoTypes), "");
  EXPECT_NE(check_mix(LoadMix{{{"r1", -0.1}, {"r2", 1.1}}}, kTwoTypes), "");
}
