#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "roiprep/error.hpp"
#include "roiprep/saliency.hpp"

using namespace roiprep;

namespace {

SaliencyMap row(std::vector<double> v) {
  const std::size_t n = v.size();
  return SaliencyMap(n, 1, std::move(v));
}

std::vector<double> vec(const SaliencyMap& m) { return {m.values().begin(), m.values().end()}; }

}  // namespace

TEST(SaliencyMap, RejectsBadShapesAndNonFinite) {
  EXPECT_THROW(SaliencyMap(0, 1, {}), DimensionError);
  EXPECT_THROW(SaliencyMap(2, 2, {1, 2, 3}), DimensionError);
  try {
    SaliencyMap(2, 2, {0, 0, std::numeric_limits<double>::quiet_NaN(), 0});
    FAIL() << "expected throw";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("(x=0, y=1)"), std::string::npos) << e.what();
  }
}

TEST(NormalizeMap, AffineRescale) {
  EXPECT_EQ(vec(normalize_map(row({0, 5, 10}))), (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(vec(normalize_map(row({3, 3, 3}))), (std::vector<double>{0, 0, 0}));
}

TEST(NormalizeMap, NegativeMinimumMatchesPerCellOracle) {
  const std::vector<double> in{-1, 0, 3};
  const auto out = vec(normalize_map(row(in)));
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_DOUBLE_EQ(out[i], (in[i] - (-1.0)) / (3.0 - (-1.0)));
  }
  EXPECT_EQ(out, (std::vector<double>{0, 0.25, 1}));
}

TEST(NormalizeMap, IdempotentAndInUnitRange) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(30);
    for (auto& x : v) x = rng.uniform(-5, 5);
    const auto once = normalize_map(row(v));
    EXPECT_EQ(normalize_map(once), once);
    EXPECT_EQ(once.min(), 0.0);
    EXPECT_LE(once.max(), 1.0);
  }
}

TEST(NormalizeJoint, SharesOneRange) {
  const auto [ori, back] = normalize_joint(row({0, 0.9, 0.3}), row({0, 0.7, 0}));
  EXPECT_DOUBLE_EQ(ori.values()[1], 1.0);
  EXPECT_DOUBLE_EQ(back.values()[1], 0.7 / 0.9);
  EXPECT_THROW(normalize_joint(row({0, 1}), row({0})), DimensionError);
}

TEST(S3Combine, ZeroBackgroundReturnsOri) {
  const SaliencyMap ori(2, 2, {0.9, 0.2, 0.5, 0.7});
  const auto zeros = SaliencyMap::filled(2, 2, 0.0);
  for (double delta : {0.0, 0.3, 1.0}) {
    EXPECT_EQ(s3_combine(ori, zeros, {delta, 2.0, true}), ori);
  }
}

TEST(S3Combine, UnitGainIsPlainSubtraction) {
  SplitMix64 rng(3);
  const auto ori = oracle::random_map(rng, 8, 8);
  const auto back = oracle::random_map(rng, 8, 8);
  for (double delta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    EXPECT_EQ(s3_combine(ori, back, {delta, 1.0, false}), subtract_naive(ori, back, false));
  }
}

TEST(S3Combine, WorkedTwoByTwo) {
  const std::vector<double> ori{0.9, 0.2, 0.5, 0.7};
  const std::vector<double> back{0.8, 0.1, 0.3, 0.6};
  const auto expected = oracle::piecewise(ori, back, 0.5, 2.0, false);
  const auto got = vec(s3_combine(SaliencyMap(2, 2, ori), SaliencyMap(2, 2, back), {0.5, 2.0, false}));
  const std::vector<double> hand{0.2, 0.1, 0.2, 0.2};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(got[i], expected[i], 1e-12);
    EXPECT_NEAR(got[i], hand[i], 1e-12);
  }
}

TEST(S3Combine, RejectsBadInputs) {
  const auto a = SaliencyMap::filled(2, 2, 0.5);
  const auto b = SaliencyMap::filled(3, 2, 0.5);
  EXPECT_THROW(s3_combine(a, b, {}), DimensionError);
  EXPECT_THROW(s3_combine(a, a, {-0.1, 2.0, true}), ConfigError);
  EXPECT_THROW(s3_combine(a, a, {1.1, 2.0, true}), ConfigError);
  EXPECT_THROW(s3_combine(a, a, {0.5, 0.0, true}), ConfigError);
}

TEST(S3Combine, Properties) {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t w = rng.between(1, 12), h = rng.between(1, 12);
    const auto ori = oracle::random_map(rng, w, h);
    const auto back = oracle::random_map(rng, w, h);
    const double delta = rng.uniform();
    const double eps = rng.uniform(0.1, 4.0);

    // delta above every background value: second branch unreachable.
    EXPECT_EQ(s3_combine(ori, back, {std::max(delta, back.max()), eps, false}),
              subtract_naive(ori, back, false));

    // Linear in epsilon where the background exceeds delta.
    const auto one = s3_combine(ori, back, {delta, eps, false});
    const auto two = s3_combine(ori, back, {delta, 2 * eps, false});
    for (std::size_t i = 0; i < ori.size(); ++i) {
      if (back.values()[i] > delta) EXPECT_DOUBLE_EQ(two.values()[i], 2 * one.values()[i]);
    }

    const double bound = std::max(1.0, eps);
    EXPECT_GE(one.min(), -bound);
    EXPECT_LE(one.max(), bound);
    const auto clamped = s3_combine(ori, back, {delta, eps, true});
    EXPECT_GE(clamped.min(), 0.0);
    EXPECT_LE(clamped.max(), bound);

    EXPECT_EQ(s3_combine(ori, back, {delta, eps, true}), clamped);
  }
}

TEST(SubtractNaive, Examples) {
  const SaliencyMap m(2, 2, {0.9, 0.2, 0.5, 0.7});
  EXPECT_EQ(subtract_naive(m, m, false), SaliencyMap::filled(2, 2, 0.0));
  EXPECT_EQ(subtract_naive(m, SaliencyMap::filled(2, 2, 0.0), true), m);

  const std::vector<double> back{0.8, 0.1, 0.3, 0.6};
  const auto got = vec(subtract_naive(m, SaliencyMap(2, 2, back), false));
  const std::vector<double> hand{0.1, 0.1, 0.2, 0.1};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(got[i], m.values()[i] - back[i], 1e-15);
    EXPECT_NEAR(got[i], hand[i], 1e-12);
  }
  EXPECT_THROW(subtract_naive(m, SaliencyMap::filled(1, 1, 0), false), DimensionError);
}

TEST(ResizeNearest, UpscalesBlocks) {
  const SaliencyMap m(2, 2, {1, 2, 3, 4});
  const auto big = resize_nearest(m, 4, 4);
  EXPECT_EQ(vec(big), (std::vector<double>{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4}));
  EXPECT_EQ(resize_nearest(m, 2, 2), m);
}

TEST(Smap, OneByOneLayout) {
  const auto bytes = encode_smap(SaliencyMap(1, 1, {0.5}));
  ASSERT_EQ(bytes.size(), 16u + 4u);
  const std::vector<std::uint8_t> expected{'S', 'M', 'A', 'P', 1, 0, 0, 0, 1, 0, 0, 0,
                                           1,   0,   0,   0,   0, 0, 0, 0x3f};
  EXPECT_EQ(bytes, expected);
}

TEST(Smap, RoundTripIsBitExact) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = oracle::random_map(rng, rng.between(1, 40), rng.between(1, 40));
    const auto bytes = encode_smap(m);
    EXPECT_EQ(bytes.size(), kSmapHeaderSize + 4 * m.size());
    const auto back = decode_smap(bytes);
    EXPECT_EQ(back, m);
    EXPECT_EQ(encode_smap(back), bytes);
  }
}

TEST(Smap, DecodeErrors) {
  auto bytes = encode_smap(SaliencyMap(3, 2, {0, 1, 2, 3, 4, 5}));
  auto truncated = bytes;
  truncated.pop_back();
  try {
    decode_smap(truncated);
    FAIL();
  } catch (const FormatError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("expected 40"), std::string::npos) << what;
    EXPECT_NE(what.find("got 39"), std::string::npos) << what;
  }
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_smap(bad_magic), FormatError);
  EXPECT_THROW(decode_smap(std::vector<std::uint8_t>(10, 0)), FormatError);
  auto bad_version = bytes;
  bad_version[4] = 2;
  EXPECT_THROW(decode_smap(bad_version), FormatError);
}

TEST(Smap, TextGridRoundTrip) {
  const SaliencyMap m(3, 2, {0, 0.25, 1, 0.5, 0.125, 0.75});
  EXPECT_EQ(smap_from_text(smap_to_text(m)), m);
  EXPECT_THROW(smap_from_text("1 2\n3\n"), FormatError);
  EXPECT_THROW(smap_from_text(""), FormatError);
}
