#include <gtest/gtest.h>

#include "gts/templates.hpp"

using namespace gts;

namespace {

std::vector<BinaryImage> random_stack(int frames, int rows, int cols, Rng& rng) {
  std::vector<BinaryImage> stack;
  for (int i = 0; i < frames; ++i) {
    BinaryImage img(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) img(r, c) = rng.bernoulli(0.5) ? 1 : 0;
    stack.push_back(std::move(img));
  }
  return stack;
}

}  // namespace

TEST(Gei, IdenticalFramesReproduceTheFrame) {
  BinaryImage f(8, 8, 0);
  f(2, 3) = f(5, 5) = 1;
  const std::vector<BinaryImage> frames(5, f);
  const auto t = compute_gei(frames);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) EXPECT_DOUBLE_EQ(t.pixels(r, c), f(r, c));
}

TEST(Gei, SingleDisagreementGivesHalf) {
  BinaryImage a(4, 4, 0), b(4, 4, 0);
  a(1, 1) = 1;
  const std::vector<BinaryImage> frames{a, b};
  const auto t = compute_gei(frames);
  EXPECT_DOUBLE_EQ(t.pixels(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(t.pixels(0, 0), 0.0);
}

TEST(Gei, MatchesPixelwiseMeanOracle) {
  Rng rng(3);
  const auto frames = random_stack(8, 32, 32, rng);
  const auto t = compute_gei(frames);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) {
      double sum = 0;  // independent brute-force mean
      for (const auto& f : frames) sum += f(r, c);
      EXPECT_NEAR(t.pixels(r, c), sum / frames.size(), 1e-9);
    }
}

TEST(Geni, CertainPixelsHaveZeroEntropy) {
  BinaryImage on(4, 4, 1), off(4, 4, 1);
  const std::vector<BinaryImage> frames{on, off};
  const auto t = compute_geni(frames);
  EXPECT_DOUBLE_EQ(t.pixels(0, 0), 0.0);
}

TEST(Geni, HalfOccupancyHasMaximumEntropy) {
  BinaryImage a(4, 4, 1), b(4, 4, 0);
  const std::vector<BinaryImage> frames{a, b};
  const auto t = compute_geni(frames);
  EXPECT_DOUBLE_EQ(t.pixels(2, 2), 1.0);
}

TEST(Geni, MatchesEntropyOracle) {
  Rng rng(5);
  const auto frames = random_stack(8, 32, 32, rng);
  const auto t = compute_geni(frames);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) {
      double sum = 0;
      for (const auto& f : frames) sum += f(r, c);
      const double p = sum / frames.size();
      const double expected =
          (p <= 0 || p >= 1) ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p);
      EXPECT_NEAR(t.pixels(r, c), expected, 1e-9);
    }
}

TEST(Aei, StaticSequenceIsAllZero) {
  BinaryImage f(6, 6, 0);
  f(3, 3) = 1;
  const std::vector<BinaryImage> frames(4, f);
  const auto t = compute_aei(frames);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) EXPECT_DOUBLE_EQ(t.pixels(r, c), 0.0);
}

TEST(Aei, SinglePixelChange) {
  BinaryImage a(4, 4, 0), b = a;
  b(2, 1) = 1;
  const std::vector<BinaryImage> frames{a, b};
  const auto t = compute_aei(frames);
  EXPECT_DOUBLE_EQ(t.pixels(2, 1), 1.0);
  EXPECT_DOUBLE_EQ(t.pixels(0, 0), 0.0);
}

TEST(Aei, MatchesFrameDifferenceOracle) {
  Rng rng(9);
  const auto frames = random_stack(8, 32, 32, rng);
  const auto t = compute_aei(frames);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) {
      double sum = 0;
      for (std::size_t i = 1; i < frames.size(); ++i)
        sum += std::abs(static_cast<int>(frames[i](r, c)) - static_cast<int>(frames[i - 1](r, c)));
      EXPECT_NEAR(t.pixels(r, c), sum / (frames.size() - 1), 1e-9);
    }
}

TEST(Collation, InvariantUnderFrameReversal) {
  Rng rng(17);
  auto frames = random_stack(7, 24, 24, rng);
  auto reversed = frames;
  std::reverse(reversed.begin(), reversed.end());
  for (const TemplateKind kind : {TemplateKind::Gei, TemplateKind::Geni, TemplateKind::Aei}) {
    const auto fwd = collate(kind, frames);
    const auto rev = collate(kind, reversed);
    for (int r = 0; r < 24; ++r)
      for (int c = 0; c < 24; ++c) EXPECT_NEAR(fwd.pixels(r, c), rev.pixels(r, c), 1e-12);
  }
}

TEST(Collation, GeiValuesAreMultiplesOfOneOverN) {
  Rng rng(19);
  const int n = 7;
  const auto frames = random_stack(n, 16, 16, rng);
  const auto t = compute_gei(frames);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) {
      const double scaled = t.pixels(r, c) * n;
      EXPECT_NEAR(scaled, std::round(scaled), 1e-9);
    }
}

TEST(Collation, GeniVanishesWhereGeiSaturates) {
  Rng rng(23);
  const auto frames = random_stack(6, 16, 16, rng);
  const auto gei = compute_gei(frames);
  const auto geni = compute_geni(frames);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c)
      if (gei.pixels(r, c) == 0.0 || gei.pixels(r, c) == 1.0)
        EXPECT_DOUBLE_EQ(geni.pixels(r, c), 0.0);
}

TEST(Collation, RejectsShortOrRaggedSequences) {
  const std::vector<BinaryImage> one(1, BinaryImage(8, 8, 0));
  EXPECT_THROW(compute_gei(one), EmptyInput);
  std::vector<BinaryImage> ragged{BinaryImage(8, 8, 0), BinaryImage(8, 9, 0)};
  EXPECT_THROW(compute_aei(ragged), DimensionMismatch);
}

TEST(Collation, ToGrayRoundsHalfUp) {
  Grid<double> px(1, 3);
  px(0, 0) = 0.0;
  px(0, 1) = 0.5;  // 127.5 -> 128
  px(0, 2) = 1.0;
  const auto g = to_gray(px);
  EXPECT_EQ(g(0, 0), 0);
  EXPECT_EQ(g(0, 1), 128);
  EXPECT_EQ(g(0, 2), 255);
}
