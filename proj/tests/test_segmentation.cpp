#include <gtest/gtest.h>

#include <sstream>

#include "gts/segmentation.hpp"

using namespace gts;

namespace {

Chromosome chromosome_with_fields(int d_h, int d_m, int d_f, bool w_h, bool w_l, bool w_r, bool w_f) {
  Chromosome c;
  for (int i = 0; i < 8; ++i) {
    c.bits[i] = (d_h >> (7 - i)) & 1;
    c.bits[8 + i] = (d_m >> (7 - i)) & 1;
    c.bits[16 + i] = (d_f >> (7 - i)) & 1;
  }
  c.bits[24] = w_h;
  c.bits[25] = w_l;
  c.bits[26] = w_r;
  c.bits[27] = w_f;
  return c;
}

GtsHypothesis hypothesis(int s_h, int s_m, int s_f, bool w_h, bool w_l, bool w_r, bool w_f) {
  GtsHypothesis h;
  h.s_h = s_h;
  h.s_m = s_m;
  h.s_f = s_f;
  h.w_h = w_h;
  h.w_l = w_l;
  h.w_r = w_r;
  h.w_f = w_f;
  return h;
}

// Independent region-membership oracle for mask pixels.
bool oracle_mask_pixel(const GtsHypothesis& h, int r, int c) {
  if (r < h.s_h) return h.w_h;
  if (r >= h.s_f) return h.w_f;
  return c < h.s_m ? h.w_l : h.w_r;
}

}  // namespace

TEST(Decode, EndpointsHitBounds) {
  const SplitBounds bounds;
  const auto zero = decode(chromosome_with_fields(0, 0, 0, 1, 1, 1, 1), bounds);
  EXPECT_EQ(zero.s_h, bounds.head_min);
  EXPECT_EQ(zero.s_m, bounds.mid_min);
  EXPECT_EQ(zero.s_f, bounds.leg_min);
  const auto full = decode(chromosome_with_fields(255, 255, 255, 1, 1, 1, 1), bounds);
  EXPECT_EQ(full.s_h, bounds.head_max);
  EXPECT_EQ(full.s_m, bounds.mid_max);
  EXPECT_EQ(full.s_f, bounds.leg_max);
}

TEST(Decode, MidpointRoundsToNearest) {
  // 239 * 128 / 255 = 119.97 -> 120
  EXPECT_EQ(decode_split(128, 0, 239), 120);
}

TEST(Decode, WeightBitsCopiedVerbatim) {
  const auto h = decode(chromosome_with_fields(10, 20, 30, 1, 0, 0, 1), SplitBounds{});
  EXPECT_TRUE(h.w_h);
  EXPECT_FALSE(h.w_l);
  EXPECT_FALSE(h.w_r);
  EXPECT_TRUE(h.w_f);
}

TEST(Decode, MonotoneInFieldValue) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int lo = rng.uniform_int(0, 238);
    const int hi = rng.uniform_int(lo + 1, 239);
    const int d1 = rng.uniform_int(0, 255);
    const int d2 = rng.uniform_int(d1, 255);
    EXPECT_LE(decode_split(d1, lo, hi), decode_split(d2, lo, hi));
  }
}

TEST(Decode, HeadBoundaryAlwaysBelowLegBoundary) {
  Rng rng(33);
  const SplitBounds bounds;
  for (int trial = 0; trial < 100; ++trial) {
    const auto h = decode(Chromosome::random(rng), bounds);
    EXPECT_LT(h.s_h, h.s_f);
    EXPECT_GE(h.s_h, 0);
    EXPECT_LE(h.s_f, kCanvas);
  }
}

TEST(Mask, FullInclusionIsAllOnes) {
  const auto m = build_mask(hypothesis(60, 120, 180, 1, 1, 1, 1));
  EXPECT_DOUBLE_EQ(mask_area_fraction(m), 1.0);
}

TEST(Mask, FullExclusionIsAllZeros) {
  const auto m = build_mask(hypothesis(60, 120, 180, 0, 0, 0, 0));
  EXPECT_DOUBLE_EQ(mask_area_fraction(m), 0.0);
}

TEST(Mask, HeadAndLegsOnlyLayout) {
  const auto m = build_mask(hypothesis(60, 120, 180, 1, 0, 0, 1));
  for (int r = 0; r < kCanvas; ++r)
    for (int c = 0; c < kCanvas; ++c)
      EXPECT_EQ(m(r, c), (r < 60 || r >= 180) ? 1 : 0) << "at " << r << "," << c;
}

TEST(Mask, MatchesRegionMembershipOracle) {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = decode(Chromosome::random(rng), SplitBounds{});
    const auto m = build_mask(h);
    for (int r = 0; r < kCanvas; ++r)
      for (int c = 0; c < kCanvas; ++c)
        ASSERT_EQ(m(r, c), oracle_mask_pixel(h, r, c) ? 1 : 0);
  }
}

// The four regions partition the canvas exactly.
TEST(Mask, RegionsPartitionTheCanvas) {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = decode(Chromosome::random(rng), SplitBounds{});
    const std::size_t head = static_cast<std::size_t>(h.s_h) * kCanvas;
    const std::size_t legs = static_cast<std::size_t>(kCanvas - h.s_f) * kCanvas;
    const std::size_t left = static_cast<std::size_t>(h.s_f - h.s_h) * h.s_m;
    const std::size_t right = static_cast<std::size_t>(h.s_f - h.s_h) * (kCanvas - h.s_m);
    EXPECT_EQ(head + legs + left + right, static_cast<std::size_t>(kCanvasArea));
  }
}

TEST(Mask, IndependentOfMidSplitWhenMidsectionsExcluded) {
  for (int s_m : {0, 48, 120, 192, 239}) {
    const auto m = build_mask(hypothesis(60, s_m, 180, 1, 0, 0, 1));
    EXPECT_EQ(m, build_mask(hypothesis(60, 0, 180, 1, 0, 0, 1)));
  }
}

TEST(ApplyMask, IdentityAndAnnihilation) {
  GaitTemplate t;
  t.pixels = Grid<double>(kCanvas, kCanvas, 0.25);
  const auto ones = build_mask(hypothesis(60, 120, 180, 1, 1, 1, 1));
  const auto zeros = build_mask(hypothesis(60, 120, 180, 0, 0, 0, 0));
  EXPECT_EQ(apply_mask(t, ones).pixels, t.pixels);
  const auto dark = apply_mask(t, zeros);
  for (int r = 0; r < kCanvas; ++r)
    for (int c = 0; c < kCanvas; ++c) ASSERT_EQ(dark.pixels(r, c), 0.0);
}

TEST(ApplyMask, MatchesPixelwiseProductOracle) {
  Rng rng(47);
  GaitTemplate t;
  t.pixels = Grid<double>(kCanvas, kCanvas);
  for (int r = 0; r < kCanvas; ++r)
    for (int c = 0; c < kCanvas; ++c) t.pixels(r, c) = rng.real01();
  const auto h = decode(Chromosome::random(rng), SplitBounds{});
  const auto m = build_mask(h);
  const auto masked = apply_mask(t, m);
  for (int r = 0; r < kCanvas; ++r)
    for (int c = 0; c < kCanvas; ++c) ASSERT_EQ(masked.pixels(r, c), t.pixels(r, c) * m(r, c));
}

TEST(ApplyMask, IdempotentInTheMask) {
  Rng rng(53);
  GaitTemplate t;
  t.pixels = Grid<double>(kCanvas, kCanvas);
  for (int r = 0; r < kCanvas; ++r)
    for (int c = 0; c < kCanvas; ++c) t.pixels(r, c) = rng.real01();
  const auto m = build_mask(decode(Chromosome::random(rng), SplitBounds{}));
  const auto once = apply_mask(t, m);
  EXPECT_EQ(apply_mask(once, m).pixels, once.pixels);
}

TEST(ApplyMask, RejectsShapeMismatch) {
  GaitTemplate t;
  t.pixels = Grid<double>(10, 10, 0.5);
  EXPECT_THROW(apply_mask(t, RegionMask(kCanvas, kCanvas, 1)), DimensionMismatch);
}

TEST(MaskArea, SingleRowFraction) {
  RegionMask m(kCanvas, kCanvas, 0);
  for (int c = 0; c < kCanvas; ++c) m(100, c) = 1;
  EXPECT_NEAR(mask_area_fraction(m), 240.0 / 57600.0, 1e-12);
}

TEST(HypothesisRecord, LineRoundTrip) {
  const auto h = hypothesis(34, 120, 150, 1, 0, 0, 1);
  const std::string line = hypothesis_line(90, h);
  EXPECT_EQ(line, "90,34,120,150,1,0,0,1");
  const auto [view, parsed] = parse_hypothesis_line(line);
  EXPECT_EQ(view, 90);
  EXPECT_EQ(parsed, h);
}

TEST(HypothesisRecord, RejectsGarbage) {
  EXPECT_THROW(parse_hypothesis_line("not,a,record"), IoFailure);
}

TEST(Chromosome, StringRepresentationMatchesBits) {
  const auto c = chromosome_with_fields(0b10000001, 0, 255, 1, 0, 1, 0);
  EXPECT_EQ(c.to_string(), "1000000100000000111111111010");
  EXPECT_EQ(c.field_u8(0), 129);
  EXPECT_EQ(c.field_u8(8), 0);
  EXPECT_EQ(c.field_u8(16), 255);
}
