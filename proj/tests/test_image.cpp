#include <gtest/gtest.h>

#include "gts/image.hpp"

using namespace gts;

namespace {

GrayImage constant_image(int rows, int cols, std::uint8_t v) {
  GrayImage img(rows, cols);
  img.fill(v);
  return img;
}

BinaryImage rectangle(int rows, int cols, int top, int left, int height, int width) {
  BinaryImage img(rows, cols, 0);
  for (int r = top; r < top + height; ++r)
    for (int c = left; c < left + width; ++c) img(r, c) = 1;
  return img;
}

}  // namespace

TEST(Binarize, AllZeroIsEmpty) {
  EXPECT_THROW(binarize(constant_image(16, 16, 0), 128), EmptySilhouette);
}

TEST(Binarize, AllBrightIsAllForeground) {
  const auto out = binarize(constant_image(8, 8, 255), 128);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) EXPECT_EQ(out(r, c), 1);
}

TEST(Binarize, CheckerboardMatchesPerPixelOracle) {
  GrayImage img(32, 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) img(r, c) = (r + c) % 2 ? 255 : 0;
  const auto out = binarize(img, 128);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) EXPECT_EQ(out(r, c), img(r, c) >= 128 ? 1 : 0);
}

TEST(Binarize, ThresholdBoundaryIsInclusive) {
  GrayImage img(1, 3);
  img(0, 0) = 127;
  img(0, 1) = 128;
  img(0, 2) = 129;
  const auto out = binarize(img, 128);
  EXPECT_EQ(out(0, 0), 0);
  EXPECT_EQ(out(0, 1), 1);
  EXPECT_EQ(out(0, 2), 1);
}

// Raising the threshold never adds foreground pixels.
TEST(Binarize, MonotoneInThreshold) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage img(24, 24);
    for (int r = 0; r < 24; ++r)
      for (int c = 0; c < 24; ++c) img(r, c) = static_cast<std::uint8_t>(rng.below(256));
    const int t1 = rng.uniform_int(1, 200);
    const int t2 = rng.uniform_int(t1, 255);
    BinaryImage low, high;
    try {
      high = binarize(img, t2);
    } catch (const EmptySilhouette&) {
      continue;
    }
    low = binarize(img, t1);
    for (int r = 0; r < 24; ++r)
      for (int c = 0; c < 24; ++c) EXPECT_LE(high(r, c), low(r, c));
  }
}

TEST(Normalize, AlreadyNormalizedRectangleIsIdentity) {
  const auto rect = rectangle(kCanvas, kCanvas, 0, 90, 240, 60);
  EXPECT_EQ(normalize(rect), rect);
}

// 120-tall rectangle in a corner: crop, scale x2, center. Expected layout
// computed by hand: width 30 -> 60, centroid 29.5 -> paste at column 90.
TEST(Normalize, UpscalesAndCenters) {
  const auto input = rectangle(200, 200, 0, 0, 120, 30);
  const auto out = normalize(input);
  ASSERT_EQ(out.rows(), kCanvas);
  ASSERT_EQ(out.cols(), kCanvas);
  for (int r = 0; r < kCanvas; ++r)
    for (int c = 0; c < kCanvas; ++c)
      EXPECT_EQ(out(r, c), (c >= 90 && c < 150) ? 1 : 0) << "at " << r << "," << c;
}

// 480-tall rectangle: downscale by 2, width 80 -> 40, pasted at column 100.
TEST(Normalize, DownscalesTallInput) {
  const auto input = rectangle(500, 400, 10, 100, 480, 80);
  const auto out = normalize(input);
  for (int r = 0; r < kCanvas; ++r)
    for (int c = 0; c < kCanvas; ++c)
      EXPECT_EQ(out(r, c), (c >= 100 && c < 140) ? 1 : 0) << "at " << r << "," << c;
}

TEST(Normalize, EmptyInputThrows) {
  EXPECT_THROW(normalize(BinaryImage(50, 50, 0)), EmptySilhouette);
}

TEST(Normalize, ExtremeAspectOverflows) {
  // 2 rows tall, 200 wide: scaled width would be 24000.
  EXPECT_THROW(normalize(rectangle(50, 220, 10, 5, 2, 200)), AspectOverflow);
}

namespace {

// Random union of chunky rectangles, taller than wide so the aspect check
// never trips: the first rectangle spans the full height.
BinaryImage random_silhouette(Rng& rng) {
  const int rows = rng.uniform_int(80, 400);
  const int cols = rng.uniform_int(60, rows);
  BinaryImage img(rows, cols, 0);
  const int n = rng.uniform_int(2, 4);
  for (int i = 0; i < n; ++i) {
    const int h = i == 0 ? rows : rng.uniform_int(rows / 3, rows - 1);
    const int w = rng.uniform_int(8, std::max(9, cols / 2));
    const int top = i == 0 ? 0 : rng.uniform_int(0, rows - h - 1);
    const int left = rng.uniform_int(0, cols - w - 1);
    for (int r = top; r < top + h; ++r)
      for (int c = left; c < left + w; ++c) img(r, c) = 1;
  }
  return img;
}

}  // namespace

TEST(Normalize, IdempotentOnRandomSilhouettes) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto once = normalize(random_silhouette(rng));
    EXPECT_EQ(normalize(once), once) << "trial " << trial;
  }
}

TEST(Normalize, ForegroundTouchesTopAndBottomRows) {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto out = normalize(random_silhouette(rng));
    bool top = false, bottom = false;
    for (int c = 0; c < kCanvas; ++c) {
      top = top || out(0, c);
      bottom = bottom || out(kCanvas - 1, c);
    }
    EXPECT_TRUE(top) << "trial " << trial;
    EXPECT_TRUE(bottom) << "trial " << trial;
  }
}

namespace {

// Frame whose lower-third foreground count is exactly `count`.
BinaryImage frame_with_lower_count(int count) {
  BinaryImage img(kCanvas, kCanvas, 0);
  img(0, 0) = 1;  // keep the silhouette non-empty
  int placed = 0;
  for (int r = kCanvas - 1; r >= 160 && placed < count; --r)
    for (int c = 0; c < kCanvas && placed < count; ++c) {
      img(r, c) = 1;
      ++placed;
    }
  return img;
}

}  // namespace

// Lower-body count following |sin(pi t / 15)|: maxima land at t = 7, 22, 37,
// so the detected cycle spans 30 frames.
TEST(GaitCycle, SinusoidalSignalGivesThirtyFrameCycle) {
  std::vector<BinaryImage> frames;
  for (int t = 0; t < 45; ++t) {
    const double v = std::abs(std::sin(M_PI * t / 15.0));
    frames.push_back(frame_with_lower_count(static_cast<int>(std::lround(200 * v))));
  }
  const auto [start, end] = detect_gait_cycle(frames);
  EXPECT_NEAR(end - start, 30, 1);
}

TEST(GaitCycle, ConstantSignalHasNoCycle) {
  std::vector<BinaryImage> frames(25, frame_with_lower_count(100));
  EXPECT_THROW(detect_gait_cycle(frames), NoCycleFound);
}

TEST(GaitCycle, TooFewFramesThrows) {
  std::vector<BinaryImage> frames(10, frame_with_lower_count(100));
  EXPECT_THROW(detect_gait_cycle(frames), NoCycleFound);
}

TEST(GaitCycle, TwoMaximaAreNotEnough) {
  std::vector<BinaryImage> frames;
  for (int t = 0; t < 25; ++t) {
    const double v = std::abs(std::sin(M_PI * t / 15.0));
    frames.push_back(frame_with_lower_count(static_cast<int>(std::lround(200 * v))));
  }
  EXPECT_THROW(detect_gait_cycle(frames), NoCycleFound);
}
