#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gts/core.hpp"

namespace gts {

// Canvas side length of a normalized silhouette.
inline constexpr int kCanvas = 240;

using GrayImage = Grid<std::uint8_t>;    // intensities 0..255
using BinaryImage = Grid<std::uint8_t>;  // foreground values {0, 1}

struct BoundingBox {
  int top = 0, left = 0, bottom = 0, right = 0;  // inclusive
  int height() const { return bottom - top + 1; }
  int width() const { return right - left + 1; }
};

inline std::optional<BoundingBox> foreground_bbox(const BinaryImage& img) {
  BoundingBox bb{img.rows(), img.cols(), -1, -1};
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c)
      if (img(r, c)) {
        bb.top = std::min(bb.top, r);
        bb.left = std::min(bb.left, c);
        bb.bottom = std::max(bb.bottom, r);
        bb.right = std::max(bb.right, c);
      }
  if (bb.bottom < 0) return std::nullopt;
  return bb;
}

inline std::size_t foreground_count(const BinaryImage& img) {
  std::size_t n = 0;
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c) n += img(r, c) ? 1 : 0;
  return n;
}

// Mean column index of the foreground.
inline double foreground_centroid_col(const BinaryImage& img) {
  double sum = 0;
  std::size_t n = 0;
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c)
      if (img(r, c)) {
        sum += c;
        ++n;
      }
  if (n == 0) throw EmptySilhouette();
  return sum / static_cast<double>(n);
}

/// Threshold a grayscale silhouette: pixel = 1 iff intensity >= threshold.
inline BinaryImage binarize(const GrayImage& raw, int threshold = 128) {
  BinaryImage out(raw.rows(), raw.cols());
  bool any = false;
  for (int r = 0; r < raw.rows(); ++r)
    for (int c = 0; c < raw.cols(); ++c) {
      const bool fg = raw(r, c) >= threshold;
      out(r, c) = fg ? 1 : 0;
      any = any || fg;
    }
  if (!any) throw EmptySilhouette();
  return out;
}

namespace detail {

inline BinaryImage crop(const BinaryImage& img, const BoundingBox& bb) {
  BinaryImage out(bb.height(), bb.width());
  for (int r = 0; r < out.rows(); ++r)
    for (int c = 0; c < out.cols(); ++c) out(r, c) = img(bb.top + r, bb.left + c);
  return out;
}

// Nearest-neighbor resample with endpoint-preserving index mapping: output
// row 0 samples input row 0 and output row H-1 samples input row h-1.
inline BinaryImage resize_nn(const BinaryImage& src, int rows, int cols) {
  BinaryImage out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const int sr = rows > 1 ? round_half_up(static_cast<double>(r) * (src.rows() - 1) / (rows - 1)) : 0;
    for (int c = 0; c < cols; ++c) {
      const int sc = cols > 1 ? round_half_up(static_cast<double>(c) * (src.cols() - 1) / (cols - 1)) : 0;
      out(r, c) = src(sr, sc);
    }
  }
  return out;
}

}  // namespace detail

// Normalize a binary silhouette into the standard 240x240 canvas: crop to the
// foreground bounding box, scale so the box is 240 rows tall (aspect
// preserved, nearest-neighbor), then paste with the foreground centroid at
// column 120, clamped to stay inside the canvas.
inline BinaryImage normalize(const BinaryImage& img) {
  auto bb = foreground_bbox(img);
  if (!bb) throw EmptySilhouette();
  BinaryImage cur = detail::crop(img, *bb);

  // Resampling a thin shape can shave its outermost rows or columns; re-crop
  // and scale again until the foreground spans the full target box.
  BinaryImage scaled;
  for (int pass = 0;; ++pass) {
    const int dst_w = std::max(1, round_half_up(static_cast<double>(cur.cols()) * kCanvas / cur.rows()));
    if (dst_w > kCanvas) throw AspectOverflow();
    scaled = detail::resize_nn(cur, kCanvas, dst_w);
    auto sb = foreground_bbox(scaled);
    if (!sb) throw EmptySilhouette();
    if (sb->top == 0 && sb->bottom == kCanvas - 1 && sb->left == 0 && sb->right == scaled.cols() - 1) break;
    if (pass >= 4) {
      scaled = detail::crop(scaled, *sb);
      break;
    }
    cur = detail::crop(scaled, *sb);
  }

  const double cx = foreground_centroid_col(scaled);
  int left = kCanvas / 2 - round_half_up(cx);
  left = std::clamp(left, 0, kCanvas - scaled.cols());
  const int top = kCanvas - scaled.rows();  // 0 except for the bail-out path

  BinaryImage out(kCanvas, kCanvas, 0);
  for (int r = 0; r < scaled.rows(); ++r)
    for (int c = 0; c < scaled.cols(); ++c) out(top + r, left + c) = scaled(r, c);
  return out;
}

// Locate one gait cycle in a run of normalized silhouettes. The per-frame
// foreground count of the lower third of the canvas is smoothed with a
// 3-frame moving average; a cycle spans three consecutive local maxima (two
// strides). Returns [start, end): the template is collated over
// frames[start..end).
inline std::pair<int, int> detect_gait_cycle(const std::vector<BinaryImage>& frames) {
  const int n = static_cast<int>(frames.size());
  if (n < 20) throw NoCycleFound("need at least 20 frames to search for a gait cycle");

  std::vector<double> count(n);
  for (int i = 0; i < n; ++i) {
    const int from_row = frames[i].rows() * 2 / 3;
    std::size_t s = 0;
    for (int r = from_row; r < frames[i].rows(); ++r)
      for (int c = 0; c < frames[i].cols(); ++c) s += frames[i](r, c) ? 1 : 0;
    count[i] = static_cast<double>(s);
  }

  std::vector<double> smooth(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 1), hi = std::min(n - 1, i + 1);
    smooth[i] = (count[lo] + count[i] + count[hi]) / 3.0;
  }

  // Plateau-aware local maxima: a rise followed (after any flat run) by a fall.
  std::vector<int> maxima;
  int i = 1;
  while (i <= n - 2) {
    if (smooth[i] > smooth[i - 1]) {
      int j = i;
      while (j + 1 < n && smooth[j + 1] == smooth[i]) ++j;
      if (j + 1 < n && smooth[j + 1] < smooth[i]) maxima.push_back(i);
      i = j + 1;
    } else {
      ++i;
    }
  }

  if (maxima.size() < 3) throw NoCycleFound();
  return {maxima[0], maxima[2]};
}

}  // namespace gts
