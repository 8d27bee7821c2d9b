#pragma once

#include <cmath>
#include <span>
#include <string>

#include "gts/image.hpp"

namespace gts {

enum class TemplateKind : std::uint8_t { Gei = 0, Geni = 1, Aei = 2 };
enum class Covariate : std::uint8_t { Normal = 0, Bag = 1, Coat = 2 };

// The 11 capture angles, frontal (0) through rear (180).
inline constexpr std::array<int, 11> kViewAngles = {0, 18, 36, 54, 72, 90, 108, 126, 144, 162, 180};

inline bool is_view_angle(int degrees) {
  for (int a : kViewAngles)
    if (a == degrees) return true;
  return false;
}

inline bool is_coronal_angle(int degrees) { return degrees == 0 || degrees == 180; }

inline const char* to_string(TemplateKind k) {
  switch (k) {
    case TemplateKind::Gei: return "gei";
    case TemplateKind::Geni: return "geni";
    default: return "aei";
  }
}

inline const char* to_string(Covariate c) {
  switch (c) {
    case Covariate::Normal: return "nm";
    case Covariate::Bag: return "bg";
    default: return "cl";
  }
}

// One collated gait template. Pixels are in [0, 1].
struct GaitTemplate {
  Grid<double> pixels;
  TemplateKind kind = TemplateKind::Gei;
  int view = 90;
  Covariate covariate = Covariate::Normal;
  std::string subject;
  int seq = 1;
};

namespace detail {

inline void check_sequence(std::span<const BinaryImage> frames) {
  if (frames.size() < 2) throw EmptyInput();
  for (const auto& f : frames)
    if (!f.same_shape(frames[0])) throw DimensionMismatch();
}

}  // namespace detail

// Gait energy image: per-pixel mean of the binary silhouettes.
inline GaitTemplate compute_gei(std::span<const BinaryImage> frames) {
  detail::check_sequence(frames);
  const double inv_n = 1.0 / static_cast<double>(frames.size());
  GaitTemplate t;
  t.kind = TemplateKind::Gei;
  t.pixels = Grid<double>(frames[0].rows(), frames[0].cols());
  for (int r = 0; r < t.pixels.rows(); ++r)
    for (int c = 0; c < t.pixels.cols(); ++c) {
      double s = 0;
      for (const auto& f : frames) s += f(r, c);
      t.pixels(r, c) = s * inv_n;
    }
  return t;
}

// Gait entropy image: per-pixel Shannon entropy (base 2) of the foreground
// occupancy, so values fall in [0, 1] without rescaling.
inline GaitTemplate compute_geni(std::span<const BinaryImage> frames) {
  detail::check_sequence(frames);
  const double inv_n = 1.0 / static_cast<double>(frames.size());
  GaitTemplate t;
  t.kind = TemplateKind::Geni;
  t.pixels = Grid<double>(frames[0].rows(), frames[0].cols());
  for (int r = 0; r < t.pixels.rows(); ++r)
    for (int c = 0; c < t.pixels.cols(); ++c) {
      double s = 0;
      for (const auto& f : frames) s += f(r, c);
      const double p = s * inv_n;
      double h = 0;
      if (p > 0 && p < 1) h = -p * std::log2(p) - (1 - p) * std::log2(1 - p);
      t.pixels(r, c) = h;
    }
  return t;
}

// Active energy image: mean absolute difference of consecutive silhouettes.
inline GaitTemplate compute_aei(std::span<const BinaryImage> frames) {
  detail::check_sequence(frames);
  const double inv = 1.0 / static_cast<double>(frames.size() - 1);
  GaitTemplate t;
  t.kind = TemplateKind::Aei;
  t.pixels = Grid<double>(frames[0].rows(), frames[0].cols());
  for (int r = 0; r < t.pixels.rows(); ++r)
    for (int c = 0; c < t.pixels.cols(); ++c) {
      double s = 0;
      for (std::size_t i = 1; i < frames.size(); ++i)
        s += std::abs(static_cast<int>(frames[i](r, c)) - static_cast<int>(frames[i - 1](r, c)));
      t.pixels(r, c) = s * inv;
    }
  return t;
}

inline GaitTemplate collate(TemplateKind kind, std::span<const BinaryImage> frames) {
  switch (kind) {
    case TemplateKind::Gei: return compute_gei(frames);
    case TemplateKind::Geni: return compute_geni(frames);
    default: return compute_aei(frames);
  }
}

// 8-bit view of a template for PNG inspection (values x255, ties up).
inline GrayImage to_gray(const Grid<double>& pixels) {
  GrayImage out(pixels.rows(), pixels.cols());
  for (int r = 0; r < pixels.rows(); ++r)
    for (int c = 0; c < pixels.cols(); ++c)
      out(r, c) = static_cast<std::uint8_t>(std::clamp(round_half_up(pixels(r, c) * 255.0), 0, 255));
  return out;
}

}  // namespace gts
