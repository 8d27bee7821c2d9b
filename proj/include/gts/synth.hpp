#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "gts/png_io.hpp"
#include "gts/templates.hpp"

namespace gts {

// Scene frame size for generated walkers (rows x cols).
inline constexpr int kSceneRows = 300;
inline constexpr int kSceneCols = 400;

// Parametric articulated walker: head disc, torso, two swinging legs and
// arms, moving along a straight line whose screen projection matches the
// requested view angle. Carrying a bag adds a lateral blob at the hip;
// a coat widens and lengthens the torso and damps the arm swing.
struct WalkerSpec {
  std::string subject_id = "001";
  std::uint64_t subject_seed = 0;
  Covariate covariate = Covariate::Normal;
  int view = 90;
  int seq = 1;
  int period = 26;       // frames per gait cycle (two strides)
  int frame_count = 53;  // >= 2 periods

  // body proportions in pixels at unit scale
  double head_radius = 14;
  double torso_half_width = 13;
  double torso_len = 62;
  double leg_len = 82;
  double arm_len = 56;
  double speed = 3.2;      // columns per frame at the sagittal view
  double swing_amp = 0.5;  // leg swing amplitude, radians
};

namespace detail {

class SceneCanvas {
 public:
  SceneCanvas() : img_(kSceneRows, kSceneCols, 0) {}

  void disc(double cx, double cy, double r) { ellipse(cx, cy, r, r); }

  void ellipse(double cx, double cy, double rx, double ry) {
    const int r0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
    const int r1 = std::min(kSceneRows - 1, static_cast<int>(std::ceil(cy + ry)));
    const int c0 = std::max(0, static_cast<int>(std::floor(cx - rx)));
    const int c1 = std::min(kSceneCols - 1, static_cast<int>(std::ceil(cx + rx)));
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        const double dx = (c - cx) / rx, dy = (r - cy) / ry;
        if (dx * dx + dy * dy <= 1.0) img_(r, c) = 255;
      }
  }

  void rect(double cx, double cy, double half_w, double half_h) {
    const int r0 = std::max(0, static_cast<int>(std::ceil(cy - half_h)));
    const int r1 = std::min(kSceneRows - 1, static_cast<int>(std::floor(cy + half_h)));
    const int c0 = std::max(0, static_cast<int>(std::ceil(cx - half_w)));
    const int c1 = std::min(kSceneCols - 1, static_cast<int>(std::floor(cx + half_w)));
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) img_(r, c) = 255;
  }

  // Thick line segment with rounded caps.
  void capsule(double x0, double y0, double x1, double y1, double half_w) {
    const int r0 = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - half_w)));
    const int r1 = std::min(kSceneRows - 1, static_cast<int>(std::ceil(std::max(y0, y1) + half_w)));
    const int c0 = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - half_w)));
    const int c1 = std::min(kSceneCols - 1, static_cast<int>(std::ceil(std::max(x0, x1) + half_w)));
    const double vx = x1 - x0, vy = y1 - y0;
    const double len2 = vx * vx + vy * vy;
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        double t = len2 > 0 ? ((c - x0) * vx + (r - y0) * vy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dx = c - (x0 + t * vx), dy = r - (y0 + t * vy);
        if (dx * dx + dy * dy <= half_w * half_w) img_(r, c) = 255;
      }
  }

  GrayImage take() { return std::move(img_); }

 private:
  GrayImage img_;
};

}  // namespace detail

inline std::vector<GrayImage> generate(const WalkerSpec& spec) {
  if (spec.period < 10) throw std::invalid_argument("walker stride period must be >= 10 frames");
  if (spec.frame_count < 2 * spec.period)
    throw std::invalid_argument("walker needs at least two gait cycles of frames");

  // Per-sequence jitter so repeated sequences of one subject differ in phase
  // and placement but not in proportions. Keyed by sequence number only:
  // covariate variants of the same sequence share gait phase.
  Rng rng(derive_seed(spec.subject_seed, static_cast<std::uint64_t>(spec.seq)));
  const double phase0 = rng.real01() * 2 * std::numbers::pi;
  const double x_jitter = static_cast<double>(rng.uniform_int(-5, 5));
  const double speed_scale = 1.0 + (rng.real01() - 0.5) * 0.06;

  const double theta = spec.view * std::numbers::pi / 180.0;
  const double sin_v = std::sin(theta), cos_v = std::cos(theta);
  const int last = spec.frame_count - 1;

  const double travel = spec.speed * speed_scale * sin_v * last;
  const double x_start = kSceneCols / 2.0 - travel / 2.0 + x_jitter;
  const double y_center = 150.0;

  const bool coat = spec.covariate == Covariate::Coat;
  const bool bag = spec.covariate == Covariate::Bag;
  const double arm_damp = coat ? 0.3 : 1.0;
  const double height = 2 * spec.head_radius + 4 + spec.torso_len + spec.leg_len;

  std::vector<GrayImage> frames;
  frames.reserve(spec.frame_count);
  for (int t = 0; t < spec.frame_count; ++t) {
    const double phase = 2 * std::numbers::pi * t / spec.period + phase0;
    const double scale = 1.0 + 0.12 * cos_v * (2.0 * t - last) / last;
    const double xc = x_start + spec.speed * speed_scale * sin_v * t;
    const double y_top = y_center - scale * height / 2.0;

    detail::SceneCanvas canvas;

    // head
    canvas.disc(xc, y_top + scale * spec.head_radius, scale * spec.head_radius);

    // torso (optionally coat)
    const double torso_top = y_top + scale * (2 * spec.head_radius + 4);
    const double torso_w = scale * spec.torso_half_width * (coat ? 1.5 : 1.0);
    const double torso_bottom =
        torso_top + scale * (spec.torso_len + (coat ? 0.3 * spec.leg_len : 0.0));
    canvas.rect(xc, (torso_top + torso_bottom) / 2, torso_w, (torso_bottom - torso_top) / 2);
    // neck
    canvas.rect(xc, y_top + scale * (2 * spec.head_radius + 2), scale * 4.0, scale * 3.0);

    // legs swing laterally in proportion to sin(view); walking toward or away
    // from the camera shows up as an alternating depth-scale on leg length.
    const double hip_y = y_top + scale * (2 * spec.head_radius + 4 + spec.torso_len);
    const double swing = std::sin(phase);
    const double lat_amp = spec.swing_amp * sin_v;
    const double depth = 0.10 * cos_v * swing;
    for (int side = -1; side <= 1; side += 2) {
      const double hip_x = xc + side * scale * 2.0;
      const double angle = side * lat_amp * swing;
      const double len = scale * spec.leg_len * (1.0 + side * depth);
      canvas.capsule(hip_x, hip_y, hip_x + len * std::sin(angle), hip_y + len * std::cos(angle),
                     scale * 3.5);
    }

    // arms, antiphase to their side's leg
    const double shoulder_y = y_top + scale * (2 * spec.head_radius + 10);
    const double arm_amp = 0.35 * arm_damp * sin_v;
    for (int side = -1; side <= 1; side += 2) {
      const double shoulder_x = xc + side * torso_w;
      const double angle = -side * arm_amp * swing;
      const double len = scale * spec.arm_len;
      canvas.capsule(shoulder_x, shoulder_y, shoulder_x + len * std::sin(angle),
                     shoulder_y + len * std::cos(angle), scale * 2.5);
    }

    if (bag) {
      const double bag_y = torso_top + scale * 0.75 * spec.torso_len;
      canvas.ellipse(xc + scale * (spec.torso_half_width + 9), bag_y, scale * 9.0, scale * 13.0);
    }

    frames.push_back(canvas.take());
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Corpus synthesis in the CASIA-B directory scheme.

// Body proportions vary over a coarse grid (2 px steps or larger) so any two
// subjects differ visibly after height normalization; sequences of one
// subject share proportions and stride period.
inline WalkerSpec make_walker_spec(int subject_index, Covariate cov, int seq, int view,
                                   std::uint64_t corpus_seed) {
  WalkerSpec spec;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", subject_index + 1);
  spec.subject_id = buf;
  spec.subject_seed = derive_seed(corpus_seed, static_cast<std::uint64_t>(subject_index));
  spec.covariate = cov;
  spec.seq = seq;
  spec.view = view;
  spec.head_radius = 12 + 2 * (subject_index % 3);
  spec.torso_half_width = 11 + 2 * ((subject_index / 3) % 3);
  spec.leg_len = 78 + 4 * ((subject_index / 9) % 3);
  spec.period = 24 + 2 * (subject_index % 3);
  spec.frame_count = 2 * spec.period + 1;
  spec.speed = 3.0 + 0.1 * (subject_index % 5);
  return spec;
}

struct ManifestEntry {
  std::string subject;
  Covariate covariate = Covariate::Normal;
  int seq = 1;
  int view = 90;
  int frames = 0;
  int period = 0;
};

struct SynthCorpusConfig {
  int subjects = 10;
  int normal_seqs = 6;
  int bag_seqs = 2;
  int coat_seqs = 2;
  std::vector<int> angles{kViewAngles.begin(), kViewAngles.end()};
  std::uint64_t seed = 42;
};

inline std::vector<WalkerSpec> make_corpus_specs(const SynthCorpusConfig& config) {
  std::vector<WalkerSpec> specs;
  for (int s = 0; s < config.subjects; ++s)
    for (int view : config.angles) {
      for (int q = 1; q <= config.normal_seqs; ++q)
        specs.push_back(make_walker_spec(s, Covariate::Normal, q, view, config.seed));
      for (int q = 1; q <= config.bag_seqs; ++q)
        specs.push_back(make_walker_spec(s, Covariate::Bag, q, view, config.seed));
      for (int q = 1; q <= config.coat_seqs; ++q)
        specs.push_back(make_walker_spec(s, Covariate::Coat, q, view, config.seed));
    }
  return specs;
}

// Writes frames as `SSS/cc-NN/AAA/SSS-cc-NN-AAA-FFF.png` under root plus a
// `manifest.csv` with the ground truth, and returns the manifest entries.
inline std::vector<ManifestEntry> write_corpus(const std::vector<WalkerSpec>& specs,
                                               const std::filesystem::path& root, int jobs = 1) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoFailure("cannot create corpus root " + root.string());

  std::vector<ManifestEntry> manifest(specs.size());
  parallel_for(specs.size(), jobs, [&](std::size_t i) {
    const WalkerSpec& spec = specs[i];
    char seq_buf[8], view_buf[8];
    std::snprintf(seq_buf, sizeof(seq_buf), "%02d", spec.seq);
    std::snprintf(view_buf, sizeof(view_buf), "%03d", spec.view);
    const std::string cc = to_string(spec.covariate);
    const fs::path dir = root / spec.subject_id / (cc + "-" + seq_buf) / view_buf;
    fs::create_directories(dir);

    const auto frames = generate(spec);
    for (std::size_t t = 0; t < frames.size(); ++t) {
      char frame_buf[8];
      std::snprintf(frame_buf, sizeof(frame_buf), "%03zu", t + 1);
      const std::string name = spec.subject_id + "-" + cc + "-" + seq_buf + "-" + view_buf + "-" +
                               frame_buf + ".png";
      write_gray_png(dir / name, frames[t]);
    }
    manifest[i] = {spec.subject_id, spec.covariate, spec.seq, spec.view,
                   static_cast<int>(frames.size()), spec.period};
  });

  std::ofstream os(root / "manifest.csv");
  if (!os) throw IoFailure("cannot write manifest");
  os << "subject,covariate,seq,angle,frames,period\n";
  for (const auto& m : manifest)
    os << m.subject << ',' << to_string(m.covariate) << ',' << m.seq << ',' << m.view << ','
       << m.frames << ',' << m.period << "\n";
  return manifest;
}

}  // namespace gts
