#pragma once

#include <array>
#include <filesystem>
#include <fstream>

#include "gts/classifier.hpp"
#include "gts/templates.hpp"

namespace gts {

struct PixelPoint {
  int row = 0, col = 0;
  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

// Topmost and bottom-most foreground pixels in scene-frame coordinates.
// Row ties resolve to the smaller column.
inline std::pair<PixelPoint, PixelPoint> extremity_points(const BinaryImage& sil) {
  PixelPoint top{-1, -1}, bottom{-1, -1};
  for (int r = 0; r < sil.rows(); ++r)
    for (int c = 0; c < sil.cols(); ++c)
      if (sil(r, c)) {
        if (top.row < 0) top = {r, c};
        if (r > bottom.row) bottom = {r, c};
      }
  if (top.row < 0) throw EmptySilhouette();
  return {top, bottom};
}

// A sequence is coronal-plane (0 or 180 degrees) when the walker barely
// travels: bounding boxes of the first and last silhouettes overlap with
// IoU >= 0.5.
inline bool coronal_check(const BinaryImage& first, const BinaryImage& last) {
  if (!first.same_shape(last)) throw DimensionMismatch();
  const auto a = foreground_bbox(first);
  const auto b = foreground_bbox(last);
  if (!a || !b) throw EmptySilhouette();
  const int ih = std::min(a->bottom, b->bottom) - std::max(a->top, b->top) + 1;
  const int iw = std::min(a->right, b->right) - std::max(a->left, b->left) + 1;
  const double inter = ih > 0 && iw > 0 ? static_cast<double>(ih) * iw : 0.0;
  const double uni = static_cast<double>(a->height()) * a->width() +
                     static_cast<double>(b->height()) * b->width() - inter;
  return inter / uni >= 0.5;
}

// Slope pair of the extremity trajectories plus the coronal flag. Slopes are
// image-coordinate row change over column change between the first and last
// frames' extremity points. The first/last foreground areas feed the 0-vs-180
// direction rule for coronal sequences.
struct ViewFeatures {
  double m_p = 0;  // topmost-point line
  double m_q = 0;  // bottom-most-point line
  bool coronal = false;
  double area_first = 0;
  double area_last = 0;

  VectorXd slopes() const {
    VectorXd v(2);
    v << m_p, m_q;
    return v;
  }
};

inline ViewFeatures extract_view_features(const std::vector<BinaryImage>& frames) {
  if (frames.size() < 2) throw EmptyInput();

  // First and last frames that actually contain the subject.
  int first = 0, last = static_cast<int>(frames.size()) - 1;
  while (first < last && !foreground_bbox(frames[first])) ++first;
  while (last > first && !foreground_bbox(frames[last])) --last;
  if (first >= last) throw EmptySilhouette();

  ViewFeatures f;
  f.area_first = static_cast<double>(foreground_count(frames[first]));
  f.area_last = static_cast<double>(foreground_count(frames[last]));
  f.coronal = coronal_check(frames[first], frames[last]);

  const auto [p1, q1] = extremity_points(frames[first]);
  const auto [pn, qn] = extremity_points(frames[last]);
  const int dcol_p = pn.col - p1.col;
  const int dcol_q = qn.col - q1.col;
  if (f.coronal) return f;  // slopes unused on the coronal path
  if (std::abs(dcol_p) < 2 || std::abs(dcol_q) < 2) throw DegenerateTrajectory();
  f.m_p = static_cast<double>(pn.row - p1.row) / dcol_p;
  f.m_q = static_cast<double>(qn.row - q1.row) / dcol_q;
  return f;
}

// ---------------------------------------------------------------------------
// Estimator: Gaussian Bayes over the 2-D slope features for the nine
// non-coronal angles; coronal sequences route through the area direction rule
// (growing silhouette = approaching = 0, shrinking = 180).

struct ViewEstimator {
  std::vector<int> angles;  // class index -> degrees
  GaussianBayes bayes;
};

inline ViewEstimator fit_view_estimator(const std::vector<std::pair<ViewFeatures, int>>& labeled) {
  ViewEstimator est;
  for (int a : kViewAngles)
    if (!is_coronal_angle(a)) est.angles.push_back(a);

  std::vector<int> y;
  std::vector<double> rows;
  for (const auto& [f, angle] : labeled) {
    if (!is_view_angle(angle)) throw std::invalid_argument("unknown view angle label");
    if (is_coronal_angle(angle) || f.coronal) continue;
    const auto it = std::find(est.angles.begin(), est.angles.end(), angle);
    y.push_back(static_cast<int>(it - est.angles.begin()));
    rows.push_back(f.m_p);
    rows.push_back(f.m_q);
  }

  std::array<int, 9> per_class{};
  for (int c : y) per_class[c]++;
  for (std::size_t i = 0; i < per_class.size(); ++i)
    if (per_class[i] == 0)
      throw InsufficientTuningData("view estimator training lacks angle " + std::to_string(est.angles[i]));

  MatrixXd x(static_cast<Eigen::Index>(y.size()), 2);
  for (std::size_t i = 0; i < y.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = rows[2 * i];
    x(static_cast<Eigen::Index>(i), 1) = rows[2 * i + 1];
  }
  est.bayes = bayes_fit(x, y);
  return est;
}

inline int estimate_view(const ViewEstimator& est, const ViewFeatures& f) {
  if (f.coronal) return f.area_last >= f.area_first ? 0 : 180;
  if (est.bayes.classes() == 0) throw UnfittedModel();
  return est.angles[bayes_predict(est.bayes, f.slopes())];
}

// ---------------------------------------------------------------------------
// Serialization (alongside the per-view classifier bundle).

inline void save_view_estimator(std::ostream& os, const ViewEstimator& est) {
  os.write("GTSV", 4);
  io::write_le<std::uint32_t>(os, 1);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(est.angles.size()));
  for (int a : est.angles) io::write_le<std::int32_t>(os, a);
  detail::write_matrix(os, est.bayes.class_means);
  detail::write_matrix(os, est.bayes.covariance);
  if (!os) throw IoFailure("view estimator write failed");
}

inline ViewEstimator load_view_estimator(std::istream& is) {
  char magic[4];
  io::read_bytes(is, magic, 4);
  if (std::string(magic, 4) != "GTSV") throw IoFailure("not a view estimator file");
  if (io::read_le<std::uint32_t>(is) != 1) throw IoFailure("unsupported view estimator version");
  ViewEstimator est;
  const auto n = io::read_le<std::uint32_t>(is);
  est.angles.resize(n);
  for (auto& a : est.angles) a = io::read_le<std::int32_t>(is);
  est.bayes.class_means = detail::read_matrix(is);
  est.bayes.covariance = detail::read_matrix(is);
  if (est.bayes.classes() > 0) est.bayes.rebuild_precision();
  return est;
}

inline void save_view_estimator(const std::filesystem::path& path, const ViewEstimator& est) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoFailure("cannot create " + path.string());
  save_view_estimator(os, est);
}

inline ViewEstimator load_view_estimator(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoFailure("cannot open " + path.string());
  return load_view_estimator(is);
}

}  // namespace gts
