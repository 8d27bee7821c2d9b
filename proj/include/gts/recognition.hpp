#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <span>

#include "gts/classifier.hpp"
#include "gts/segmentation.hpp"

namespace gts {

struct ClassifyOpts {
  bool use_knn = false;  // Bayes' rule by default
  int k = 1;
  double variance_target = 0.99;
};

// Per-view recognition model: masked-pixel selection -> PCA -> LDA -> Gaussian
// Bayes (or kNN over the projected gallery).
struct RecognitionModel {
  std::vector<std::string> labels;        // class index -> subject id
  std::vector<std::int32_t> features;     // retained flat pixel indices
  PcaModel pca;
  LdaModel lda;
  GaussianBayes bayes;
  MatrixXd gallery_proj;                  // n x k, for kNN
  std::vector<std::int32_t> gallery_label_idx;
  bool no_features = false;               // empty mask or all-constant gallery

  bool trivial() const { return labels.size() < 2 || no_features; }

  VectorXd project(std::span<const double> flat) const {
    VectorXd x(static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) x(static_cast<Eigen::Index>(i)) = flat[features[i]];
    const VectorXd z = pca.basis.transpose() * (x - pca.mean);
    return lda.projection.transpose() * z;
  }

  std::string predict(std::span<const double> flat, const ClassifyOpts& opts = {}) const {
    if (labels.empty()) throw UnfittedModel();
    if (trivial()) return labels.front();
    const VectorXd y = project(flat);
    int idx;
    if (opts.use_knn) {
      std::vector<int> gl(gallery_label_idx.begin(), gallery_label_idx.end());
      idx = knn_predict(gallery_proj, gl, y, opts.k);
    } else {
      idx = bayes_predict(bayes, y);
    }
    return labels[idx];
  }

  std::string predict(const GaitTemplate& t, const ClassifyOpts& opts = {}) const {
    return predict(std::span<const double>(t.pixels.data(), t.pixels.size()), opts);
  }
};

// Fit the full pipeline on a masked gallery. Pixels cleared by the mask and
// pixels constant across the gallery never reach PCA.
inline RecognitionModel fit_recognition(std::span<const GaitTemplate* const> gallery,
                                        const RegionMask& mask, const ClassifyOpts& opts = {}) {
  if (gallery.empty()) throw EmptyGallery();
  const auto dim = gallery.front()->pixels.size();
  for (const auto* t : gallery)
    if (t->pixels.size() != dim || !t->pixels.same_shape(mask)) throw DimensionMismatch();

  RecognitionModel model;
  std::map<std::string, int> label_index;
  for (const auto* t : gallery) label_index.emplace(t->subject, 0);
  for (auto& [subject, idx] : label_index) {
    idx = static_cast<int>(model.labels.size());
    model.labels.push_back(subject);
  }
  std::vector<int> y(gallery.size());
  for (std::size_t i = 0; i < gallery.size(); ++i) y[i] = label_index.at(gallery[i]->subject);
  model.gallery_label_idx.assign(y.begin(), y.end());

  // Masked-in pixels that vary somewhere in the gallery.
  for (std::size_t p = 0; p < dim; ++p) {
    if (!mask.data()[p]) continue;
    const double first = gallery.front()->pixels.data()[p];
    for (std::size_t i = 1; i < gallery.size(); ++i)
      if (gallery[i]->pixels.data()[p] != first) {
        model.features.push_back(static_cast<std::int32_t>(p));
        break;
      }
  }
  if (model.features.empty()) {
    model.no_features = true;
    return model;
  }
  if (model.labels.size() < 2) return model;  // single enrolled subject

  MatrixXd x(static_cast<Eigen::Index>(gallery.size()), static_cast<Eigen::Index>(model.features.size()));
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    const double* flat = gallery[i]->pixels.data();
    for (std::size_t j = 0; j < model.features.size(); ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[model.features[j]];
  }

  model.pca = pca_fit(x, opts.variance_target);
  const MatrixXd z = model.pca.project(x);
  model.lda = lda_fit(z, y);
  const MatrixXd proj = model.lda.project(z);
  model.bayes = bayes_fit(proj, y);
  model.gallery_proj = proj;
  return model;
}

inline RecognitionModel fit_recognition(const std::vector<GaitTemplate>& gallery, const RegionMask& mask,
                                        const ClassifyOpts& opts = {}) {
  std::vector<const GaitTemplate*> ptrs;
  ptrs.reserve(gallery.size());
  for (const auto& t : gallery) ptrs.push_back(&t);
  return fit_recognition(std::span<const GaitTemplate* const>(ptrs), mask, opts);
}

// ---------------------------------------------------------------------------
// Versioned binary container. Round-trips are bit-exact.

inline void save_model(std::ostream& os, const RecognitionModel& m) {
  os.write("GTSM", 4);
  io::write_le<std::uint32_t>(os, 1);  // version
  io::write_le<std::uint8_t>(os, m.no_features ? 1 : 0);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.labels.size()));
  for (const auto& s : m.labels) io::write_string(os, s);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.features.size()));
  for (auto f : m.features) io::write_le<std::int32_t>(os, f);
  detail::write_vector(os, m.pca.mean);
  detail::write_matrix(os, m.pca.basis);
  detail::write_vector(os, m.pca.eigenvalues);
  io::write_f64(os, m.pca.retained_fraction);
  detail::write_matrix(os, m.lda.projection);
  detail::write_vector(os, m.lda.eigenvalues);
  detail::write_matrix(os, m.bayes.class_means);
  detail::write_matrix(os, m.bayes.covariance);
  detail::write_matrix(os, m.gallery_proj);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.gallery_label_idx.size()));
  for (auto i : m.gallery_label_idx) io::write_le<std::int32_t>(os, i);
  if (!os) throw IoFailure("model write failed");
}

inline RecognitionModel load_model(std::istream& is) {
  char magic[4];
  io::read_bytes(is, magic, 4);
  if (std::string(magic, 4) != "GTSM") throw IoFailure("not a recognition model file");
  const auto version = io::read_le<std::uint32_t>(is);
  if (version != 1) throw IoFailure("unsupported model version");
  RecognitionModel m;
  m.no_features = io::read_le<std::uint8_t>(is) != 0;
  const auto n_labels = io::read_le<std::uint32_t>(is);
  m.labels.resize(n_labels);
  for (auto& s : m.labels) s = io::read_string(is);
  const auto n_features = io::read_le<std::uint32_t>(is);
  m.features.resize(n_features);
  for (auto& f : m.features) f = io::read_le<std::int32_t>(is);
  m.pca.mean = detail::read_vector(is);
  m.pca.basis = detail::read_matrix(is);
  m.pca.eigenvalues = detail::read_vector(is);
  m.pca.retained_fraction = io::read_f64(is);
  m.lda.projection = detail::read_matrix(is);
  m.lda.eigenvalues = detail::read_vector(is);
  m.bayes.class_means = detail::read_matrix(is);
  m.bayes.covariance = detail::read_matrix(is);
  m.gallery_proj = detail::read_matrix(is);
  const auto n_gl = io::read_le<std::uint32_t>(is);
  m.gallery_label_idx.resize(n_gl);
  for (auto& i : m.gallery_label_idx) i = io::read_le<std::int32_t>(is);
  if (m.bayes.classes() > 0) m.bayes.rebuild_precision();
  return m;
}

inline void save_model(const std::filesystem::path& path, const RecognitionModel& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoFailure("cannot create " + path.string());
  save_model(os, m);
}

inline RecognitionModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoFailure("cannot open " + path.string());
  return load_model(is);
}

}  // namespace gts
