#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <vector>

#include "gts/core.hpp"

namespace gts {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// PCA

struct PcaModel {
  VectorXd mean;            // d
  MatrixXd basis;           // d x k, orthonormal columns, descending variance
  VectorXd eigenvalues;     // k retained variances
  double retained_fraction = 0;

  int components() const { return static_cast<int>(basis.cols()); }
  MatrixXd project(const MatrixXd& samples) const {  // rows are samples
    return (samples.rowwise() - mean.transpose()) * basis;
  }
};

// Fit principal components retaining at least `variance_target` of the total
// variance. When samples are fewer than dimensions the eigendecomposition is
// done on the Gram matrix, which is what makes 57600-D flattened templates
// tractable.
inline PcaModel pca_fit(const MatrixXd& samples, double variance_target) {
  const auto n = samples.rows();
  const auto d = samples.cols();
  if (n < 2) throw EmptyInput();

  PcaModel model;
  model.mean = samples.colwise().mean();
  const MatrixXd centered = samples.rowwise() - model.mean.transpose();

  VectorXd eigvals;   // ascending from the solver
  MatrixXd vectors;   // matching columns, in sample or feature space
  bool gram = n <= d;
  if (gram) {
    const MatrixXd g = centered * centered.transpose() / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(g);
    if (solver.info() != Eigen::Success) throw DegenerateData();
    eigvals = solver.eigenvalues();
    vectors = solver.eigenvectors();
  } else {
    const MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw DegenerateData();
    eigvals = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  const auto m = eigvals.size();
  double total = 0;
  for (Eigen::Index i = 0; i < m; ++i) total += std::max(0.0, eigvals(i));
  if (total <= 0) throw DegenerateData();

  // Walk eigenvalues in descending order until the target fraction is met.
  const double floor_ev = total * 1e-12;
  double cum = 0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = m - 1; i >= 0; --i) {
    const double ev = eigvals(i);
    if (ev <= floor_ev) break;
    keep.push_back(i);
    cum += ev;
    if (cum / total >= variance_target) break;
  }
  if (keep.empty()) throw DegenerateData();

  model.basis.resize(d, static_cast<Eigen::Index>(keep.size()));
  model.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const Eigen::Index i = keep[j];
    model.eigenvalues(static_cast<Eigen::Index>(j)) = eigvals(i);
    if (gram) {
      // Map a Gram-space eigenvector u to the feature-space direction
      // X^T u / sqrt((n-1) * lambda), which is unit length by construction.
      model.basis.col(static_cast<Eigen::Index>(j)) =
          centered.transpose() * vectors.col(i) / std::sqrt(eigvals(i) * static_cast<double>(n - 1));
    } else {
      model.basis.col(static_cast<Eigen::Index>(j)) = vectors.col(i);
    }
  }
  model.retained_fraction = cum / total;
  return model;
}

// ---------------------------------------------------------------------------
// Multi-class LDA

struct LdaModel {
  MatrixXd projection;   // p x k, k <= classes - 1
  VectorXd eigenvalues;  // generalized eigenvalues, descending

  MatrixXd project(const MatrixXd& samples) const { return samples * projection; }
};

// Fisher discriminant directions from the generalized eigenproblem of
// between-class vs within-class scatter. The within-class scatter gets a
// small ridge (1e-6 * trace/dim) before inversion.
inline LdaModel lda_fit(const MatrixXd& samples, const std::vector<int>& labels) {
  const auto n = samples.rows();
  const auto p = samples.cols();
  if (n != static_cast<Eigen::Index>(labels.size())) throw LengthMismatch();
  const int classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (classes < 2) throw std::invalid_argument("lda_fit: need at least 2 classes");

  std::vector<Eigen::Index> counts(classes, 0);
  MatrixXd means = MatrixXd::Zero(classes, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    means.row(labels[i]) += samples.row(i);
    ++counts[labels[i]];
  }
  for (int c = 0; c < classes; ++c) {
    if (counts[c] < 2) throw std::invalid_argument("lda_fit: every class needs at least 2 samples");
    means.row(c) /= static_cast<double>(counts[c]);
  }
  const Eigen::RowVectorXd global = samples.colwise().mean();

  MatrixXd sw = MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd d = samples.row(i) - means.row(labels[i]);
    sw.noalias() += d.transpose() * d;
  }
  MatrixXd sb = MatrixXd::Zero(p, p);
  for (int c = 0; c < classes; ++c) {
    const Eigen::RowVectorXd d = means.row(c) - global;
    sb.noalias() += static_cast<double>(counts[c]) * d.transpose() * d;
  }

  const double trace = sw.trace();
  if (!(trace > 0)) throw SingularScatter();
  sw += MatrixXd::Identity(p, p) * (1e-6 * trace / static_cast<double>(p));

  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> solver(sb, sw);
  if (solver.info() != Eigen::Success) throw SingularScatter();

  const Eigen::Index k = std::min<Eigen::Index>(classes - 1, p);
  LdaModel model;
  model.projection.resize(p, k);
  model.eigenvalues.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {  // solver orders ascending
    model.projection.col(j) = solver.eigenvectors().col(p - 1 - j);
    model.eigenvalues(j) = solver.eigenvalues()(p - 1 - j);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Gaussian Bayes classifier: per-class means, shared covariance, uniform
// priors, so prediction is the minimum Mahalanobis distance.

struct GaussianBayes {
  MatrixXd class_means;  // C x k
  MatrixXd covariance;   // k x k pooled within-class
  MatrixXd precision;    // cached inverse, rebuilt on load

  int classes() const { return static_cast<int>(class_means.rows()); }

  void rebuild_precision() {
    const auto k = covariance.rows();
    precision = covariance.llt().solve(MatrixXd::Identity(k, k));
  }
};

inline GaussianBayes bayes_fit(const MatrixXd& samples, const std::vector<int>& labels) {
  const auto n = samples.rows();
  const auto k = samples.cols();
  if (n != static_cast<Eigen::Index>(labels.size())) throw LengthMismatch();
  if (n == 0) throw EmptyInput();
  const int classes = *std::max_element(labels.begin(), labels.end()) + 1;

  GaussianBayes model;
  model.class_means = MatrixXd::Zero(classes, k);
  std::vector<Eigen::Index> counts(classes, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    model.class_means.row(labels[i]) += samples.row(i);
    ++counts[labels[i]];
  }
  for (int c = 0; c < classes; ++c) {
    if (counts[c] == 0) throw std::invalid_argument("bayes_fit: class without samples");
    model.class_means.row(c) /= static_cast<double>(counts[c]);
  }

  model.covariance = MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd d = samples.row(i) - model.class_means.row(labels[i]);
    model.covariance.noalias() += d.transpose() * d;
  }
  const auto dof = std::max<Eigen::Index>(1, n - classes);
  model.covariance /= static_cast<double>(dof);
  const double trace = model.covariance.trace();
  const double ridge = trace > 0 ? 1e-9 * trace / static_cast<double>(k) : 1e-12;
  model.covariance += MatrixXd::Identity(k, k) * ridge;
  model.rebuild_precision();
  return model;
}

// Minimum Mahalanobis distance to a class mean; ties resolve to the lower
// class index.
inline int bayes_predict(const GaussianBayes& model, const VectorXd& x) {
  if (model.classes() == 0) throw UnfittedModel();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.classes(); ++c) {
    const VectorXd d = x - model.class_means.row(c).transpose();
    const double md = d.dot(model.precision * d);
    if (md < best_d) {
      best_d = md;
      best = c;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Binary serialization of Eigen types (little-endian doubles).

namespace detail {

inline void write_matrix(std::ostream& os, const MatrixXd& m) {
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) io::write_f64(os, m(r, c));
}

inline MatrixXd read_matrix(std::istream& is) {
  const auto rows = io::read_le<std::uint32_t>(is);
  const auto cols = io::read_le<std::uint32_t>(is);
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = io::read_f64(is);
  return m;
}

inline void write_vector(std::ostream& os, const VectorXd& v) {
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) io::write_f64(os, v(i));
}

inline VectorXd read_vector(std::istream& is) {
  const auto n = io::read_le<std::uint32_t>(is);
  VectorXd v(n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = io::read_f64(is);
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// kNN (Euclidean). Majority vote; ties resolve by nearest member distance,
// then by lower label.

inline int knn_predict(const MatrixXd& gallery, const std::vector<int>& labels, const VectorXd& x,
                       int k) {
  const auto n = gallery.rows();
  if (n == 0) throw EmptyGallery();
  if (n != static_cast<Eigen::Index>(labels.size())) throw LengthMismatch();
  if (k < 1) throw std::invalid_argument("knn_predict: k must be >= 1");

  std::vector<std::pair<double, int>> by_distance(n);  // (distance, label)
  for (Eigen::Index i = 0; i < n; ++i)
    by_distance[i] = {(gallery.row(i).transpose() - x).squaredNorm(), labels[i]};
  std::sort(by_distance.begin(), by_distance.end());

  const int kk = std::min<int>(k, static_cast<int>(n));
  const int max_label = *std::max_element(labels.begin(), labels.end());
  std::vector<int> votes(max_label + 1, 0);
  std::vector<double> nearest(max_label + 1, std::numeric_limits<double>::infinity());
  for (int i = 0; i < kk; ++i) {
    votes[by_distance[i].second]++;
    nearest[by_distance[i].second] = std::min(nearest[by_distance[i].second], by_distance[i].first);
  }
  int best = -1;
  for (int label = 0; label <= max_label; ++label) {
    if (votes[label] == 0) continue;
    if (best < 0 || votes[label] > votes[best] ||
        (votes[label] == votes[best] && nearest[label] < nearest[best]))
      best = label;
  }
  return best;
}

}  // namespace gts
