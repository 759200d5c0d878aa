#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include <mirror/error.hpp>
#include <mirror/rng.hpp>
#include <mirror/shape.hpp>

// Linear shape statistics: shapes are normalized into a canonical frame
// (translated to their centroid, scaled by the tight-box max side) and a
// PCA basis of the coordinate covariance captures the dataset's variation.

namespace mirror {

/// A shape expressed in the canonical frame plus the similarity parameters
/// that take it back to image coordinates.
struct CanonicalShape {
  Shape shape;      ///< centroid at origin, box max side = 1
  Vec2 centroid;
  double scale = 1.0;
};

inline CanonicalShape canonicalize(const Shape& shape) {
  const double scale = bounding_box(shape).max_side();
  if (!(scale > 0.0))
    raise(Errc::DegenerateShapes, "shape with zero-size bounding box");
  CanonicalShape canonical;
  canonical.centroid = shape.centroid();
  canonical.scale = scale;
  canonical.shape.points.reserve(shape.k());
  for (const Vec2& p : shape.points)
    canonical.shape.points.push_back((p - canonical.centroid) * (1.0 / scale));
  return canonical;
}

/// Mean shape plus orthonormal principal directions of shape variation,
/// all in the canonical frame.
struct ShapeModel {
  Shape mean_shape;
  Eigen::MatrixXd basis;         ///< 2K x n_components, orthonormal columns
  Eigen::VectorXd basis_scales;  ///< per-direction standard deviation

  std::size_t k() const { return mean_shape.k(); }
  std::size_t n_components() const {
    return static_cast<std::size_t>(basis.cols());
  }
};

inline Eigen::VectorXd flatten(const Shape& shape) {
  Eigen::VectorXd v(2 * shape.k());
  for (std::size_t i = 0; i < shape.k(); ++i) {
    v(2 * i) = shape.points[i].x;
    v(2 * i + 1) = shape.points[i].y;
  }
  return v;
}

inline Shape unflatten(const Eigen::VectorXd& v) {
  Shape shape;
  shape.points.resize(static_cast<std::size_t>(v.size()) / 2);
  for (std::size_t i = 0; i < shape.points.size(); ++i)
    shape.points[i] = {v(2 * i), v(2 * i + 1)};
  return shape;
}

/// PCA of canonicalized shapes. Components are ordered by decreasing
/// variance; each direction's sign is fixed so its largest-magnitude entry
/// is positive, making the model reproducible across runs.
inline ShapeModel fit_shape_model(const std::vector<Shape>& shapes,
                                  std::size_t n_components) {
  if (shapes.size() < 2)
    raise(Errc::InsufficientData, "shape model needs >= 2 shapes, got " +
                                      std::to_string(shapes.size()));
  const std::size_t k_count = shapes.front().k();
  for (const Shape& s : shapes) {
    if (s.k() != k_count)
      raise(Errc::LengthMismatch, "shape model inputs disagree on K");
  }
  if (n_components > 2 * k_count)
    raise(Errc::BadConfig, "asked for " + std::to_string(n_components) +
                               " components but shapes have only " +
                               std::to_string(2 * k_count) + " coordinates");

  const std::size_t n = shapes.size();
  Eigen::MatrixXd data(n, 2 * k_count);
  for (std::size_t i = 0; i < n; ++i)
    data.row(i) = flatten(canonicalize(shapes[i]).shape).transpose();

  const Eigen::VectorXd mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    raise(Errc::DegenerateShapes, "shape covariance eigen-decomposition failed");

  ShapeModel model;
  model.mean_shape = unflatten(mean);
  model.basis.resize(2 * k_count, static_cast<Eigen::Index>(n_components));
  model.basis_scales.resize(static_cast<Eigen::Index>(n_components));
  const Eigen::Index last = eig.eigenvalues().size() - 1;
  for (std::size_t c = 0; c < n_components; ++c) {
    const Eigen::Index src = last - static_cast<Eigen::Index>(c);
    Eigen::VectorXd dir = eig.eigenvectors().col(src);
    Eigen::Index imax = 0;
    dir.cwiseAbs().maxCoeff(&imax);
    if (dir(imax) < 0.0) dir = -dir;
    model.basis.col(static_cast<Eigen::Index>(c)) = dir;
    model.basis_scales(static_cast<Eigen::Index>(c)) =
        std::sqrt(std::max(eig.eigenvalues()(src), 0.0));
  }
  return model;
}

/// Mean shape plus a linear combination of basis directions (canonical frame).
inline Shape compose_shape(const ShapeModel& model,
                           const Eigen::VectorXd& coefficients) {
  return unflatten(flatten(model.mean_shape) + model.basis * coefficients);
}

/// Draw a random shape from the model: coefficients are independent normals
/// scaled by the per-direction standard deviation, clamped to +-clamp sigmas.
inline Shape sample_shape(const ShapeModel& model, Rng& rng,
                          double coefficient_clamp = 2.5) {
  Eigen::VectorXd coeff(model.basis.cols());
  for (Eigen::Index c = 0; c < coeff.size(); ++c) {
    double z = rng.normal();
    z = std::clamp(z, -coefficient_clamp, coefficient_clamp);
    coeff(c) = z * model.basis_scales(c);
  }
  return compose_shape(model, coeff);
}

}  // namespace mirror
