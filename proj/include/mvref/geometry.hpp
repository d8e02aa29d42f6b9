#pragma once

#include <span>

#include "mvref/grid.hpp"

namespace mvref {

/// A 3x4 projection matrix. Only its direction matters; use equivalent() or
/// canonical() to compare two matrices.
struct ProjMatrix34 {
  Mat34 m = Mat34::Zero();

  ProjMatrix34() = default;
  explicit ProjMatrix34(const Mat34& mat) : m(mat) {}

  /// Row-major 12-vector (p1..p12).
  Eigen::Matrix<double, 12, 1> vec() const;
  /// Unit 12-vector with the first nonzero entry positive.
  Eigen::Matrix<double, 12, 1> canonical() const;
  /// |cos| of the angle between the two 12-vectors.
  double abs_cosine(const ProjMatrix34& other) const;
  bool equivalent(const ProjMatrix34& other, double tol = 1e-10) const;
};

struct Homography4 {
  Mat4 m = Mat4::Identity();
};

Pixel2 project(const ProjMatrix34& cam, const Point3& x);

struct TransformedPair {
  Point3 point;
  ProjMatrix34 camera;
};
/// Moves (X, P) to (H X, P H^-1); projections are unchanged.
TransformedPair apply_transform(const Homography4& h, const Point3& x, const ProjMatrix34& cam);

/// Projection matrix from >= 6 world/image pairs using the stacked linear
/// system, solved in Hartley-normalized coordinates.
ProjMatrix34 estimate_projection_dlt(std::span<const Point3> world,
                                     std::span<const Pixel2> image);

/// World point from >= 2 observing views; unobserved pixels are skipped.
Point3 triangulate(std::span<const ProjMatrix34> cams, std::span<const Pixel2> pts);

Point3 camera_center(const ProjMatrix34& cam);

}  // namespace mvref
