#include "mvref/geometry.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SVD>
#include <Eigen/LU>

#include "mvref/linalg.hpp"

namespace mvref {
namespace {

constexpr double kDegenerateGap = 1e-8;

// x -> s (x - c) in 3-D, RMS distance sqrt(3).
Mat4 fit_world_normalization(std::span<const Point3> pts) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double sq = 0.0;
  for (const auto& p : pts) sq += (p - c).squaredNorm();
  const double rms = std::sqrt(sq / static_cast<double>(pts.size()));
  const double s = rms > 0.0 ? std::sqrt(3.0) / rms : 1.0;
  Mat4 t = Mat4::Identity() * s;
  t(3, 3) = 1.0;
  t.block<3, 1>(0, 3) = -s * c;
  return t;
}

Eigen::Matrix3d to_matrix(const Similarity2& n) {
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity() * n.scale;
  t(2, 2) = 1.0;
  t.block<2, 1>(0, 2) = -n.scale * n.center;
  return t;
}

}  // namespace

Eigen::Matrix<double, 12, 1> ProjMatrix34::vec() const {
  Eigen::Matrix<double, 12, 1> p;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) p(4 * r + c) = m(r, c);
  return p;
}

Eigen::Matrix<double, 12, 1> ProjMatrix34::canonical() const {
  Eigen::Matrix<double, 12, 1> p = vec();
  const double norm = p.norm();
  if (norm == 0.0) return p;
  p /= norm;
  for (int i = 0; i < 12; ++i) {
    if (p(i) != 0.0) {
      if (p(i) < 0.0) p = -p;
      break;
    }
  }
  return p;
}

double ProjMatrix34::abs_cosine(const ProjMatrix34& other) const {
  const auto a = vec();
  const auto b = other.vec();
  const double denom = a.norm() * b.norm();
  return denom > 0.0 ? std::abs(a.dot(b)) / denom : 0.0;
}

bool ProjMatrix34::equivalent(const ProjMatrix34& other, double tol) const {
  return (canonical() - other.canonical()).norm() <= tol;
}

Pixel2 project(const ProjMatrix34& cam, const Point3& x) {
  const Vec4 xh(x.x(), x.y(), x.z(), 1.0);
  const Vec3 h = cam.m * xh;
  if (std::abs(h.z()) < 1e-12 * cam.m.row(2).norm() * xh.norm()) {
    throw Error(ErrorKind::PointAtInfinity, "world point lies on the camera's principal plane");
  }
  return Pixel2::at(h.x() / h.z(), h.y() / h.z());
}

TransformedPair apply_transform(const Homography4& h, const Point3& x, const ProjMatrix34& cam) {
  const double norm = h.m.norm();
  const double det = h.m.determinant();
  if (!(std::abs(det) > 1e-12 * norm * norm * norm * norm)) {
    throw Error(ErrorKind::SingularTransform, "projective transform is not invertible");
  }
  const Vec4 xh = h.m * Vec4(x.x(), x.y(), x.z(), 1.0);
  if (std::abs(xh(3)) < 1e-12 * xh.norm()) {
    throw Error(ErrorKind::PointAtInfinity, "transformed point is at infinity");
  }
  return {xh.head<3>() / xh(3), ProjMatrix34(cam.m * h.m.inverse())};
}

ProjMatrix34 estimate_projection_dlt(std::span<const Point3> world,
                                     std::span<const Pixel2> image) {
  if (world.size() != image.size()) {
    throw Error(ErrorKind::ShapeError, "world and image point counts differ");
  }
  if (world.size() < 6) {
    throw Error(ErrorKind::InsufficientPoints, "camera estimation needs at least 6 points");
  }
  std::vector<Vec2> px;
  px.reserve(image.size());
  for (const auto& p : image) {
    if (!p.observed) throw Error(ErrorKind::MissingObservation, "image point not observed");
    px.push_back(p.vec());
  }
  const Similarity2 img_norm = Similarity2::fit(px);
  const Mat4 world_norm = fit_world_normalization(world);

  const auto count = static_cast<Eigen::Index>(world.size());
  MatX system = MatX::Zero(2 * count, 12);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vec4 xw = world_norm * Vec4(world[i].x(), world[i].y(), world[i].z(), 1.0);
    const Vec2 xi = img_norm.apply(px[i]);
    system.block<1, 4>(2 * i, 0) = xw.transpose();
    system.block<1, 4>(2 * i, 8) = -xi.x() * xw.transpose();
    system.block<1, 4>(2 * i + 1, 4) = xw.transpose();
    system.block<1, 4>(2 * i + 1, 8) = -xi.y() * xw.transpose();
  }
  const NullVector nv = null_vector(system);
  const double largest = Eigen::JacobiSVD<MatX>(system).singularValues()(0);
  if (nv.second_smallest - nv.smallest < kDegenerateGap * largest) {
    throw Error(ErrorKind::DegenerateConfiguration,
                "camera null space is not one-dimensional (e.g. coplanar points)");
  }
  Mat34 p_norm;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) p_norm(r, c) = nv.vector(4 * r + c);
  const Mat34 p = to_matrix(img_norm).inverse() * p_norm * world_norm;
  return ProjMatrix34(p / p.norm());
}

Point3 triangulate(std::span<const ProjMatrix34> cams, std::span<const Pixel2> pts) {
  if (cams.size() != pts.size()) {
    throw Error(ErrorKind::ShapeError, "camera and image point counts differ");
  }
  std::vector<Eigen::RowVector4d> rows;
  for (std::size_t i = 0; i < cams.size(); ++i) {
    if (!pts[i].observed) continue;
    const Mat34& p = cams[i].m;
    Eigen::RowVector4d ru = p.row(0) - pts[i].u * p.row(2);
    Eigen::RowVector4d rv = p.row(1) - pts[i].v * p.row(2);
    // Row scaling leaves the exact solution unchanged and evens out pixel-scale rows.
    if (ru.norm() > 0.0) ru /= ru.norm();
    if (rv.norm() > 0.0) rv /= rv.norm();
    rows.push_back(ru);
    rows.push_back(rv);
  }
  if (rows.size() < 4) {
    throw Error(ErrorKind::InsufficientViews, "triangulation needs at least 2 observed views");
  }
  MatX system(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i) system.row(static_cast<Eigen::Index>(i)) = rows[i];
  const VecX x = null_vector(system).vector;
  if (std::abs(x(3)) < 1e-10 * x.norm()) {
    throw Error(ErrorKind::PointAtInfinity, "triangulated point is at infinity");
  }
  return x.head<3>() / x(3);
}

Point3 camera_center(const ProjMatrix34& cam) {
  const VecX c = null_vector(cam.m).vector;
  if (std::abs(c(3)) < 1e-10 * c.norm()) {
    throw Error(ErrorKind::CenterAtInfinity, "camera center is at infinity (affine camera)");
  }
  return c.head<3>() / c(3);
}

}  // namespace mvref
