#include "mvref/linalg.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace mvref {

double determinant(const MatX& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::ShapeError, "determinant of a non-square matrix");
  }
  switch (a.rows()) {
    case 0: return 1.0;
    case 1: return a(0, 0);
    case 2: return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default: return Eigen::PartialPivLU<MatX>(a).determinant();
  }
}

NullVector null_vector(const MatX& a) {
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeFullV);
  const VecX& s = svd.singularValues();
  const Eigen::Index cols = a.cols();
  NullVector out;
  out.vector = svd.matrixV().col(cols - 1);
  // With fewer rows than columns the trailing singular values are zero.
  auto sigma = [&](Eigen::Index i) { return i < s.size() ? s(i) : 0.0; };
  out.smallest = sigma(cols - 1);
  out.second_smallest = sigma(cols - 2);
  return out;
}

Similarity2 Similarity2::fit(std::span<const Vec2> points) {
  Similarity2 t;
  if (points.empty()) return t;
  for (const auto& p : points) t.center += p;
  t.center /= static_cast<double>(points.size());
  double sq = 0.0;
  for (const auto& p : points) sq += (p - t.center).squaredNorm();
  const double rms = std::sqrt(sq / static_cast<double>(points.size()));
  t.scale = rms > 0.0 ? std::sqrt(2.0) / rms : 1.0;
  return t;
}

}  // namespace mvref
