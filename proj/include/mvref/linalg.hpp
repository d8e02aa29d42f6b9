#pragma once

#include <span>
#include <vector>

#include "mvref/common.hpp"

namespace mvref {

/// Determinant of a square matrix: closed form below 4x4, LU with partial
/// pivoting above.
double determinant(const MatX& a);

/// Unit right singular vector for the smallest singular value, plus the two
/// smallest singular values (second-smallest first) for degeneracy checks.
struct NullVector {
  VecX vector;
  double smallest = 0.0;
  double second_smallest = 0.0;
};
NullVector null_vector(const MatX& a);

/// Per-view conditioning map x -> scale * (x - center), chosen so the fitted
/// points have centroid 0 and RMS radius sqrt(2).
struct Similarity2 {
  Vec2 center = Vec2::Zero();
  double scale = 1.0;

  static Similarity2 fit(std::span<const Vec2> points);
  Vec2 apply(const Vec2& x) const { return scale * (x - center); }
  Vec2 invert(const Vec2& y) const { return y / scale + center; }
};

}  // namespace mvref
