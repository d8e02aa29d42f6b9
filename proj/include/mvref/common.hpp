#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace mvref {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

enum class ErrorKind {
  PointAtInfinity,
  SingularTransform,
  InsufficientPoints,
  InsufficientViews,
  DegenerateConfiguration,
  CenterAtInfinity,
  ShapeError,
  MissingObservation,
  DegenerateMinors,
  DegenerateSet,
  RankDeficientSystem,
  NoUsablePairs,
  GenerationFailure,
  ShapeMismatch,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// Every failure in the library surfaces as this one exception type; callers
// branch on kind() (the CLI maps kinds onto exit codes).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mvref
