#pragma once

#include <array>
#include <span>
#include <vector>

#include "mvref/geometry.hpp"
#include "mvref/grid.hpp"

namespace mvref {

/// Two-view constraint matrix: one row [1, u, v, u', v', uu', uv', vu', vv']
/// per correspondence. Rank <= 8 for exact data.
MatX build_gamma(std::span<const Pixel2> first, std::span<const Pixel2> second);

/// sigma_{r+1} / sigma_1, or 0 for the zero matrix.
double rank_residual(const MatX& a, int r);

/// rank_residual(build_gamma(...), 8) after per-view conditioning.
double gamma_rank_residual(std::span<const Pixel2> first, std::span<const Pixel2> second);

/// Twice the signed area of (i1, i2, j):
/// | u_i1 - u_j   u_i2 - u_j |
/// | v_i1 - v_j   v_i2 - v_j |
double xi(std::span<const Pixel2> view, std::size_t i1, std::size_t i2, std::size_t j);

/// Four-index form with separate anchors per column.
double xi_cross(std::span<const Pixel2> view, std::size_t i1, std::size_t i2,
                std::size_t j1, std::size_t j2);

/// One Lambda row [b0 .. b4] for six image points of one view.
std::array<double, 5> lambda_row(std::span<const Vec2> six);

struct LambdaMatrix {
  MatX m;                         ///< one row per usable view
  std::vector<std::size_t> views; ///< grid view index of each row
};

/// Multi-view constraint matrix over the given six points. Views where any of
/// the six is unobserved contribute no row. Rank <= 4 for exact data.
LambdaMatrix build_lambda(const ObservationGrid& grid, const std::array<std::size_t, 6>& points,
                          std::span<const std::size_t> views);

/// rank_residual(Lambda, 4) with each view's six points conditioned first.
double lambda_rank_residual(const ObservationGrid& grid, const std::array<std::size_t, 6>& points,
                            std::span<const std::size_t> views);

/// Line alpha*u + beta*v + gamma = 0 on which one unknown image point lies.
struct CoeffTriple {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double evaluate(const Vec2& x) const { return alpha * x.x() + beta * x.y() + gamma; }
  /// Scaled so (alpha, beta) is a unit normal; evaluate() is then a distance.
  CoeffTriple unit() const;
};

/// Line for the first-view point of pair `target` from the other eight pairs,
/// built from the signed 8x8 minors of the 9x9 constraint matrix expanded
/// along the target row. The target's first-view pixel may be unobserved; its
/// second-view pixel must be observed.
CoeffTriple epipolar_coeffs(std::span<const Pixel2> first, std::span<const Pixel2> second,
                            std::size_t target);

/// Line for point `points[5]` in `target_view` from the 5x5 determinants over
/// the target view and four other views. Points 1..5 must be observed in all
/// five views; point 6 in the four non-target views.
CoeffTriple multiview_coeffs(const ObservationGrid& grid, const std::array<std::size_t, 6>& points,
                             std::size_t target_view, const std::array<std::size_t, 4>& views);

/// The 16 coefficients a0..a15 of det(K) as a polynomial in (u, v, u', v'),
/// recovered by exact multilinear interpolation over {0,1}^4.
std::array<double, 16> epipolar_polynomial(const ProjMatrix34& p, const ProjMatrix34& q);

/// max(|a5|, |a10|..|a15|) / max_i |a_i|; 0 when the whole polynomial
/// vanishes to round-off.
double vanishing_coeff_check(const ProjMatrix34& p, const ProjMatrix34& q);

/// |sum| / sum|term| of the explicit 24-term expression for a5.
double a5_explicit_residual(const ProjMatrix34& p, const ProjMatrix34& q);

/// Null vector [a0, a1, a2, a3, a4, a6, a7, a8, a9] of the two-view matrix,
/// computed from the cameras.
std::array<double, 9> epipolar_null_vector(const ProjMatrix34& p, const ProjMatrix34& q);

/// b0..b17 of the six-point quartic for one view; b6..b11 come from the
/// block expansion, the rest from their closed forms.
std::array<double, 18> b_coefficients(std::span<const Pixel2> six);

/// Max residual, relative to max|b_i|, over the six pairings b_i = -b_{11-i}
/// and the eight three-term identities among b0..b17.
double b_relation_check(std::span<const Pixel2> six);

}  // namespace mvref
