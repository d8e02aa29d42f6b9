#include "mvref/constraints.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "mvref/linalg.hpp"

namespace mvref {
namespace {

constexpr double kMinorFloor = 1e-12;

const Pixel2& require(std::span<const Pixel2> view, std::size_t i) {
  if (i >= view.size()) throw Error(ErrorKind::ShapeError, "point index out of range");
  if (!view[i].observed) {
    throw Error(ErrorKind::MissingObservation, "point " + std::to_string(i) + " is not observed");
  }
  return view[i];
}

double area(const Vec2& a, const Vec2& b, const Vec2& j) {
  return (a.x() - j.x()) * (b.y() - j.y()) - (b.x() - j.x()) * (a.y() - j.y());
}

Eigen::Matrix<double, 1, 9> gamma_row(const Vec2& x, const Vec2& y) {
  Eigen::Matrix<double, 1, 9> r;
  r << 1.0, x.x(), x.y(), y.x(), y.y(), x.x() * y.x(), x.x() * y.y(), x.y() * y.x(),
      x.y() * y.y();
  return r;
}

std::vector<Vec2> to_vecs(std::span<const Pixel2> pts) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.vec());
  return out;
}

double det4_rows(const Eigen::RowVector4d& a, const Eigen::RowVector4d& b,
                 const Eigen::RowVector4d& c, const Eigen::RowVector4d& d) {
  Mat4 k;
  k << a, b, c, d;
  return k.determinant();
}

// Line a*y + b = 0 in conditioned coordinates y = s (x - c), rewritten in x.
CoeffTriple to_pixels(const CoeffTriple& t, const Similarity2& norm) {
  const double s = norm.scale;
  return {t.alpha * s, t.beta * s,
          t.gamma - s * (t.alpha * norm.center.x() + t.beta * norm.center.y())};
}

}  // namespace

MatX build_gamma(std::span<const Pixel2> first, std::span<const Pixel2> second) {
  if (first.size() != second.size()) {
    throw Error(ErrorKind::ShapeError, "view point lists differ in length");
  }
  if (first.size() < 9) {
    throw Error(ErrorKind::InsufficientPoints, "two-view matrix needs at least 9 pairs");
  }
  MatX g(static_cast<Eigen::Index>(first.size()), 9);
  for (std::size_t m = 0; m < first.size(); ++m) {
    g.row(static_cast<Eigen::Index>(m)) = gamma_row(require(first, m).vec(), require(second, m).vec());
  }
  return g;
}

double rank_residual(const MatX& a, int r) {
  if (r < 0 || std::min(a.rows(), a.cols()) <= r) {
    throw Error(ErrorKind::ShapeError, "matrix too small for rank " + std::to_string(r));
  }
  const VecX s = Eigen::JacobiSVD<MatX>(a).singularValues();
  return s(0) > 0.0 ? s(r) / s(0) : 0.0;
}

double gamma_rank_residual(std::span<const Pixel2> first, std::span<const Pixel2> second) {
  // build_gamma validates; the copies below are conditioned per view.
  build_gamma(first, second);
  const auto a = to_vecs(first);
  const auto b = to_vecs(second);
  const auto na = Similarity2::fit(a);
  const auto nb = Similarity2::fit(b);
  std::vector<Pixel2> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca.push_back(Pixel2::from(na.apply(a[i])));
    cb.push_back(Pixel2::from(nb.apply(b[i])));
  }
  return rank_residual(build_gamma(ca, cb), 8);
}

double xi(std::span<const Pixel2> view, std::size_t i1, std::size_t i2, std::size_t j) {
  return xi_cross(view, i1, i2, j, j);
}

double xi_cross(std::span<const Pixel2> view, std::size_t i1, std::size_t i2,
                std::size_t j1, std::size_t j2) {
  const Vec2 a = require(view, i1).vec() - require(view, j1).vec();
  const Vec2 b = require(view, i2).vec() - require(view, j2).vec();
  return a.x() * b.y() - b.x() * a.y();
}

std::array<double, 5> lambda_row(std::span<const Vec2> six) {
  // Labels 1..6 index the six points.
  auto s = [&](int i1, int i2, int j) { return area(six[i1 - 1], six[i2 - 1], six[j - 1]); };
  return {s(3, 4, 5) * s(1, 2, 6), s(4, 2, 5) * s(1, 3, 6), s(2, 3, 5) * s(1, 4, 6),
          s(1, 2, 5) * s(3, 4, 6), s(1, 3, 5) * s(4, 2, 6)};
}

namespace {

LambdaMatrix lambda_impl(const ObservationGrid& grid, const std::array<std::size_t, 6>& points,
                         std::span<const std::size_t> views, bool condition) {
  LambdaMatrix out;
  std::vector<std::array<double, 5>> rows;
  for (std::size_t n : views) {
    if (n >= grid.num_views()) throw Error(ErrorKind::ShapeError, "view index out of range");
    std::array<Vec2, 6> six;
    bool usable = true;
    for (std::size_t k = 0; k < 6; ++k) {
      if (points[k] >= grid.num_points()) throw Error(ErrorKind::ShapeError, "point index out of range");
      const Pixel2& p = grid(points[k], n);
      if (!p.observed) {
        usable = false;
        break;
      }
      six[k] = p.vec();
    }
    if (!usable) continue;
    if (condition) {
      const auto t = Similarity2::fit(six);
      for (auto& p : six) p = t.apply(p);
    }
    rows.push_back(lambda_row(six));
    out.views.push_back(n);
  }
  if (rows.size() < 5) {
    throw Error(ErrorKind::InsufficientViews,
                "multi-view matrix needs 5 views observing all six points, have " +
                    std::to_string(rows.size()));
  }
  out.m.resize(static_cast<Eigen::Index>(rows.size()), 5);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < 5; ++c) out.m(static_cast<Eigen::Index>(r), c) = rows[r][c];
  return out;
}

}  // namespace

LambdaMatrix build_lambda(const ObservationGrid& grid, const std::array<std::size_t, 6>& points,
                          std::span<const std::size_t> views) {
  return lambda_impl(grid, points, views, false);
}

double lambda_rank_residual(const ObservationGrid& grid, const std::array<std::size_t, 6>& points,
                            std::span<const std::size_t> views) {
  return rank_residual(lambda_impl(grid, points, views, true).m, 4);
}

CoeffTriple CoeffTriple::unit() const {
  const double n = std::hypot(alpha, beta);
  if (n == 0.0) return *this;
  return {alpha / n, beta / n, gamma / n};
}

CoeffTriple epipolar_coeffs(std::span<const Pixel2> first, std::span<const Pixel2> second,
                            std::size_t target) {
  if (first.size() != 9 || second.size() != 9) {
    throw Error(ErrorKind::ShapeError, "epipolar coefficients need exactly 9 pairs");
  }
  if (target >= 9) throw Error(ErrorKind::ShapeError, "target index out of range");
  // Work in conditioned coordinates; the line is mapped back to pixels at the end.
  std::vector<Vec2> known_first, all_second;
  for (std::size_t i = 0; i < 9; ++i) {
    all_second.push_back(require(second, i).vec());
    if (i != target) known_first.push_back(require(first, i).vec());
  }
  const auto norm_first = Similarity2::fit(known_first);
  const auto norm_second = Similarity2::fit(all_second);
  const Vec2 partner = norm_second.apply(all_second[target]);

  MatX rest(8, 9);
  double bound = 1.0;
  for (std::size_t i = 0, r = 0; i < 9; ++i) {
    if (i == target) continue;
    const auto row = gamma_row(norm_first.apply(first[i].vec()), norm_second.apply(all_second[i]));
    rest.row(static_cast<Eigen::Index>(r++)) = row;
    bound *= row.norm();
  }
  // minor[c] = det of the 8x8 block with column c removed.
  std::array<double, 9> minor{};
  for (int c = 0; c < 9; ++c) {
    MatX block(8, 8);
    for (int k = 0, col = 0; k < 9; ++k) {
      if (k == c) continue;
      block.col(col++) = rest.col(k);
    }
    minor[c] = determinant(block);
  }
  // Cofactor expansion along the target row [1, u, v, u', v', uu', uv', vu', vv']
  // collected by powers of the unknown (u, v).
  const double up = partner.x();
  const double vp = partner.y();
  CoeffTriple t;
  t.alpha = -minor[1] - up * minor[5] + vp * minor[6];
  t.beta = minor[2] - up * minor[7] + vp * minor[8];
  t.gamma = minor[0] - up * minor[3] + vp * minor[4];

  const double scale = bound * (1.0 + std::abs(up) + std::abs(vp));
  if (std::max({std::abs(t.alpha), std::abs(t.beta), std::abs(t.gamma)}) < kMinorFloor * scale) {
    throw Error(ErrorKind::DegenerateMinors, "all 8x8 minors vanish");
  }
  return to_pixels(t, norm_first);
}

CoeffTriple multiview_coeffs(const ObservationGrid& grid, const std::array<std::size_t, 6>& points,
                             std::size_t target_view, const std::array<std::size_t, 4>& views) {
  auto fetch = [&](std::size_t point, std::size_t view) -> Vec2 {
    if (point >= grid.num_points() || view >= grid.num_views()) {
      throw Error(ErrorKind::ShapeError, "index out of range");
    }
    const Pixel2& p = grid(point, view);
    if (!p.observed) {
      throw Error(ErrorKind::MissingObservation, "point " + std::to_string(point) +
                                                     " not observed in view " + std::to_string(view));
    }
    return p.vec();
  };
  for (std::size_t n : views) {
    if (n == target_view) throw Error(ErrorKind::InvalidArgument, "target view repeated");
  }

  Eigen::Matrix<double, 5, 4> a;
  double col_bound = 1.0;
  for (int j = 0; j < 4; ++j) {
    std::array<Vec2, 6> six;
    for (int k = 0; k < 6; ++k) six[k] = fetch(points[k], views[j]);
    const auto norm = Similarity2::fit(six);
    for (auto& p : six) p = norm.apply(p);
    const auto row = lambda_row(six);
    for (int r = 0; r < 5; ++r) a(r, j) = row[r];
    col_bound *= a.col(j).norm();
  }

  // Target view: point 6 is the unknown. Each Lambda entry is
  // xi(.., 5) * xi(.., 6) and xi(i1 i2, 6) is affine in (u6, v6):
  //   (u_i1 v_i2 - u_i2 v_i1) + (v_i1 - v_i2) u6 + (u_i2 - u_i1) v6.
  std::array<Vec2, 5> x;
  for (int k = 0; k < 5; ++k) x[k] = fetch(points[k], target_view);
  const auto target_norm = Similarity2::fit(x);
  for (auto& p : x) p = target_norm.apply(p);
  auto s5 = [&](int i1, int i2) { return area(x[i1 - 1], x[i2 - 1], x[4]); };
  struct Affine {
    double du, dv, c;
  };
  auto xi6 = [&](int i1, int i2) -> Affine {
    const Vec2& p = x[i1 - 1];
    const Vec2& q = x[i2 - 1];
    return {p.y() - q.y(), q.x() - p.x(), p.x() * q.y() - q.x() * p.y()};
  };
  const std::array<double, 5> lead = {s5(3, 4), s5(4, 2), s5(2, 3), s5(1, 2), s5(1, 3)};
  const std::array<Affine, 5> tail = {xi6(1, 2), xi6(1, 3), xi6(1, 4), xi6(3, 4), xi6(4, 2)};

  Eigen::Matrix<double, 5, 1> c_alpha, c_beta, c_gamma;
  for (int r = 0; r < 5; ++r) {
    c_alpha(r) = lead[r] * tail[r].du;
    c_beta(r) = lead[r] * tail[r].dv;
    c_gamma(r) = lead[r] * tail[r].c;
  }
  auto det_with = [&](const Eigen::Matrix<double, 5, 1>& c) {
    MatX m(5, 5);
    m.col(0) = c;
    m.rightCols(4) = a;
    return determinant(m);
  };
  CoeffTriple t{det_with(c_alpha), det_with(c_beta), det_with(c_gamma)};

  const bool degenerate = std::abs(t.alpha) <= kMinorFloor * c_alpha.norm() * col_bound &&
                          std::abs(t.beta) <= kMinorFloor * c_beta.norm() * col_bound &&
                          std::abs(t.gamma) <= kMinorFloor * c_gamma.norm() * col_bound;
  if (degenerate) throw Error(ErrorKind::DegenerateMinors, "all 5x5 determinants vanish");
  return to_pixels(t, target_norm);
}

std::array<double, 16> epipolar_polynomial(const ProjMatrix34& p, const ProjMatrix34& q) {
  const Mat34& pm = p.m;
  const Mat34& qm = q.m;
  // Bits: 1 = u, 2 = v, 4 = u', 8 = v'.
  std::array<double, 16> corner{};
  for (int mask = 0; mask < 16; ++mask) {
    const double u = mask & 1 ? 1.0 : 0.0;
    const double v = mask & 2 ? 1.0 : 0.0;
    const double up = mask & 4 ? 1.0 : 0.0;
    const double vp = mask & 8 ? 1.0 : 0.0;
    corner[mask] = det4_rows(pm.row(0) - u * pm.row(2), pm.row(1) - v * pm.row(2),
                             qm.row(0) - up * qm.row(2), qm.row(1) - vp * qm.row(2));
  }
  // Mobius inversion over the subset lattice gives the multilinear coefficients.
  std::array<double, 16> by_mask{};
  for (int s = 0; s < 16; ++s) {
    double sum = 0.0;
    for (int t = s;; t = (t - 1) & s) {
      const int parity = __builtin_popcount(static_cast<unsigned>(s ^ t)) & 1;
      sum += parity ? -corner[t] : corner[t];
      if (t == 0) break;
    }
    by_mask[s] = sum;
  }
  // Monomial order 1, u, v, u', v', uv, uu', uv', vu', vv', u'v', uvu', uvv', uu'v', vu'v', uvu'v'.
  constexpr std::array<int, 16> mask_of = {0, 1, 2, 4, 8, 3, 5, 9, 6, 10, 12, 7, 11, 13, 14, 15};
  std::array<double, 16> a{};
  for (int i = 0; i < 16; ++i) a[i] = by_mask[mask_of[i]];
  return a;
}

double vanishing_coeff_check(const ProjMatrix34& p, const ProjMatrix34& q) {
  const auto a = epipolar_polynomial(p, q);
  double top = 0.0;
  for (double c : a) top = std::max(top, std::abs(c));
  // A polynomial that is zero to round-off (e.g. P = Q) satisfies the identity.
  const double scale = p.m.squaredNorm() * q.m.squaredNorm();
  if (top <= 1e-13 * scale) return 0.0;
  double worst = std::abs(a[5]);
  for (int i = 10; i <= 15; ++i) worst = std::max(worst, std::abs(a[i]));
  return worst / top;
}

double a5_explicit_residual(const ProjMatrix34& p, const ProjMatrix34& q) {
  const auto pv = p.vec();
  const auto qv = q.vec();
  auto P = [&](int i) { return pv(i - 1); };
  auto Q = [&](int i) { return qv(i - 1); };
  struct Term {
    int a, b, c, d;
  };
  constexpr std::array<Term, 12> plus = {{{9, 10, 3, 8}, {9, 11, 4, 6}, {9, 12, 2, 7},
                                          {10, 12, 3, 5}, {10, 11, 1, 8}, {10, 9, 4, 7},
                                          {11, 9, 2, 8}, {11, 10, 4, 5}, {11, 12, 1, 6},
                                          {12, 11, 2, 5}, {12, 10, 1, 7}, {12, 9, 3, 6}}};
  constexpr std::array<Term, 12> minus = {{{9, 12, 3, 6}, {9, 11, 2, 8}, {9, 10, 4, 7},
                                           {10, 9, 3, 8}, {10, 11, 4, 5}, {10, 12, 1, 7},
                                           {11, 12, 2, 5}, {11, 10, 1, 8}, {11, 9, 4, 6},
                                           {12, 9, 2, 7}, {12, 10, 3, 5}, {12, 11, 1, 6}}};
  double sum = 0.0;
  double mag = 0.0;
  for (const auto& t : plus) {
    const double v = P(t.a) * P(t.b) * Q(t.c) * Q(t.d);
    sum += v;
    mag += std::abs(v);
  }
  for (const auto& t : minus) {
    const double v = P(t.a) * P(t.b) * Q(t.c) * Q(t.d);
    sum -= v;
    mag += std::abs(v);
  }
  return mag > 0.0 ? std::abs(sum) / mag : 0.0;
}

std::array<double, 9> epipolar_null_vector(const ProjMatrix34& p, const ProjMatrix34& q) {
  const auto a = epipolar_polynomial(p, q);
  return {a[0], a[1], a[2], a[3], a[4], a[6], a[7], a[8], a[9]};
}

std::array<double, 18> b_coefficients(std::span<const Pixel2> six) {
  if (six.size() != 6) throw Error(ErrorKind::ShapeError, "expected six points");
  // Labels 1..6; s(i1,i2,j) and s4(i1,i2,j1,j2) are the 2x2 difference determinants.
  auto s = [&](int i1, int i2, int j) { return xi(six, i1 - 1, i2 - 1, j - 1); };
  auto s4 = [&](int i1, int i2, int j1, int j2) {
    return xi_cross(six, i1 - 1, i2 - 1, j1 - 1, j2 - 1);
  };
  std::array<double, 18> b{};
  b[0] = s(3, 4, 5) * s(1, 2, 6);
  b[1] = s(4, 2, 5) * s(1, 3, 6);
  b[2] = s(2, 3, 5) * s(1, 4, 6);
  b[3] = s(3, 4, 6) * s(1, 2, 5);
  b[4] = s(4, 2, 6) * s(1, 3, 5);
  b[5] = s(2, 3, 6) * s(1, 4, 5);
  // Squared-coordinate monomials, read off the 2x2 block expansion of det(K^).
  b[6] = -s(2, 3, 6) * s4(1, 4, 4, 5);
  b[7] = s(2, 4, 6) * s4(1, 3, 3, 5);
  b[8] = -s(3, 4, 6) * s4(1, 2, 2, 5);
  b[9] = -s(2, 3, 5) * s4(1, 4, 4, 6);
  b[10] = s(2, 4, 5) * s4(1, 3, 3, 6);
  b[11] = -s(3, 4, 5) * s4(1, 2, 2, 6);
  b[12] = s(2, 4, 6) * s4(1, 3, 4, 5) - s(3, 4, 5) * s4(1, 2, 4, 6);
  b[13] = s(3, 2, 6) * s4(1, 4, 3, 5) - s(3, 4, 5) * s4(1, 2, 3, 6);
  b[14] = s(2, 4, 5) * s4(1, 3, 4, 6) - s(3, 4, 6) * s4(1, 2, 4, 5);
  b[15] = s(2, 4, 5) * s4(1, 3, 2, 6) - s(2, 3, 6) * s4(1, 4, 2, 5);
  b[16] = s(3, 2, 5) * s4(1, 4, 3, 6) - s(3, 4, 6) * s4(1, 2, 3, 5);
  b[17] = s(2, 4, 6) * s4(1, 3, 2, 5) - s(2, 3, 5) * s4(1, 4, 2, 6);
  return b;
}

double b_relation_check(std::span<const Pixel2> six) {
  const auto b = b_coefficients(six);
  double top = 0.0;
  for (double v : b) top = std::max(top, std::abs(v));
  if (top == 0.0) return 0.0;
  const std::array<double, 14> identities = {
      b[0] + b[11], b[1] + b[10], b[2] + b[9], b[3] + b[8], b[4] + b[7], b[5] + b[6],
      b[4] + b[12] + b[0],
      b[13] + b[5] + b[0], b[14] + b[3] + b[1], b[15] + b[5] + b[1], b[16] + b[3] + b[2],
      b[17] + b[4] + b[2], b[16] + b[15] + b[12], b[17] + b[14] + b[13]};
  double worst = 0.0;
  for (double r : identities) worst = std::max(worst, std::abs(r));
  return worst / top;
}

}  // namespace mvref
