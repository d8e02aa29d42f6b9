#include "mvref/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "mvref/random.hpp"

namespace mvref {
namespace {

Vec3 random_direction(Rng& rng) {
  Vec3 d;
  do {
    d = Vec3(rng.normal(), rng.normal(), rng.normal());
  } while (d.norm() < 1e-6);
  return d.normalized();
}

ProjMatrix34 look_at_camera(const Vec3& target, double distance, double image_size, double fill,
                            const std::vector<Point3>& pts, Rng& rng) {
  const Vec3 center = target + distance * random_direction(rng);
  const Vec3 z = (target - center).normalized();
  Vec3 up = random_direction(rng);
  while (std::abs(up.dot(z)) > 0.95) up = random_direction(rng);
  const Vec3 x = up.cross(z).normalized();
  const Vec3 y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  // Focal length puts the farthest point at `fill` of the half-width.
  double spread = 1e-9;
  for (const auto& p : pts) {
    const Vec3 c = r * (p - center);
    if (c.z() <= 0.0) return ProjMatrix34();
    spread = std::max({spread, std::abs(c.x() / c.z()), std::abs(c.y() / c.z())});
  }
  const double f = fill * 0.5 * image_size / spread;
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = f;
  k(1, 1) = f;
  k(0, 2) = 0.5 * image_size;
  k(1, 2) = 0.5 * image_size;
  Mat34 rt;
  rt.leftCols<3>() = r;
  rt.col(3) = -r * center;
  return ProjMatrix34(k * rt);
}

bool sees_all(const ProjMatrix34& cam, const std::vector<Point3>& pts, double w, double h) {
  if (cam.m.isZero()) return false;
  for (const auto& x : pts) {
    const Vec3 hx = cam.m * Vec4(x.x(), x.y(), x.z(), 1.0);
    if (hx.z() <= 0.0) return false;
    const double u = hx.x() / hx.z();
    const double v = hx.y() / hx.z();
    if (u < 0.0 || u > w || v < 0.0 || v > h) return false;
  }
  return true;
}

std::vector<std::size_t> choose(std::size_t n, std::size_t k, Rng& rng) {
  if (k == 0 || n == 0) return {};
  k = std::min(k, n);
  // Partial Fisher-Yates, then ascending for a deterministic application order.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

Scene generate_scene(std::size_t num_points, std::size_t num_views, std::uint64_t seed,
                     const SceneOptions& options) {
  if (num_points == 0 || num_views == 0) {
    throw Error(ErrorKind::InvalidArgument, "scene needs at least one point and one view");
  }
  Rng rng(mix_seed(seed, {0x5CE4E}));
  Scene scene;
  scene.width = options.image_size;
  scene.height = options.image_size;
  scene.points.reserve(num_points);
  for (std::size_t m = 0; m < num_points; ++m) {
    scene.points.emplace_back(rng.uniform(), rng.uniform(), rng.uniform());
  }
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : scene.points) centroid += p;
  centroid /= static_cast<double>(num_points);
  double half_extent = 0.0;
  for (const auto& p : scene.points) half_extent = std::max(half_extent, (p - centroid).norm());
  half_extent = std::max(half_extent, 1e-3);

  int attempts = 0;
  while (scene.cameras.size() < num_views) {
    if (attempts++ >= options.max_attempts) {
      throw Error(ErrorKind::GenerationFailure, "could not place all points in all views");
    }
    const double distance = rng.uniform(options.min_radius, options.max_radius);
    if (distance <= half_extent * 1.05) continue;
    ProjMatrix34 cam = look_at_camera(centroid, distance, options.image_size, options.fill,
                                      scene.points, rng);
    if (sees_all(cam, scene.points, scene.width, scene.height)) scene.cameras.push_back(cam);
  }

  scene.grid = ObservationGrid(num_points, num_views);
  for (std::size_t m = 0; m < num_points; ++m)
    for (std::size_t n = 0; n < num_views; ++n) scene.grid(m, n) = project(scene.cameras[n], scene.points[m]);
  return scene;
}

Corruption corrupt(const ObservationGrid& grid, const CorruptionSpec& spec) {
  if (spec.sigma < 0.0 || spec.outlier_rate < 0.0 || spec.outlier_rate > 1.0 ||
      spec.missing_rate < 0.0 || spec.missing_rate > 1.0 || spec.outlier_min > spec.outlier_max) {
    throw Error(ErrorKind::InvalidArgument, "invalid corruption parameters");
  }
  Corruption out;
  out.grid = grid;
  std::vector<ImageIndex> observed;
  for (std::size_t m = 0; m < grid.num_points(); ++m)
    for (std::size_t n = 0; n < grid.num_views(); ++n)
      if (grid.observed(m, n)) observed.push_back({n, m});

  Rng noise_rng(mix_seed(spec.seed, {1}));
  if (spec.sigma > 0.0) {
    for (const auto& idx : observed) {
      Pixel2& p = out.grid.at(idx);
      p.u += spec.sigma * noise_rng.normal();
      p.v += spec.sigma * noise_rng.normal();
    }
  }

  Rng outlier_rng(mix_seed(spec.seed, {2}));
  const auto outlier_count =
      static_cast<std::size_t>(std::llround(spec.outlier_rate * static_cast<double>(observed.size())));
  std::vector<ImageIndex> injected;
  for (std::size_t k : choose(observed.size(), outlier_count, outlier_rng)) {
    const double magnitude = outlier_rng.uniform(spec.outlier_min, spec.outlier_max);
    const double angle = outlier_rng.uniform(0.0, 2.0 * std::numbers::pi);
    Pixel2& p = out.grid.at(observed[k]);
    p.u += magnitude * std::cos(angle);
    p.v += magnitude * std::sin(angle);
    injected.push_back(observed[k]);
  }

  const double lo_u = -0.1 * spec.width, hi_u = 1.1 * spec.width;
  const double lo_v = -0.1 * spec.height, hi_v = 1.1 * spec.height;
  for (const auto& idx : observed) {
    Pixel2& p = out.grid.at(idx);
    const double u = std::clamp(p.u, lo_u, hi_u);
    const double v = std::clamp(p.v, lo_v, hi_v);
    if (u != p.u || v != p.v) ++out.clamped;
    p.u = u;
    p.v = v;
  }

  Rng missing_rng(mix_seed(spec.seed, {3}));
  const auto missing_count =
      static_cast<std::size_t>(std::llround(spec.missing_rate * static_cast<double>(observed.size())));
  for (std::size_t k : choose(observed.size(), missing_count, missing_rng)) {
    out.grid.at(observed[k]) = Pixel2::missing();
  }
  for (const auto& idx : injected) {
    if (out.grid.at(idx).observed) out.outliers.push_back(idx);
  }
  std::sort(out.outliers.begin(), out.outliers.end());
  return out;
}

double sigma_for_mean_error(double mean_error) {
  return mean_error / std::sqrt(std::numbers::pi / 2.0);
}

}  // namespace mvref
