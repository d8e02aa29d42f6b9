#include <cmath>

#include <Eigen/Geometry>

#include "helpers.hpp"
#include "mvref/geometry.hpp"

using namespace mvref;
using testutil::random_camera;
using testutil::random_point;

namespace {

ProjMatrix34 canonical_camera() {
  Mat34 m = Mat34::Zero();
  m.leftCols<3>() = Eigen::Matrix3d::Identity();
  return ProjMatrix34(m);
}

// Residuals of u*(row3.X) - row1.X and v*(row3.X) - row2.X, relative.
double projection_residual(const ProjMatrix34& p, const Point3& x, const Pixel2& px) {
  const Vec4 h(x.x(), x.y(), x.z(), 1.0);
  const double w = p.m.row(2).dot(h);
  const double r1 = px.u * w - p.m.row(0).dot(h);
  const double r2 = px.v * w - p.m.row(1).dot(h);
  const double scale = p.m.norm() * h.norm();
  return std::max(std::abs(r1), std::abs(r2)) / scale;
}

}  // namespace

TEST_CASE("project on the canonical camera") {
  const auto p = project(canonical_camera(), {0, 0, 1});
  CHECK(p.observed);
  CHECK(p.u == doctest::Approx(0.0));
  CHECK(p.v == doctest::Approx(0.0));
  const auto q = project(canonical_camera(), {2, 4, 2});
  CHECK(q.u == doctest::Approx(1.0));
  CHECK(q.v == doctest::Approx(2.0));
}

TEST_CASE("project satisfies the projection equations") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    ProjMatrix34 p(random_camera(rng));
    const Point3 x = random_point(rng);
    Pixel2 px;
    try {
      px = project(p, x);
    } catch (const Error&) {
      continue;
    }
    CHECK(projection_residual(p, x, px) < 1e-9);
  }
}

TEST_CASE("project rejects points at infinity") {
  Mat34 m = Mat34::Zero();
  m.leftCols<3>() = Eigen::Matrix3d::Identity();
  CHECK_KIND(project(ProjMatrix34(m), {1, 1, 0}), ErrorKind::PointAtInfinity);
}

TEST_CASE("apply_transform identity and scale") {
  Rng rng(3);
  const ProjMatrix34 p(random_camera(rng));
  const Point3 x(0.3, -0.2, 0.5);
  auto same = apply_transform(Homography4{}, x, p);
  CHECK((same.point - x).norm() < 1e-12);
  CHECK(same.camera.equivalent(p));

  Homography4 twice{2.0 * Mat4::Identity()};
  auto scaled = apply_transform(twice, x, p);
  CHECK((scaled.point - x).norm() < 1e-12);
  CHECK((scaled.camera.m - p.m / 2.0).norm() < 1e-12);
  const auto a = project(p, x), b = project(scaled.camera, scaled.point);
  CHECK((a.vec() - b.vec()).norm() < 1e-9);
}

TEST_CASE("apply_transform preserves projections under random transforms") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    Homography4 h;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) h.m(r, c) = rng.uniform(-1, 1);
    h.m += 2.0 * Mat4::Identity();
    const ProjMatrix34 p(random_camera(rng));
    double drift = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Point3 x = random_point(rng, -0.3, 0.3);
      try {
        const auto before = project(p, x);
        const auto moved = apply_transform(h, x, p);
        const auto after = project(moved.camera, moved.point);
        drift = std::max(drift, (before.vec() - after.vec()).norm() / (1.0 + before.vec().norm()));
      } catch (const Error&) {
      }
    }
    CHECK(drift < 1e-9);
  }
}

TEST_CASE("apply_transform errors") {
  Homography4 singular{Mat4::Zero()};
  singular.m(0, 0) = 1.0;
  CHECK_KIND(apply_transform(singular, {1, 2, 3}, canonical_camera()), ErrorKind::SingularTransform);
  Homography4 h;
  h.m.row(3) << 1.0, 0.0, 0.0, 0.0;
  h.m(3, 3) = 0.0;
  h.m(0, 3) = 1.0;
  h.m(0, 0) = 0.0;
  CHECK_KIND(apply_transform(h, {0, 2, 3}, canonical_camera()), ErrorKind::PointAtInfinity);
}

TEST_CASE("DLT recovers a camera from exact projections") {
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    Mat34 m = random_camera(rng);
    m(2, 3) = 3.0;  // keep the points in front
    const ProjMatrix34 p(m);
    std::vector<Point3> world;
    std::vector<Pixel2> image;
    for (int i = 0; i < 8; ++i) {
      world.push_back(random_point(rng));
      image.push_back(project(p, world.back()));
    }
    CHECK(estimate_projection_dlt(world, image).abs_cosine(p) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("DLT preconditions") {
  Rng rng(2);
  const ProjMatrix34 p(random_camera(rng));
  std::vector<Point3> world;
  std::vector<Pixel2> image;
  for (int i = 0; i < 5; ++i) {
    world.push_back(random_point(rng));
    image.push_back(Pixel2::at(rng.uniform(), rng.uniform()));
  }
  CHECK_KIND(estimate_projection_dlt(world, image), ErrorKind::InsufficientPoints);

  Mat34 m = Mat34::Zero();
  m.leftCols<3>() = Eigen::Matrix3d::Identity();
  m(2, 3) = 4.0;
  const ProjMatrix34 cam(m);
  world.clear();
  image.clear();
  for (int i = 0; i < 8; ++i) {
    world.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0);
    image.push_back(project(cam, world.back()));
  }
  CHECK_KIND(estimate_projection_dlt(world, image), ErrorKind::DegenerateConfiguration);
}

TEST_CASE("triangulate round trips") {
  Rng rng(8);
  const Point3 x(1, 2, 3);
  std::vector<ProjMatrix34> cams;
  std::vector<Pixel2> pts;
  for (int n = 0; n < 5; ++n) {
    Mat34 m = random_camera(rng);
    m(2, 3) = 10.0;
    cams.emplace_back(m);
    pts.push_back(project(cams.back(), x));
  }
  CHECK((triangulate(std::span(cams).first(2), std::span(pts).first(2)) - x).norm() < 1e-8);
  CHECK((triangulate(cams, pts) - x).norm() < 1e-9);
  CHECK_KIND(triangulate(std::span(cams).first(1), std::span(pts).first(1)), ErrorKind::InsufficientViews);
}

TEST_CASE("camera centers") {
  CHECK(camera_center(canonical_camera()).norm() < 1e-12);

  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const Vec3 t(0.5, -1.0, 2.0);
  Mat34 m;
  m.leftCols<3>() = r;
  m.col(3) = -r * t;
  CHECK((camera_center(ProjMatrix34(m)) - t).norm() < 1e-12);

  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const ProjMatrix34 p(random_camera(rng));
    const Point3 c = camera_center(p);
    CHECK((p.m * Vec4(c.x(), c.y(), c.z(), 1.0)).norm() < 1e-10 * p.m.norm() * (1.0 + c.norm()));
  }

  Mat34 affine = Mat34::Zero();
  affine(0, 0) = 1;
  affine(1, 1) = 1;
  affine(2, 3) = 1;
  CHECK_KIND(camera_center(ProjMatrix34(affine)), ErrorKind::CenterAtInfinity);
}

TEST_CASE("projection matrix equivalence is up to scale and sign") {
  Rng rng(9);
  const ProjMatrix34 p(random_camera(rng));
  CHECK(p.equivalent(ProjMatrix34(-3.5 * p.m)));
  CHECK_FALSE(p.equivalent(ProjMatrix34(random_camera(rng))));
}
