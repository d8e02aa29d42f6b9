#include <cmath>

#include "helpers.hpp"
#include "mvref/pipeline.hpp"
#include "mvref/synth.hpp"

using namespace mvref;

namespace {

// Truth grid plus an estimate whose view-`view` entries sit at the given
// distances from the truth, in varying directions.
std::pair<ObservationGrid, ObservationGrid> distance_fixture(const std::vector<double>& d,
                                                             std::size_t views, std::size_t view) {
  ObservationGrid truth(d.size(), views), estimate(d.size(), views);
  for (std::size_t m = 0; m < d.size(); ++m) {
    for (std::size_t n = 0; n < views; ++n) {
      truth(m, n) = Pixel2::at(100.0 + 37.0 * m, 50.0 + 11.0 * n);
      estimate(m, n) = truth(m, n);
    }
    const double a = 0.7 * static_cast<double>(m);
    estimate(m, view) = Pixel2::from(truth(m, view).vec() + d[m] * Vec2(std::cos(a), std::sin(a)));
  }
  return {estimate, truth};
}

}  // namespace

TEST_CASE("image errors reproduce the worked averages") {
  const auto [e1, t1] = distance_fixture({48.54, 43.43, 32.20, 33.36, 53.60, 129.02, 28.45}, 3, 1);
  const auto r1 = compute_errors(e1, t1);
  CHECK(std::abs(r1.image_errors[1] - 52.66) <= 0.01);
  CHECK(r1.image_errors[0] == 0.0);

  const auto [e2, t2] =
      distance_fixture({36.02, 38.35, 76.00, 150.83, 45.81, 31.00, 48.62, 43.65, 102.86}, 20, 18);
  const auto r2 = compute_errors(e2, t2);
  CHECK(std::abs(r2.image_errors[18] - 63.68) <= 0.01);
  CHECK(std::abs(mean_error(std::vector<double>{36.02, 38.35, 76.00, 150.83, 45.81, 31.00, 48.62,
                                                43.65, 102.86}) -
                 63.68) <= 0.01);
}

TEST_CASE("compute_errors counts, means, histogram and median") {
  const auto [e, t] = distance_fixture({5.0, 15.0, 15.0, 25.0}, 2, 0);
  const auto r = compute_errors(e, t);
  CHECK(r.count == 8);
  CHECK(r.correspondence_error == doctest::Approx(60.0 / 8.0));
  CHECK(r.median_error == doctest::Approx(2.5));
  CHECK(r.image_counts == std::vector<std::size_t>{4, 4});
  REQUIRE(r.histogram.size() == 3);
  CHECK(r.histogram[0].count == 5);
  CHECK(r.histogram[1].count == 2);
  CHECK(r.histogram[2].count == 1);
  CHECK(r.histogram[2].lower == 20.0);
  CHECK(r.point_errors.size() == r.evaluated.size());
}

TEST_CASE("compute_errors evaluates only entries observed in both grids") {
  auto [e, t] = distance_fixture({5.0, 15.0, 25.0}, 2, 0);
  e(0, 0) = Pixel2::missing();
  t(2, 0) = Pixel2::missing();
  t(0, 1) = Pixel2::missing();
  t(1, 1) = Pixel2::missing();
  t(2, 1) = Pixel2::missing();
  const auto r = compute_errors(e, t);
  CHECK(r.count == 1);
  CHECK(r.correspondence_error == doctest::Approx(15.0));
  CHECK(std::isnan(r.image_errors[1]));
  CHECK(r.image_counts[1] == 0);
}

TEST_CASE("compute_errors is symmetric and zero on identical grids") {
  const Scene s = generate_scene(10, 4, 51);
  CorruptionSpec spec;
  spec.sigma = 7.0;
  spec.seed = 2;
  const auto noisy = corrupt(s.grid, spec).grid;
  CHECK(compute_errors(noisy, s.grid).point_errors == compute_errors(s.grid, noisy).point_errors);
  const auto zero = compute_errors(s.grid, s.grid);
  CHECK(zero.correspondence_error == 0.0);
  for (double x : zero.point_errors) CHECK(x == 0.0);
  CHECK_KIND(compute_errors(s.grid, ObservationGrid(10, 5)), ErrorKind::ShapeMismatch);
}

TEST_CASE("default configuration and validation") {
  RefineConfig c;
  CHECK(c.kappa == 3);
  CHECK(c.thresholds == std::vector<double>{60.0, 40.0, 20.0});
  CHECK(c.inner_iters == 10);
  CHECK_NOTHROW(c.validate());

  RefineConfig bad = c;
  bad.kappa = 2;
  CHECK_KIND(bad.validate(), ErrorKind::InvalidArgument);
  bad = c;
  bad.thresholds = {40.0, 60.0, 20.0};
  CHECK_KIND(bad.validate(), ErrorKind::InvalidArgument);
  bad = c;
  bad.thresholds = {60.0, 40.0, -1.0};
  CHECK_KIND(bad.validate(), ErrorKind::InvalidArgument);
  bad = c;
  bad.inner_iters = 0;
  CHECK_KIND(bad.validate(), ErrorKind::InvalidArgument);
}

TEST_CASE("main_refine on exact data changes nothing and flags nothing") {
  const Scene s = generate_scene(12, 6, 52);
  const auto r = main_refine(s.grid, {}, &s.grid);
  REQUIRE(r.stages.size() == 3);
  for (const auto& st : r.stages) {
    CHECK(st.outliers.empty());
    REQUIRE(st.errors.has_value());
    CHECK(st.errors->correspondence_error < 1e-6);
  }
  CHECK(compute_errors(r.grid, s.grid).point_errors.size() == 72);
  for (double e : compute_errors(r.grid, s.grid).point_errors) CHECK(e < 1e-6);
}

TEST_CASE("main_refine with no stages is the identity") {
  const Scene s = generate_scene(12, 6, 53);
  CorruptionSpec spec;
  spec.sigma = 10.0;
  spec.seed = 1;
  const auto noisy = corrupt(s.grid, spec).grid;
  RefineConfig c;
  c.kappa = 0;
  c.thresholds = {};
  const auto r = main_refine(noisy, c);
  CHECK(r.grid == noisy);
  CHECK(r.stages.empty());
}

TEST_CASE("main_refine is deterministic and reports stage context on failure") {
  const Scene s = generate_scene(12, 6, 54);
  CorruptionSpec spec;
  spec.sigma = 10.0;
  spec.outlier_rate = 0.05;
  spec.seed = 3;
  const auto noisy = corrupt(s.grid, spec).grid;
  RefineConfig c;
  c.seed = 5;
  CHECK(main_refine(noisy, c).grid == main_refine(noisy, c).grid);
  RefineConfig threaded = c;
  threaded.threads = 3;
  CHECK(main_refine(noisy, threaded).grid == main_refine(noisy, c).grid);

  const Scene tiny = generate_scene(5, 2, 1);
  try {
    main_refine(tiny.grid, {});
    FAIL("expected NoUsablePairs");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoUsablePairs);
    CHECK(std::string(e.what()).find("stage 1") != std::string::npos);
  }
}
