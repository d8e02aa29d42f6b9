#include <cmath>
#include <limits>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mvref/constraints.hpp"
#include "mvref/io.hpp"
#include "mvref/outliers.hpp"
#include "mvref/pipeline.hpp"
#include "mvref/selfest.hpp"
#include "mvref/synth.hpp"

namespace py = pybind11;
using namespace mvref;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Grids cross the boundary as (points, views, 2) arrays with NaN for missing.
ObservationGrid to_grid(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 2) throw Error(ErrorKind::ShapeError, "grid must have shape (points, views, 2)");
  const auto r = a.unchecked<3>();
  ObservationGrid g(static_cast<std::size_t>(r.shape(0)), static_cast<std::size_t>(r.shape(1)));
  for (py::ssize_t m = 0; m < r.shape(0); ++m)
    for (py::ssize_t n = 0; n < r.shape(1); ++n)
      if (std::isfinite(r(m, n, 0)) && std::isfinite(r(m, n, 1)))
        g(static_cast<std::size_t>(m), static_cast<std::size_t>(n)) = Pixel2::at(r(m, n, 0), r(m, n, 1));
  return g;
}

Array from_grid(const ObservationGrid& g) {
  Array a({static_cast<py::ssize_t>(g.num_points()), static_cast<py::ssize_t>(g.num_views()), py::ssize_t{2}});
  auto w = a.mutable_unchecked<3>();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t m = 0; m < g.num_points(); ++m) {
    for (std::size_t n = 0; n < g.num_views(); ++n) {
      const Pixel2& p = g(m, n);
      w(m, n, 0) = p.observed ? p.u : nan;
      w(m, n, 1) = p.observed ? p.v : nan;
    }
  }
  return a;
}

std::vector<Pixel2> to_pixels(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw Error(ErrorKind::ShapeError, "points must have shape (k, 2)");
  const auto r = a.unchecked<2>();
  std::vector<Pixel2> out;
  for (py::ssize_t i = 0; i < r.shape(0); ++i) out.push_back(Pixel2::at(r(i, 0), r(i, 1)));
  return out;
}

py::list index_list(const auto& items) {
  py::list out;
  for (const ImageIndex& i : items) out.append(py::make_tuple(i.point, i.view));
  return out;
}

std::vector<ImageIndex> to_indices(const std::vector<std::pair<std::size_t, std::size_t>>& items) {
  std::vector<ImageIndex> out;
  for (const auto& [point, view] : items) out.push_back({view, point});
  return out;
}

py::dict error_dict(const ErrorReport& r) {
  py::dict d;
  d["correspondence_error"] = r.correspondence_error;
  d["median_error"] = r.median_error;
  d["count"] = r.count;
  d["image_errors"] = r.image_errors;
  d["image_counts"] = r.image_counts;
  d["point_errors"] = r.point_errors;
  d["evaluated"] = index_list(r.evaluated);
  py::list hist;
  for (const auto& b : r.histogram) hist.append(py::make_tuple(b.lower, b.count));
  d["histogram"] = hist;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Correspondence refinement from two-view and multi-view rank constraints";

  static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  m.def("generate_scene", [](std::size_t points, std::size_t views, std::uint64_t seed, double image_size) {
    SceneOptions so;
    so.image_size = image_size;
    const Scene s = generate_scene(points, views, seed, so);
    py::list cams;
    for (const auto& c : s.cameras) cams.append(py::cast(Eigen::MatrixXd(c.m)));
    py::list pts;
    for (const auto& x : s.points) pts.append(py::make_tuple(x.x(), x.y(), x.z()));
    py::dict d;
    d["grid"] = from_grid(s.grid);
    d["cameras"] = cams;
    d["points"] = pts;
    return d;
  }, py::arg("points"), py::arg("views"), py::arg("seed") = 0, py::arg("image_size") = 3024.0);

  m.def("corrupt", [](const Array& grid, double sigma, double outlier_rate, double outlier_min,
                      double outlier_max, double missing_rate, std::uint64_t seed, double image_size) {
    CorruptionSpec spec;
    spec.sigma = sigma;
    spec.outlier_rate = outlier_rate;
    spec.outlier_min = outlier_min;
    spec.outlier_max = outlier_max;
    spec.missing_rate = missing_rate;
    spec.seed = seed;
    spec.width = spec.height = image_size;
    const auto c = corrupt(to_grid(grid), spec);
    return py::make_tuple(from_grid(c.grid), index_list(c.outliers));
  }, py::arg("grid"), py::arg("sigma") = 0.0, py::arg("outlier_rate") = 0.0, py::arg("outlier_min") = 150.0,
     py::arg("outlier_max") = 300.0, py::arg("missing_rate") = 0.0, py::arg("seed") = 0,
     py::arg("image_size") = 3024.0, "Returns (noisy grid, [(point, view), ...] outliers).");

  m.def("sigma_for_mean_error", &sigma_for_mean_error);

  m.def("refine_all", [](const Array& grid, int inner_iters, unsigned threads) {
    RefineOptions o;
    o.inner_iters = inner_iters;
    o.threads = threads;
    return from_grid(refine_all(to_grid(grid), o));
  }, py::arg("grid"), py::arg("inner_iters") = 10, py::arg("threads") = 1);

  m.def("recognize_outliers", [](const Array& grid, double theta, int inner_iters) {
    OutlierOptions o;
    o.refine.inner_iters = inner_iters;
    const auto r = recognize_outliers(to_grid(grid), theta, o);
    return py::make_tuple(index_list(r.outliers), from_grid(r.working));
  }, py::arg("grid"), py::arg("theta"), py::arg("inner_iters") = 10,
     "Returns (flagged [(point, view), ...], grid with flagged entries missing).");

  m.def("self_estimate", [](const Array& grid, const std::vector<std::pair<std::size_t, std::size_t>>& targets,
                            std::uint64_t seed) {
    SelfEstimateOptions o;
    o.seed = seed;
    const auto r = self_estimate(to_grid(grid), to_indices(targets), o);
    return py::make_tuple(from_grid(r.grid), index_list(r.report.unrecoverable));
  }, py::arg("grid"), py::arg("targets"), py::arg("seed") = 0,
     "Targets are (point, view) pairs. Returns (grid, unrecoverable targets).");

  m.def("main_refine", [](const Array& grid, std::vector<double> thresholds, int inner_iters, std::uint64_t seed,
                          bool recover_missing, unsigned threads) {
    RefineConfig c;
    c.kappa = static_cast<int>(thresholds.size());
    c.thresholds = std::move(thresholds);
    c.inner_iters = inner_iters;
    c.seed = seed;
    c.recover_missing = recover_missing;
    c.threads = threads;
    const auto r = main_refine(to_grid(grid), c);
    py::list stages;
    for (const auto& st : r.stages) {
      py::dict d;
      d["theta"] = st.theta;
      d["outliers"] = index_list(st.outliers);
      d["unrecoverable"] = index_list(st.unrecoverable);
      d["sweeps"] = st.sweeps;
      stages.append(d);
    }
    return py::make_tuple(from_grid(r.grid), stages);
  }, py::arg("grid"), py::arg("thresholds") = std::vector<double>{60.0, 40.0, 20.0}, py::arg("inner_iters") = 10,
     py::arg("seed") = 0, py::arg("recover_missing") = true, py::arg("threads") = 1);

  m.def("compute_errors", [](const Array& estimate, const Array& truth) {
    return error_dict(compute_errors(to_grid(estimate), to_grid(truth)));
  }, py::arg("estimate"), py::arg("truth"));

  m.def("gamma_rank_residual", [](const Array& first, const Array& second) {
    return gamma_rank_residual(to_pixels(first), to_pixels(second));
  }, py::arg("first"), py::arg("second"));

  m.def("lambda_rank_residual", [](const Array& grid, const std::array<std::size_t, 6>& points,
                                   const std::vector<std::size_t>& views) {
    return lambda_rank_residual(to_grid(grid), points, views);
  }, py::arg("grid"), py::arg("points"), py::arg("views"));

  m.def("read_correspondences", [](const std::string& path) { return from_grid(read_correspondences_file(path)); });
  m.def("write_correspondences", [](const std::string& path, const Array& grid) {
    write_correspondences_file(path, to_grid(grid));
  });
}
