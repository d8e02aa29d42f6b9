#include "mvref/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvref {

void RefineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  if (kappa < 0) fail("kappa must be non-negative");
  if (static_cast<std::size_t>(kappa) != thresholds.size()) {
    fail("kappa must equal the number of thresholds");
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0) || !std::isfinite(thresholds[i])) fail("thresholds must be positive");
    if (i > 0 && !(thresholds[i] < thresholds[i - 1])) fail("thresholds must strictly decrease");
  }
  if (inner_iters < 1) fail("inner iterations must be positive");
  if (two_view_cap == 0 || multi_view_cap == 0) fail("subset caps must be positive");
}

double mean_error(std::span<const double> point_errors) {
  if (point_errors.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double e : point_errors) sum += e;
  return sum / static_cast<double>(point_errors.size());
}

ErrorReport compute_errors(const ObservationGrid& estimate, const ObservationGrid& truth) {
  if (!estimate.same_shape(truth)) {
    throw Error(ErrorKind::ShapeMismatch,
                "grids differ in shape: " + std::to_string(estimate.num_points()) + "x" +
                    std::to_string(estimate.num_views()) + " vs " +
                    std::to_string(truth.num_points()) + "x" + std::to_string(truth.num_views()));
  }
  ErrorReport r;
  const std::size_t views = truth.num_views();
  r.image_errors.assign(views, 0.0);
  r.image_counts.assign(views, 0);
  for (std::size_t n = 0; n < views; ++n) {
    std::vector<double> per_view;
    for (std::size_t m = 0; m < truth.num_points(); ++m) {
      if (!estimate.observed(m, n) || !truth.observed(m, n)) continue;
      const double e = (estimate(m, n).vec() - truth(m, n).vec()).norm();
      per_view.push_back(e);
      r.point_errors.push_back(e);
      r.evaluated.push_back({n, m});
    }
    r.image_errors[n] = mean_error(per_view);
    r.image_counts[n] = per_view.size();
  }
  r.count = r.point_errors.size();
  if (r.count == 0) return r;
  r.correspondence_error = mean_error(r.point_errors);

  std::vector<double> sorted = r.point_errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  r.median_error = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  constexpr double kBin = 10.0;
  const auto bins = static_cast<std::size_t>(std::floor(sorted.back() / kBin)) + 1;
  r.histogram.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) r.histogram[b].lower = kBin * static_cast<double>(b);
  for (double e : r.point_errors) ++r.histogram[static_cast<std::size_t>(std::floor(e / kBin))].count;
  return r;
}

RefineResult main_refine(const ObservationGrid& grid, const RefineConfig& config,
                         const ObservationGrid* truth) {
  config.validate();
  if (truth && !truth->same_shape(grid)) {
    throw Error(ErrorKind::ShapeMismatch, "truth grid differs in shape from the input");
  }
  std::vector<ImageIndex> originally_missing;
  if (config.recover_missing) {
    for (std::size_t n = 0; n < grid.num_views(); ++n)
      for (std::size_t m = 0; m < grid.num_points(); ++m)
        if (!grid.observed(m, n)) originally_missing.push_back({n, m});
  }

  OutlierOptions outlier_options;
  outlier_options.refine.inner_iters = config.inner_iters;
  outlier_options.refine.threads = config.threads;

  RefineResult out{grid, {}};
  for (int stage = 0; stage < config.kappa; ++stage) {
    StageDiagnostics diag;
    diag.theta = config.thresholds[static_cast<std::size_t>(stage)];
    try {
      OutlierResult found = recognize_outliers(out.grid, diag.theta, outlier_options);
      diag.outliers = found.outliers;
      diag.sweeps = found.sweeps;
      diag.hit_sweep_cap = found.hit_sweep_cap;
      diag.truncated = found.truncated;

      std::vector<ImageIndex> targets = found.outliers.items();
      for (const auto& idx : originally_missing) {
        if (!diag.outliers.contains(idx) && !found.working.observed(idx.point, idx.view))
          targets.push_back(idx);
      }
      SelfEstimateOptions est;
      est.seed = mix_seed(config.seed, {static_cast<std::uint64_t>(stage)});
      est.two_view_cap = config.two_view_cap;
      est.multi_view_cap = config.multi_view_cap;
      SelfEstimateResult estimated = self_estimate(found.working, targets, est);
      diag.unrecoverable = estimated.report.unrecoverable;

      out.grid = refine_all(estimated.grid, outlier_options.refine);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoUsablePairs) throw;
      throw Error(ErrorKind::NoUsablePairs,
                  "stage " + std::to_string(stage + 1) + " (theta " + std::to_string(diag.theta) +
                      "): " + e.what());
    }
    diag.snapshot = out.grid;
    if (truth) diag.errors = compute_errors(out.grid, *truth);
    out.stages.push_back(std::move(diag));
  }
  return out;
}

}  // namespace mvref
