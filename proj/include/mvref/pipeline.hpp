#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mvref/outliers.hpp"
#include "mvref/selfest.hpp"

namespace mvref {

struct RefineConfig {
  std::vector<double> thresholds = {60.0, 40.0, 20.0};
  int kappa = 3;
  int inner_iters = 10;
  std::size_t two_view_cap = 100;
  std::size_t multi_view_cap = 100;
  std::uint64_t seed = 0;
  /// Also re-estimate entries that were missing in the input.
  bool recover_missing = true;
  unsigned threads = 1;

  /// Throws InvalidArgument unless kappa == thresholds.size(), thresholds are
  /// positive and strictly decreasing, and the counts are positive.
  void validate() const;
};

struct HistogramBin {
  double lower = 0.0;
  std::size_t count = 0;
};

struct ErrorReport {
  std::vector<double> point_errors;      ///< evaluated entries, view-major
  std::vector<ImageIndex> evaluated;     ///< index of each point error
  std::vector<double> image_errors;      ///< per view; NaN when a view has no entries
  std::vector<std::size_t> image_counts;
  double correspondence_error = 0.0;
  double median_error = 0.0;
  std::size_t count = 0;
  std::vector<HistogramBin> histogram;   ///< 10 px bins from 0
};

/// Distances between entries observed in both grids. Throws ShapeMismatch.
ErrorReport compute_errors(const ObservationGrid& estimate, const ObservationGrid& truth);

/// Mean of a list of point errors, as the per-view image error.
double mean_error(std::span<const double> point_errors);

struct StageDiagnostics {
  double theta = 0.0;
  OutlierSet outliers;
  int sweeps = 0;
  bool hit_sweep_cap = false;
  bool truncated = false;
  std::vector<ImageIndex> unrecoverable;
  ObservationGrid snapshot;          ///< grid after the stage
  std::optional<ErrorReport> errors; ///< when a truth grid is supplied
};

struct RefineResult {
  ObservationGrid grid;
  std::vector<StageDiagnostics> stages;
};

/// Per stage: recognize outliers at theta_i, self-estimate them (and the
/// input's missing entries when recover_missing), then refine_all.
RefineResult main_refine(const ObservationGrid& grid, const RefineConfig& config,
                         const ObservationGrid* truth = nullptr);

}  // namespace mvref
