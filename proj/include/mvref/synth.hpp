#pragma once

#include <cstdint>
#include <vector>

#include "mvref/geometry.hpp"
#include "mvref/grid.hpp"

namespace mvref {

struct Scene {
  std::vector<Point3> points;
  std::vector<ProjMatrix34> cameras;
  double width = 3024.0;
  double height = 3024.0;
  ObservationGrid grid;  ///< exact projections, all observed
};

struct SceneOptions {
  double image_size = 3024.0;
  double min_radius = 3.0;
  double max_radius = 5.0;
  double fill = 0.9;  ///< farthest projection as a fraction of the image half-width
  int max_attempts = 1000;
};

/// Points uniform in the unit cube; pinhole cameras on a sphere of radius
/// [min_radius, max_radius] around the cube centroid, looking at it, with the
/// principal point at the image center and a focal length that keeps the
/// whole cube inside the frame.
Scene generate_scene(std::size_t num_points, std::size_t num_views, std::uint64_t seed,
                     const SceneOptions& options = {});

struct CorruptionSpec {
  double sigma = 0.0;           ///< per-axis Gaussian noise, pixels
  double outlier_rate = 0.0;    ///< fraction of observed entries displaced
  double outlier_min = 150.0;   ///< displacement magnitude range, pixels
  double outlier_max = 300.0;
  double missing_rate = 0.0;    ///< fraction of observed entries dropped
  std::uint64_t seed = 0;
  double width = 3024.0;        ///< image bounds for clamping
  double height = 3024.0;
};

struct Corruption {
  ObservationGrid grid;
  std::vector<ImageIndex> outliers;  ///< injected displacements still observed
  std::size_t clamped = 0;
};

Corruption corrupt(const ObservationGrid& grid, const CorruptionSpec& spec);

/// Per-axis sigma whose isotropic 2-D Gaussian has the given mean norm
/// (mean |N(0, s^2 I)| = s sqrt(pi / 2)).
double sigma_for_mean_error(double mean_error);

}  // namespace mvref
