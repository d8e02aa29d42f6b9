#pragma once

#include <cstddef>
#include <vector>

#include "mvref/common.hpp"

namespace mvref {

using Point3 = Vec3;

/// An image point in pixels. A missing point carries observed == false and
/// serializes as (-1, -1).
struct Pixel2 {
  double u = -1.0;
  double v = -1.0;
  bool observed = false;

  static Pixel2 at(double u, double v) { return {u, v, true}; }
  static Pixel2 missing() { return {}; }
  static Pixel2 from(const Vec2& x) { return {x.x(), x.y(), true}; }

  Vec2 vec() const { return {u, v}; }
  bool operator==(const Pixel2&) const = default;
};

/// Zero-based (view, point) address of one image point.
struct ImageIndex {
  std::size_t view = 0;
  std::size_t point = 0;
  auto operator<=>(const ImageIndex&) const = default;
};

/// M points x N views of optional image points.
class ObservationGrid {
 public:
  ObservationGrid() = default;
  ObservationGrid(std::size_t num_points, std::size_t num_views)
      : num_points_(num_points),
        num_views_(num_views),
        cells_(num_points * num_views) {}

  std::size_t num_points() const { return num_points_; }
  std::size_t num_views() const { return num_views_; }

  const Pixel2& operator()(std::size_t point, std::size_t view) const {
    return cells_[point * num_views_ + view];
  }
  Pixel2& operator()(std::size_t point, std::size_t view) {
    return cells_[point * num_views_ + view];
  }
  const Pixel2& at(const ImageIndex& idx) const { return (*this)(idx.point, idx.view); }
  Pixel2& at(const ImageIndex& idx) { return (*this)(idx.point, idx.view); }

  bool observed(std::size_t point, std::size_t view) const {
    return (*this)(point, view).observed;
  }

  /// Points observed in both views, ascending.
  std::vector<std::size_t> co_observed(std::size_t view_a, std::size_t view_b) const;
  /// Views in which the given point is observed, ascending.
  std::vector<std::size_t> views_observing(std::size_t point) const;
  std::size_t count_observed() const;

  bool same_shape(const ObservationGrid& other) const {
    return num_points_ == other.num_points_ && num_views_ == other.num_views_;
  }
  bool operator==(const ObservationGrid&) const = default;

 private:
  std::size_t num_points_ = 0;
  std::size_t num_views_ = 0;
  std::vector<Pixel2> cells_;
};

}  // namespace mvref
