#include "mvref/grid.hpp"

namespace mvref {

std::vector<std::size_t> ObservationGrid::co_observed(std::size_t view_a,
                                                      std::size_t view_b) const {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < num_points_; ++m) {
    if (observed(m, view_a) && observed(m, view_b)) out.push_back(m);
  }
  return out;
}

std::vector<std::size_t> ObservationGrid::views_observing(std::size_t point) const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < num_views_; ++n) {
    if (observed(point, n)) out.push_back(n);
  }
  return out;
}

std::size_t ObservationGrid::count_observed() const {
  std::size_t count = 0;
  for (const auto& cell : cells_) count += cell.observed ? 1 : 0;
  return count;
}

}  // namespace mvref
