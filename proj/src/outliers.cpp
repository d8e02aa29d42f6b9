#include "mvref/outliers.hpp"

#include <algorithm>

namespace mvref {

bool OutlierSet::insert(const ImageIndex& idx) {
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), idx);
  if (it != sorted_.end() && *it == idx) return false;
  sorted_.insert(it, idx);
  items_.push_back(idx);
  return true;
}

bool OutlierSet::contains(const ImageIndex& idx) const {
  return std::binary_search(sorted_.begin(), sorted_.end(), idx);
}

OutlierResult recognize_outliers(const ObservationGrid& grid, double theta,
                                 const OutlierOptions& options) {
  if (!(theta > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be positive");
  OutlierResult out;
  out.working = grid;
  while (true) {
    if (out.sweeps == options.max_sweeps) {
      out.hit_sweep_cap = true;
      break;
    }
    ObservationGrid refined;
    try {
      refined = refine_all(out.working, options.refine);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoUsablePairs || out.sweeps == 0) throw;
      out.truncated = true;
      break;
    }
    ++out.sweeps;
    std::vector<ImageIndex> flagged;
    for (std::size_t n = 0; n < grid.num_views(); ++n) {
      for (std::size_t m = 0; m < grid.num_points(); ++m) {
        if (!out.working.observed(m, n)) continue;
        if ((refined(m, n).vec() - out.working(m, n).vec()).norm() >= theta) {
          flagged.push_back({n, m});
        }
      }
    }
    if (flagged.empty()) break;
    for (const auto& idx : flagged) {
      out.outliers.insert(idx);
      out.working.at(idx) = Pixel2::missing();
    }
  }
  return out;
}

}  // namespace mvref
