#pragma once

#include <vector>

#include "mvref/refine.hpp"

namespace mvref {

/// Duplicate-free, insertion-ordered set of flagged image points.
class OutlierSet {
 public:
  bool insert(const ImageIndex& idx);
  bool contains(const ImageIndex& idx) const;
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<ImageIndex>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::vector<ImageIndex> items_;
  std::vector<ImageIndex> sorted_;
};

struct OutlierResult {
  OutlierSet outliers;
  ObservationGrid working;  ///< input with every flagged entry marked missing
  int sweeps = 0;
  bool hit_sweep_cap = false;
  bool truncated = false;   ///< removals left no usable pair; result is partial
};

struct OutlierOptions {
  RefineOptions refine;
  int max_sweeps = 10;
};

/// Sweeps {refine_all; flag every observed entry at least theta pixels from
/// its refinement; mark flagged entries missing} until a sweep flags nothing.
/// Throws NoUsablePairs only when the input itself has no usable pair.
OutlierResult recognize_outliers(const ObservationGrid& grid, double theta,
                                 const OutlierOptions& options = {});

}  // namespace mvref
