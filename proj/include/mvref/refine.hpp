#pragma once

#include <span>
#include <vector>

#include "mvref/grid.hpp"

namespace mvref {

/// Best rank-r approximation in Frobenius norm.
MatX truncate_to_rank(const MatX& a, int r);

/// x -> rotation * x + translation, with rotation orthogonal (det may be -1).
struct RigidTransform2 {
  Mat2 rotation = Mat2::Identity();
  Vec2 translation = Vec2::Zero();

  Vec2 apply(const Vec2& x) const { return rotation * x + translation; }
};

struct Alignment {
  RigidTransform2 transform;
  std::vector<Vec2> aligned;
  double residual = 0.0;    ///< sum of squared distances after alignment
  bool degenerate = false;  ///< candidates had zero spread; translation only
};

/// Orthogonal Procrustes with translation, no scaling, reflections allowed.
Alignment procrustes_align(std::span<const Vec2> candidates, std::span<const Vec2> observations);

/// Component-wise median (u and v independently); even counts take the
/// midpoint of the two central values.
Vec2 component_median(std::span<const Vec2> points);

struct RefineOptions {
  int inner_iters = 10;
  /// One transform for both views of a pair instead of one per view.
  bool shared_alignment = false;
  /// Worker threads for the per-pair step; output does not depend on it.
  unsigned threads = 1;
};

/// Candidates one view pair contributes.
struct PairCandidates {
  std::size_t view_a = 0;
  std::size_t view_b = 0;
  std::vector<std::size_t> points;  ///< co-observed points, ascending
  std::vector<Vec2> first;          ///< aligned candidates in view_a
  std::vector<Vec2> second;         ///< aligned candidates in view_b
};

/// Rank-8 truncation of the conditioned two-view matrix for one pair, read
/// back as candidates and aligned to each view's observations. Throws
/// InsufficientPoints when fewer than 9 points are co-observed.
PairCandidates refine_pair(const ObservationGrid& grid, std::size_t view_a, std::size_t view_b,
                           const RefineOptions& options = {});

/// Candidate lists per grid cell, filled in pair order (n1, n2) ascending.
class CandidateStore {
 public:
  CandidateStore(std::size_t num_points, std::size_t num_views)
      : num_views_(num_views), cells_(num_points * num_views) {}

  void add(std::size_t point, std::size_t view, const Vec2& x) {
    cells_[point * num_views_ + view].push_back(x);
  }
  const std::vector<Vec2>& at(std::size_t point, std::size_t view) const {
    return cells_[point * num_views_ + view];
  }

  std::size_t usable_pairs = 0;
  std::size_t skipped_pairs = 0;

 private:
  std::size_t num_views_;
  std::vector<std::vector<Vec2>> cells_;
};

/// One pass over all view pairs.
CandidateStore collect_candidates(const ObservationGrid& grid, const RefineOptions& options = {});

/// Repeats {collect candidates over all pairs; replace each observed point by
/// the median of its candidates} inner_iters times. Points without candidates
/// are left as they are; the observation mask never changes. Throws
/// NoUsablePairs when no pair has 9 co-observed points.
ObservationGrid refine_all(const ObservationGrid& grid, const RefineOptions& options = {});

}  // namespace mvref
