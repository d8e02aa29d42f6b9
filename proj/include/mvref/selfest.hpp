#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "mvref/constraints.hpp"
#include "mvref/random.hpp"

namespace mvref {

/// Seeded source of bounded index subsets. Each call site passes a key so
/// streams for different (view, point, partner) never share state.
struct SubsetSampler {
  std::uint64_t seed = 0;
  std::size_t cap = 100;

  /// Up to cap distinct sorted k-subsets of {0..n-1}; all of them when
  /// C(n, k) <= cap.
  std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k,
                                                std::initializer_list<std::uint64_t> key) const;
  Rng stream(std::initializer_list<std::uint64_t> key) const;
};

/// Lines through the unknown point, one per usable index subset.
struct LineSystem {
  std::vector<CoeffTriple> lines;  ///< raw cofactor scale, in draw order
  std::size_t degenerate = 0;      ///< subsets skipped for vanishing minors
};

/// Least-squares intersection of lines. Throws RankDeficientSystem when the
/// stacked normals have sigma_2 / sigma_1 < 1e-10 (all lines parallel).
Vec2 intersect_lines(std::span<const CoeffTriple> lines);

/// Epipolar lines for point m in view n from 8-subsets of the other points
/// co-observed in views n and partner. Needs 9 such points and the point
/// observed in the partner view.
LineSystem two_view_lines(const ObservationGrid& grid, std::size_t n, std::size_t partner,
                          std::size_t m, const SubsetSampler& sampler);

/// Lines for point m in view n from (5-point subset, 4-view subset)
/// combinations over the other points and views. Needs N >= 6.
LineSystem multi_view_lines(const ObservationGrid& grid, std::size_t n, std::size_t m,
                            const SubsetSampler& sampler);

/// Point m in view n from a single partner view. Every subset yields the same
/// epipolar line on exact data, so this system is rank-deficient there.
Pixel2 self_estimate_two_view(const ObservationGrid& grid, std::size_t n, std::size_t partner,
                              std::size_t m, const SubsetSampler& sampler);

/// Point m in view n from the pooled lines of several partner views.
Pixel2 self_estimate_two_view_pooled(const ObservationGrid& grid, std::size_t n,
                                     std::span<const std::size_t> partners, std::size_t m,
                                     const SubsetSampler& sampler);

Pixel2 self_estimate_multi_view(const ObservationGrid& grid, std::size_t n, std::size_t m,
                                const SubsetSampler& sampler);

struct SelfEstimateOptions {
  std::uint64_t seed = 0;
  std::size_t two_view_cap = 100;
  std::size_t multi_view_cap = 100;
  bool use_two_view = true;
  bool use_multi_view = true;
};

struct SelfEstimateReport {
  std::vector<ImageIndex> estimated;
  std::vector<ImageIndex> unrecoverable;
  std::vector<std::size_t> candidates;  ///< per target, in target order
};

struct SelfEstimateResult {
  ObservationGrid grid;
  SelfEstimateReport report;
};

/// Re-estimates every target index as the component-wise median of the
/// pooled two-view candidate (needs two usable partner views) and the
/// multi-view candidate. All targets are treated as missing while estimating. Targets
/// without candidates are left missing and reported.
SelfEstimateResult self_estimate(const ObservationGrid& grid, std::span<const ImageIndex> targets,
                                 const SelfEstimateOptions& options = {});

}  // namespace mvref
