#include "mvref/selfest.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/SVD>

#include "mvref/refine.hpp"

namespace mvref {
namespace {

constexpr double kRankFloor = 1e-10;

void check_index(const ObservationGrid& grid, std::size_t n, std::size_t m) {
  if (n >= grid.num_views() || m >= grid.num_points()) {
    throw Error(ErrorKind::ShapeError, "index out of range");
  }
}

// Points other than m observed in every listed view.
std::vector<std::size_t> shared_points(const ObservationGrid& grid, std::size_t m,
                                       std::initializer_list<std::size_t> views) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < grid.num_points(); ++p) {
    if (p == m) continue;
    if (std::all_of(views.begin(), views.end(), [&](std::size_t v) { return grid.observed(p, v); }))
      out.push_back(p);
  }
  return out;
}

std::vector<std::size_t> pick(const std::vector<std::size_t>& pool,
                              const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(pool[i]);
  return out;
}

// Scales a block of lines so its normals have unit Frobenius norm; each
// partner view then carries equal weight in a pooled solve.
void append_balanced(std::vector<CoeffTriple>& out, const std::vector<CoeffTriple>& block) {
  double norm = 0.0;
  for (const auto& l : block) norm += l.alpha * l.alpha + l.beta * l.beta;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (const auto& l : block) out.push_back({l.alpha / norm, l.beta / norm, l.gamma / norm});
}

}  // namespace

std::vector<std::vector<std::size_t>> SubsetSampler::subsets(
    std::size_t n, std::size_t k, std::initializer_list<std::uint64_t> key) const {
  Rng rng = stream(key);
  return sample_subsets(n, k, cap, rng);
}

Rng SubsetSampler::stream(std::initializer_list<std::uint64_t> key) const {
  return Rng(mix_seed(seed, key));
}

Vec2 intersect_lines(std::span<const CoeffTriple> lines) {
  if (lines.empty()) throw Error(ErrorKind::RankDeficientSystem, "no lines to intersect");
  Eigen::MatrixX2d a(static_cast<Eigen::Index>(lines.size()), 2);
  VecX b(static_cast<Eigen::Index>(lines.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    a(idx, 0) = lines[i].alpha;
    a(idx, 1) = lines[i].beta;
    b(idx) = -lines[i].gamma;
  }
  Eigen::JacobiSVD<Eigen::MatrixX2d> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto s = svd.singularValues();
  if (s(0) == 0.0 || s(1) < kRankFloor * s(0)) {
    throw Error(ErrorKind::RankDeficientSystem, "lines are parallel; the point is not determined");
  }
  return svd.solve(b);
}

LineSystem two_view_lines(const ObservationGrid& grid, std::size_t n, std::size_t partner,
                          std::size_t m, const SubsetSampler& sampler) {
  check_index(grid, n, m);
  check_index(grid, partner, m);
  if (partner == n) throw Error(ErrorKind::InvalidArgument, "partner view equals target view");
  if (!grid.observed(m, partner)) {
    throw Error(ErrorKind::MissingObservation, "point not observed in the partner view");
  }
  const auto others = shared_points(grid, m, {n, partner});
  if (others.size() < 9) {
    throw Error(ErrorKind::InsufficientPoints, "two-view estimation needs 9 other co-observed points, have " +
                                                   std::to_string(others.size()));
  }
  LineSystem out;
  std::array<Pixel2, 9> first, second;
  first[0] = grid(m, n);
  second[0] = grid(m, partner);
  for (const auto& combo : sampler.subsets(others.size(), 8, {0, n, m, partner})) {
    for (std::size_t i = 0; i < 8; ++i) {
      first[i + 1] = grid(others[combo[i]], n);
      second[i + 1] = grid(others[combo[i]], partner);
    }
    try {
      out.lines.push_back(epipolar_coeffs(first, second, 0));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateMinors) throw;
      ++out.degenerate;
    }
  }
  return out;
}

LineSystem multi_view_lines(const ObservationGrid& grid, std::size_t n, std::size_t m,
                            const SubsetSampler& sampler) {
  check_index(grid, n, m);
  if (grid.num_views() < 6) {
    throw Error(ErrorKind::InsufficientViews, "multi-view estimation needs at least 6 views");
  }
  std::vector<std::size_t> views;
  for (std::size_t v = 0; v < grid.num_views(); ++v)
    if (v != n && grid.observed(m, v)) views.push_back(v);
  if (views.size() < 5) {
    throw Error(ErrorKind::InsufficientViews, "point observed in fewer than 5 other views");
  }
  const auto points = shared_points(grid, m, {n});
  if (points.size() < 5) {
    throw Error(ErrorKind::InsufficientPoints, "fewer than 5 other points in the target view");
  }

  // Views usable with a point subset: every chosen point observed there.
  auto usable_views = [&](const std::vector<std::size_t>& five) {
    std::vector<std::size_t> out;
    for (std::size_t v : views) {
      if (std::all_of(five.begin(), five.end(), [&](std::size_t p) { return grid.observed(p, v); }))
        out.push_back(v);
    }
    return out;
  };

  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> combos;
  const std::uint64_t point_sets = binomial(points.size(), 5);
  const std::uint64_t view_sets = binomial(views.size(), 4);
  const bool enumerate = point_sets <= sampler.cap && view_sets <= sampler.cap &&
                         point_sets * view_sets <= sampler.cap;
  if (enumerate) {
    std::vector<std::size_t> pc{0, 1, 2, 3, 4};
    do {
      const auto five = pick(points, pc);
      const auto vs = usable_views(five);
      if (vs.size() < 4) continue;
      std::vector<std::size_t> vc{0, 1, 2, 3};
      do {
        combos.emplace_back(five, pick(vs, vc));
      } while (next_combination(vc, vs.size()));
    } while (next_combination(pc, points.size()));
  } else {
    Rng rng = sampler.stream({1, n, m});
    std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> seen;
    const std::size_t max_draws = 20 * sampler.cap;
    for (std::size_t draw = 0; draw < max_draws && combos.size() < sampler.cap; ++draw) {
      auto five = pick(points, sample_subsets(points.size(), 5, 1, rng).front());
      const auto vs = usable_views(five);
      if (vs.size() < 4) continue;
      auto four = pick(vs, sample_subsets(vs.size(), 4, 1, rng).front());
      if (seen.emplace(five, four).second) combos.emplace_back(std::move(five), std::move(four));
    }
  }

  LineSystem out;
  for (const auto& [five, four] : combos) {
    const std::array<std::size_t, 6> six{five[0], five[1], five[2], five[3], five[4], m};
    try {
      out.lines.push_back(multiview_coeffs(grid, six, n, {four[0], four[1], four[2], four[3]}));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateMinors) throw;
      ++out.degenerate;
    }
  }
  return out;
}

Pixel2 self_estimate_two_view(const ObservationGrid& grid, std::size_t n, std::size_t partner,
                              std::size_t m, const SubsetSampler& sampler) {
  return Pixel2::from(intersect_lines(two_view_lines(grid, n, partner, m, sampler).lines));
}

Pixel2 self_estimate_two_view_pooled(const ObservationGrid& grid, std::size_t n,
                                     std::span<const std::size_t> partners, std::size_t m,
                                     const SubsetSampler& sampler) {
  std::vector<CoeffTriple> pooled;
  for (std::size_t p : partners) append_balanced(pooled, two_view_lines(grid, n, p, m, sampler).lines);
  return Pixel2::from(intersect_lines(pooled));
}

Pixel2 self_estimate_multi_view(const ObservationGrid& grid, std::size_t n, std::size_t m,
                                const SubsetSampler& sampler) {
  return Pixel2::from(intersect_lines(multi_view_lines(grid, n, m, sampler).lines));
}

SelfEstimateResult self_estimate(const ObservationGrid& grid, std::span<const ImageIndex> targets,
                                 const SelfEstimateOptions& options) {
  ObservationGrid base = grid;
  for (const auto& t : targets) {
    check_index(grid, t.view, t.point);
    base.at(t) = Pixel2::missing();
  }
  SelfEstimateResult out{base, {}};
  const SubsetSampler two{options.seed, options.two_view_cap};
  const SubsetSampler multi{options.seed, options.multi_view_cap};

  std::set<ImageIndex> done;
  for (const auto& t : targets) {
    if (!done.insert(t).second) continue;
    const std::size_t n = t.view, m = t.point;
    std::vector<Vec2> candidates;

    if (options.use_two_view) {
      std::vector<CoeffTriple> pooled;
      std::size_t partners = 0;
      for (std::size_t p = 0; p < base.num_views(); ++p) {
        if (p == n || !base.observed(m, p)) continue;
        try {
          const auto sys = two_view_lines(base, n, p, m, two);
          if (sys.lines.empty()) continue;
          append_balanced(pooled, sys.lines);
          ++partners;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::InsufficientPoints) throw;
        }
      }
      if (partners >= 2) {
        try {
          candidates.push_back(intersect_lines(pooled));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::RankDeficientSystem) throw;
        }
      }
    }
    if (options.use_multi_view) {
      try {
        candidates.push_back(self_estimate_multi_view(base, n, m, multi).vec());
      } catch (const Error& e) {
        const auto k = e.kind();
        if (k != ErrorKind::InsufficientViews && k != ErrorKind::InsufficientPoints &&
            k != ErrorKind::RankDeficientSystem)
          throw;
      }
    }

    out.report.candidates.push_back(candidates.size());
    if (candidates.empty()) {
      out.report.unrecoverable.push_back(t);
    } else {
      out.grid.at(t) = Pixel2::from(component_median(candidates));
      out.report.estimated.push_back(t);
    }
  }
  return out;
}

}  // namespace mvref
