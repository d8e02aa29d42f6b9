#include "mvref/refine.hpp"

#include <algorithm>
#include <optional>
#include <thread>

#include <Eigen/SVD>

#include "mvref/constraints.hpp"
#include "mvref/linalg.hpp"

namespace mvref {

MatX truncate_to_rank(const MatX& a, int r) {
  if (r < 0 || std::min(a.rows(), a.cols()) <= r) {
    throw Error(ErrorKind::ShapeError, "matrix too small to truncate to rank " + std::to_string(r));
  }
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VecX s = svd.singularValues();
  s.tail(s.size() - r).setZero();
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

Alignment procrustes_align(std::span<const Vec2> candidates, std::span<const Vec2> observations) {
  if (candidates.size() != observations.size() || candidates.size() < 2) {
    throw Error(ErrorKind::ShapeError, "alignment needs two equal-length sets of >= 2 points");
  }
  const double count = static_cast<double>(candidates.size());
  Vec2 mean_c = Vec2::Zero(), mean_o = Vec2::Zero();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    mean_c += candidates[i];
    mean_o += observations[i];
  }
  mean_c /= count;
  mean_o /= count;

  Mat2 cross = Mat2::Zero();
  double spread = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Vec2 c = candidates[i] - mean_c;
    cross += c * (observations[i] - mean_o).transpose();
    spread += c.squaredNorm();
  }

  Alignment out;
  if (spread == 0.0) {
    out.degenerate = true;
  } else {
    // max tr(R * cross) over orthogonal R: R = V U^T with cross = U S V^T.
    Eigen::JacobiSVD<Mat2> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.transform.rotation = svd.matrixV() * svd.matrixU().transpose();
  }
  out.transform.translation = mean_o - out.transform.rotation * mean_c;
  out.aligned.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.aligned.push_back(out.transform.apply(candidates[i]));
    out.residual += (out.aligned.back() - observations[i]).squaredNorm();
  }
  return out;
}

Vec2 component_median(std::span<const Vec2> points) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "median of an empty set");
  auto median_of = [](std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
  };
  std::vector<double> us, vs;
  us.reserve(points.size());
  vs.reserve(points.size());
  for (const auto& p : points) {
    us.push_back(p.x());
    vs.push_back(p.y());
  }
  return {median_of(std::move(us)), median_of(std::move(vs))};
}

PairCandidates refine_pair(const ObservationGrid& grid, std::size_t view_a, std::size_t view_b,
                           const RefineOptions& options) {
  PairCandidates out;
  out.view_a = view_a;
  out.view_b = view_b;
  out.points = grid.co_observed(view_a, view_b);
  if (out.points.size() < 9) {
    throw Error(ErrorKind::InsufficientPoints,
                "views " + std::to_string(view_a) + " and " + std::to_string(view_b) + " share " +
                    std::to_string(out.points.size()) + " points, need 9");
  }
  std::vector<Vec2> obs_a, obs_b;
  for (std::size_t m : out.points) {
    obs_a.push_back(grid(m, view_a).vec());
    obs_b.push_back(grid(m, view_b).vec());
  }
  const auto norm_a = Similarity2::fit(obs_a);
  const auto norm_b = Similarity2::fit(obs_b);
  std::vector<Pixel2> ca, cb;
  for (std::size_t i = 0; i < obs_a.size(); ++i) {
    ca.push_back(Pixel2::from(norm_a.apply(obs_a[i])));
    cb.push_back(Pixel2::from(norm_b.apply(obs_b[i])));
  }
  const MatX truncated = truncate_to_rank(build_gamma(ca, cb), 8);

  std::vector<Vec2> cand_a, cand_b;
  for (Eigen::Index i = 0; i < truncated.rows(); ++i) {
    cand_a.push_back(norm_a.invert(Vec2(truncated(i, 1), truncated(i, 2))));
    cand_b.push_back(norm_b.invert(Vec2(truncated(i, 3), truncated(i, 4))));
  }

  if (options.shared_alignment) {
    std::vector<Vec2> cand = cand_a, obs = obs_a;
    cand.insert(cand.end(), cand_b.begin(), cand_b.end());
    obs.insert(obs.end(), obs_b.begin(), obs_b.end());
    const auto aligned = procrustes_align(cand, obs).aligned;
    out.first.assign(aligned.begin(), aligned.begin() + static_cast<std::ptrdiff_t>(cand_a.size()));
    out.second.assign(aligned.begin() + static_cast<std::ptrdiff_t>(cand_a.size()), aligned.end());
  } else {
    out.first = procrustes_align(cand_a, obs_a).aligned;
    out.second = procrustes_align(cand_b, obs_b).aligned;
  }
  return out;
}

CandidateStore collect_candidates(const ObservationGrid& grid, const RefineOptions& options) {
  const std::size_t views = grid.num_views();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < views; ++a)
    for (std::size_t b = a + 1; b < views; ++b) pairs.emplace_back(a, b);

  std::vector<std::optional<PairCandidates>> results(pairs.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < pairs.size(); i += stride) {
      if (grid.co_observed(pairs[i].first, pairs[i].second).size() < 9) continue;
      results[i] = refine_pair(grid, pairs[i].first, pairs[i].second, options);
    }
  };
  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1 || pairs.size() < 2) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }

  CandidateStore store(grid.num_points(), views);
  for (const auto& r : results) {
    if (!r) {
      ++store.skipped_pairs;
      continue;
    }
    ++store.usable_pairs;
    for (std::size_t i = 0; i < r->points.size(); ++i) {
      store.add(r->points[i], r->view_a, r->first[i]);
      store.add(r->points[i], r->view_b, r->second[i]);
    }
  }
  return store;
}

ObservationGrid refine_all(const ObservationGrid& grid, const RefineOptions& options) {
  if (grid.num_views() < 2) {
    throw Error(ErrorKind::NoUsablePairs, "refinement needs at least two views");
  }
  ObservationGrid current = grid;
  for (int iter = 0; iter < options.inner_iters; ++iter) {
    const CandidateStore store = collect_candidates(current, options);
    if (store.usable_pairs == 0) {
      throw Error(ErrorKind::NoUsablePairs, "every view pair has fewer than 9 co-observed points");
    }
    ObservationGrid next = current;
    for (std::size_t m = 0; m < current.num_points(); ++m) {
      for (std::size_t n = 0; n < current.num_views(); ++n) {
        const auto& cands = store.at(m, n);
        if (!current.observed(m, n) || cands.empty()) continue;
        const Vec2 med = component_median(cands);
        next(m, n).u = med.x();
        next(m, n).v = med.y();
      }
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace mvref
