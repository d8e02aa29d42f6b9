// Command-line front end: generate, refine, detect-outliers, evaluate, rank-check.
//
// Exit codes: 0 ok, 1 other failure, 2 invalid flags or unreadable input,
// 3 scene generation failed, 4 no usable view pair, 5 grids differ in shape.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvref/constraints.hpp"
#include "mvref/io.hpp"
#include "mvref/pipeline.hpp"
#include "mvref/synth.hpp"

using json = nlohmann::ordered_json;
using namespace mvref;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json nan_safe(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json index_json(const ImageIndex& i) { return {{"point", i.point + 1}, {"view", i.view + 1}}; }

template <class Range>
json index_list(const Range& items) {
  json out = json::array();
  for (const auto& i : items) out.push_back(index_json(i));
  return out;
}

json error_json(const ErrorReport& r, bool with_points) {
  json j;
  j["correspondence_error"] = r.correspondence_error;
  j["median_error"] = r.median_error;
  j["count"] = r.count;
  json views = json::array();
  for (std::size_t n = 0; n < r.image_errors.size(); ++n) {
    views.push_back({{"view", n + 1}, {"image_error", nan_safe(r.image_errors[n])},
                     {"count", r.image_counts[n]}});
  }
  j["image_errors"] = views;
  json hist = json::array();
  for (const auto& b : r.histogram) {
    hist.push_back({{"lower", b.lower}, {"upper", b.lower + 10.0}, {"count", b.count}});
  }
  j["histogram"] = hist;
  if (with_points) {
    json pts = json::array();
    for (std::size_t i = 0; i < r.point_errors.size(); ++i) {
      json e = index_json(r.evaluated[i]);
      e["error"] = r.point_errors[i];
      pts.push_back(e);
    }
    j["point_errors"] = pts;
  }
  return j;
}

void emit(const json& report, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << report.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << report.dump(2) << '\n';
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorKind::InvalidArgument, "bad number '" + item + "' in list '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
      return 2;
    case ErrorKind::GenerationFailure:
      return 3;
    case ErrorKind::NoUsablePairs:
      return 4;
    case ErrorKind::ShapeMismatch:
      return 5;
    default:
      return 1;
  }
}

struct GenerateArgs {
  std::size_t points = 12;
  std::size_t views = 20;
  std::uint64_t seed = 0;
  std::optional<double> sigma;
  std::optional<double> target_mean_error;
  double outlier_rate = 0.0;
  std::string outlier_offset = "150,300";
  double missing_rate = 0.0;
  double image_size = 3024.0;
  std::string out_truth, out_noisy, out_outliers, out_scene;
};

int run_generate(const GenerateArgs& a) {
  SceneOptions so;
  so.image_size = a.image_size;
  const Scene scene = generate_scene(a.points, a.views, a.seed, so);

  const auto offset = parse_list(a.outlier_offset);
  if (offset.size() != 2) throw Error(ErrorKind::InvalidArgument, "--outlier-offset needs min,max");
  CorruptionSpec spec;
  spec.sigma = a.sigma.value_or(a.target_mean_error ? sigma_for_mean_error(*a.target_mean_error) : 0.0);
  spec.outlier_rate = a.outlier_rate;
  spec.outlier_min = offset[0];
  spec.outlier_max = offset[1];
  spec.missing_rate = a.missing_rate;
  spec.seed = mix_seed(a.seed, {0xC0});
  spec.width = scene.width;
  spec.height = scene.height;
  const Corruption c = corrupt(scene.grid, spec);

  write_correspondences_file(a.out_truth, scene.grid);
  write_correspondences_file(a.out_noisy, c.grid);
  const std::string manifest = a.out_outliers.empty() ? a.out_noisy + ".outliers.csv" : a.out_outliers;
  {
    std::ofstream out(manifest);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + manifest);
    write_index_list(out, c.outliers);
  }
  if (!a.out_scene.empty()) {
    json j;
    j["seed"] = a.seed;
    j["width"] = scene.width;
    j["height"] = scene.height;
    j["sigma"] = spec.sigma;
    j["clamped"] = c.clamped;
    json pts = json::array();
    for (const auto& p : scene.points) pts.push_back({p.x(), p.y(), p.z()});
    j["points"] = pts;
    json cams = json::array();
    for (const auto& cam : scene.cameras) {
      json rows = json::array();
      for (int r = 0; r < 3; ++r) rows.push_back({cam.m(r, 0), cam.m(r, 1), cam.m(r, 2), cam.m(r, 3)});
      cams.push_back(rows);
    }
    j["cameras"] = cams;
    emit(j, a.out_scene);
  }
  return 0;
}

json config_json(const RefineConfig& c) {
  return {{"kappa", c.kappa},           {"thresholds", c.thresholds},
          {"inner_iters", c.inner_iters}, {"two_view_cap", c.two_view_cap},
          {"multi_view_cap", c.multi_view_cap}, {"seed", c.seed},
          {"recover_missing", c.recover_missing}};
}

struct RefineArgs {
  std::string input, output, report, truth;
  std::string thresholds = "60,40,20";
  std::optional<int> kappa;
  int inner_iters = 10;
  std::uint64_t seed = 0;
  std::size_t two_view_cap = 100;
  std::size_t multi_view_cap = 100;
  bool no_recover_missing = false;
  unsigned threads = 1;
};

int run_refine(const RefineArgs& a) {
  const auto start = Clock::now();
  const ObservationGrid grid = read_correspondences_file(a.input);
  std::optional<ObservationGrid> truth;
  if (!a.truth.empty()) truth = read_correspondences_file(a.truth);

  RefineConfig cfg;
  cfg.thresholds = parse_list(a.thresholds);
  cfg.kappa = a.kappa.value_or(static_cast<int>(cfg.thresholds.size()));
  cfg.inner_iters = a.inner_iters;
  cfg.seed = a.seed;
  cfg.two_view_cap = a.two_view_cap;
  cfg.multi_view_cap = a.multi_view_cap;
  cfg.recover_missing = !a.no_recover_missing;
  cfg.threads = a.threads;

  const RefineResult res = main_refine(grid, cfg, truth ? &*truth : nullptr);
  write_correspondences_file(a.output, res.grid);

  json report;
  report["command"] = "refine";
  report["input"] = a.input;
  report["config"] = config_json(cfg);
  report["seed"] = cfg.seed;
  json stages = json::array();
  for (std::size_t i = 0; i < res.stages.size(); ++i) {
    const auto& s = res.stages[i];
    json j{{"stage", i + 1},
           {"theta", s.theta},
           {"outliers", index_list(s.outliers)},
           {"sweeps", s.sweeps},
           {"hit_sweep_cap", s.hit_sweep_cap},
           {"truncated", s.truncated},
           {"unrecoverable", index_list(s.unrecoverable)}};
    if (s.errors) j["errors"] = error_json(*s.errors, false);
    stages.push_back(j);
  }
  report["stages"] = stages;
  if (truth) {
    report["input_errors"] = error_json(compute_errors(grid, *truth), false);
    report["final_errors"] = error_json(compute_errors(res.grid, *truth), true);
  }
  report["timing_ms"] = elapsed_ms(start);
  if (!a.report.empty()) emit(report, a.report);
  return 0;
}

struct DetectArgs {
  std::string input, output, report;
  double theta = 60.0;
  int inner_iters = 10;
};

int run_detect(const DetectArgs& a) {
  const auto start = Clock::now();
  const ObservationGrid grid = read_correspondences_file(a.input);
  OutlierOptions opt;
  opt.refine.inner_iters = a.inner_iters;
  const OutlierResult res = recognize_outliers(grid, a.theta, opt);
  if (!a.output.empty()) {
    std::ofstream out(a.output);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + a.output);
    write_index_list(out, res.outliers.items());
  }
  json report{{"command", "detect-outliers"},
              {"input", a.input},
              {"theta", a.theta},
              {"inner_iters", a.inner_iters},
              {"outliers", index_list(res.outliers)},
              {"sweeps", res.sweeps},
              {"hit_sweep_cap", res.hit_sweep_cap},
              {"truncated", res.truncated},
              {"timing_ms", elapsed_ms(start)}};
  emit(report, a.report);
  return 0;
}

struct EvaluateArgs {
  std::string estimate, truth, report;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto start = Clock::now();
  const auto est = read_correspondences_file(a.estimate);
  const auto truth = read_correspondences_file(a.truth);
  json report{{"command", "evaluate"}, {"estimate", a.estimate}, {"truth", a.truth}};
  report["errors"] = error_json(compute_errors(est, truth), true);
  report["timing_ms"] = elapsed_ms(start);
  emit(report, a.report);
  return 0;
}

struct RankArgs {
  std::string input, truth, report;
  std::uint64_t seed = 0;
  std::size_t cap = 100;
};

json rank_json(const ObservationGrid& grid, std::uint64_t seed, std::size_t cap) {
  json pairs = json::array();
  double gamma_max = 0.0;
  for (std::size_t a = 0; a < grid.num_views(); ++a) {
    for (std::size_t b = a + 1; b < grid.num_views(); ++b) {
      const auto shared = grid.co_observed(a, b);
      if (shared.size() < 9) continue;
      std::vector<Pixel2> first, second;
      for (std::size_t m : shared) {
        first.push_back(grid(m, a));
        second.push_back(grid(m, b));
      }
      const double r = gamma_rank_residual(first, second);
      gamma_max = std::max(gamma_max, r);
      pairs.push_back({{"views", {a + 1, b + 1}}, {"points", shared.size()}, {"residual", r}});
    }
  }
  json blocks = json::array();
  double lambda_max = 0.0;
  if (grid.num_points() >= 6) {
    Rng rng(mix_seed(seed, {0x1A}));
    std::vector<std::size_t> all_views(grid.num_views());
    for (std::size_t n = 0; n < all_views.size(); ++n) all_views[n] = n;
    for (const auto& s : sample_subsets(grid.num_points(), 6, cap, rng)) {
      const std::array<std::size_t, 6> six{s[0], s[1], s[2], s[3], s[4], s[5]};
      try {
        const auto lam = build_lambda(grid, six, all_views);
        const double r = lambda_rank_residual(grid, six, all_views);
        lambda_max = std::max(lambda_max, r);
        json pts = json::array();
        for (std::size_t p : six) pts.push_back(p + 1);
        blocks.push_back({{"points", pts}, {"views", lam.views.size()}, {"residual", r}});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientViews) throw;
      }
    }
  }
  return {{"gamma", {{"max_residual", gamma_max}, {"pairs", pairs}}},
          {"lambda", {{"max_residual", lambda_max}, {"blocks", blocks}}}};
}

int run_rank_check(const RankArgs& a) {
  const auto start = Clock::now();
  json report{{"command", "rank-check"}, {"input", a.input}, {"seed", a.seed}};
  report["input_residuals"] = rank_json(read_correspondences_file(a.input), a.seed, a.cap);
  if (!a.truth.empty()) {
    report["truth_residuals"] = rank_json(read_correspondences_file(a.truth), a.seed, a.cap);
  }
  report["timing_ms"] = elapsed_ms(start);
  emit(report, a.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view correspondence refinement"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Synthetic scene: truth and corrupted correspondences");
  g->add_option("--points", gen.points, "World points")->check(CLI::PositiveNumber);
  g->add_option("--views", gen.views, "Views")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed);
  auto* sigma = g->add_option("--sigma", gen.sigma, "Per-axis Gaussian noise, px")->check(CLI::NonNegativeNumber);
  g->add_option("--target-mean-error", gen.target_mean_error, "Mean noise displacement, px")
      ->check(CLI::NonNegativeNumber)
      ->excludes(sigma);
  g->add_option("--outlier-rate", gen.outlier_rate)->check(CLI::Range(0.0, 1.0));
  g->add_option("--outlier-offset", gen.outlier_offset, "min,max displacement, px");
  g->add_option("--missing-rate", gen.missing_rate)->check(CLI::Range(0.0, 1.0));
  g->add_option("--image-size", gen.image_size)->check(CLI::PositiveNumber);
  g->add_option("--out-truth", gen.out_truth)->required();
  g->add_option("--out-noisy", gen.out_noisy)->required();
  g->add_option("--out-outliers", gen.out_outliers, "Injected outliers (default <out-noisy>.outliers.csv)");
  g->add_option("--out-scene", gen.out_scene, "Cameras and world points as JSON");

  RefineArgs ref;
  auto* r = app.add_subcommand("refine", "Outlier removal, self-estimation and refinement");
  r->add_option("--input", ref.input)->required();
  r->add_option("--output", ref.output)->required();
  r->add_option("--thresholds", ref.thresholds, "Comma-separated, strictly decreasing");
  r->add_option("--kappa", ref.kappa, "Stages (defaults to the threshold count)");
  r->add_option("--inner-iters", ref.inner_iters)->check(CLI::PositiveNumber);
  r->add_option("--seed", ref.seed);
  r->add_option("--report", ref.report);
  r->add_option("--truth", ref.truth, "Ground truth for error reporting");
  r->add_option("--two-view-cap", ref.two_view_cap)->check(CLI::PositiveNumber);
  r->add_option("--multi-view-cap", ref.multi_view_cap)->check(CLI::PositiveNumber);
  r->add_flag("--no-recover-missing", ref.no_recover_missing);
  r->add_option("--threads", ref.threads)->check(CLI::PositiveNumber);

  DetectArgs det;
  auto* d = app.add_subcommand("detect-outliers", "Flag outlier image points");
  d->add_option("--input", det.input)->required();
  d->add_option("--theta", det.theta)->check(CLI::PositiveNumber);
  d->add_option("--inner-iters", det.inner_iters)->check(CLI::PositiveNumber);
  d->add_option("--output", det.output, "Flagged indices as CSV");
  d->add_option("--report", det.report);

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Point, image and correspondence errors");
  e->add_option("--estimate", ev.estimate)->required();
  e->add_option("--truth", ev.truth)->required();
  e->add_option("--report", ev.report);

  RankArgs rk;
  auto* k = app.add_subcommand("rank-check", "Rank residuals of the two-view and multi-view matrices");
  k->add_option("--input", rk.input)->required();
  k->add_option("--truth", rk.truth);
  k->add_option("--seed", rk.seed);
  k->add_option("--cap", rk.cap, "Sampled six-point blocks")->check(CLI::PositiveNumber);
  k->add_option("--report", rk.report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*g) return run_generate(gen);
    if (*r) return run_refine(ref);
    if (*d) return run_detect(det);
    if (*e) return run_evaluate(ev);
    if (*k) return run_rank_check(rk);
  } catch (const Error& err) {
    std::cerr << "mvref: " << err.what() << '\n';
    return exit_code(err.kind());
  }
  return 1;
}
