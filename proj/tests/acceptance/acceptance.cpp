// Runs the acceptance suite and prints one PASS/FAIL line per criterion.
// Usage: acceptance <path-to-mvref-cli> <scratch-dir>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mvref/constraints.hpp"
#include "mvref/geometry.hpp"
#include "mvref/pipeline.hpp"
#include "mvref/selfest.hpp"
#include "mvref/synth.hpp"

using namespace mvref;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome gamma_witness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 9 + static_cast<std::size_t>(t % 12);
    const Scene s = generate_scene(m, 2, mix_seed(t, {1}));
    std::vector<Pixel2> a, b;
    for (std::size_t i = 0; i < m; ++i) {
      a.push_back(s.grid(i, 0));
      b.push_back(s.grid(i, 1));
    }
    worst = std::max(worst, gamma_rank_residual(a, b));
  }
  const double sec = seconds_since(t0);
  return {worst < 1e-9 && sec < 5.0, fmt("max sigma9/sigma1 %.2e, %.2f s", worst, sec)};
}

Outcome lambda_witness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 5 + static_cast<std::size_t>(t % 8);
    const Scene s = generate_scene(6, n, mix_seed(t, {2}));
    std::vector<std::size_t> views(n);
    for (std::size_t i = 0; i < n; ++i) views[i] = i;
    worst = std::max(worst, lambda_rank_residual(s.grid, {0, 1, 2, 3, 4, 5}, views));
  }
  const double sec = seconds_since(t0);
  return {worst < 1e-8 && sec < 5.0, fmt("max sigma5/sigma1 %.2e, %.2f s", worst, sec)};
}

Outcome vanishing_coefficients() {
  Rng rng(3);
  double poly = 0.0, expl = 0.0;
  for (int t = 0; t < 100; ++t) {
    Mat34 p, q;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) {
        p(r, c) = rng.uniform(-1, 1);
        q(r, c) = rng.uniform(-1, 1);
      }
    poly = std::max(poly, vanishing_coeff_check(ProjMatrix34(p), ProjMatrix34(q)));
    expl = std::max(expl, a5_explicit_residual(ProjMatrix34(p), ProjMatrix34(q)));
  }
  return {poly < 1e-10 && expl < 1e-10,
          fmt("interpolated %.2e, explicit sum %.2e", poly, expl)};
}

Outcome b_identities() {
  Rng rng(4);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<Pixel2> six;
    for (int i = 0; i < 6; ++i) six.push_back(Pixel2::at(rng.uniform(0, 3024), rng.uniform(0, 3024)));
    worst = std::max(worst, b_relation_check(six));
  }
  return {worst < 1e-10, fmt("max relative residual %.2e", worst)};
}

// Hides one entry of an exact grid and measures how far the estimate lands.
double recovery_error(const ObservationGrid& truth, const ImageIndex& idx,
                      const std::function<Pixel2(const ObservationGrid&)>& estimate) {
  auto g = truth;
  g.at(idx) = Pixel2::missing();
  try {
    const Pixel2 p = estimate(g);
    return p.observed ? (p.vec() - truth.at(idx).vec()).norm() : std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

Outcome two_view_recovery() {
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Scene s = generate_scene(12, 6, mix_seed(t, {5}));
    Rng rng(mix_seed(t, {5, 1}));
    const ImageIndex idx{rng.index(6), rng.index(12)};
    std::vector<std::size_t> partners;
    for (std::size_t n = 0; n < 6; ++n)
      if (n != idx.view) partners.push_back(n);
    worst = std::max(worst, recovery_error(s.grid, idx, [&](const ObservationGrid& g) {
      return self_estimate_two_view_pooled(g, idx.view, partners, idx.point, {1, 100});
    }));
  }
  return {worst < 1e-4, fmt("max error %.2e px", worst)};
}

Outcome multi_view_recovery() {
  double worst = 0.0;
  int failed = 0;
  for (int t = 0; t < 50; ++t) {
    const Scene s = generate_scene(6, 7, mix_seed(t, {6}));
    Rng rng(mix_seed(t, {6, 1}));
    const ImageIndex idx{rng.index(7), rng.index(6)};
    const double e = recovery_error(s.grid, idx, [&](const ObservationGrid& g) {
      return self_estimate_multi_view(g, idx.view, idx.point, {1, 100});
    });
    if (!(e < 1e-3)) ++failed;
    worst = std::max(worst, e);
  }
  return {failed == 0, fmt("%d/50 trials over 1e-3 px, max error %.2e px", failed, worst)};
}

struct EndToEnd {
  int reduced = 0;
  int monotone = 0;
  std::size_t injected = 0, recalled = 0;
  std::size_t clean = 0, clean_flagged = 0;
  double slowest = 0.0;
  std::string ratios;
};

EndToEnd run_end_to_end() {
  EndToEnd out;
  for (int t = 0; t < 10; ++t) {
    const Scene s = generate_scene(12, 20, mix_seed(t, {7}));
    CorruptionSpec spec;
    spec.sigma = sigma_for_mean_error(30.0);
    spec.outlier_rate = 0.1;
    spec.outlier_min = 150.0;
    spec.outlier_max = 300.0;
    spec.seed = mix_seed(t, {7, 1});
    const auto c = corrupt(s.grid, spec);

    const auto t0 = std::chrono::steady_clock::now();
    const auto r = main_refine(c.grid, {}, &s.grid);
    out.slowest = std::max(out.slowest, seconds_since(t0));

    const double before = compute_errors(c.grid, s.grid).correspondence_error;
    const double after = compute_errors(r.grid, s.grid).correspondence_error;
    if (after <= 0.8 * before) ++out.reduced;
    out.ratios += fmt("%s%.2f", t ? " " : "", after / before);

    std::vector<double> stage;
    for (const auto& st : r.stages) stage.push_back(st.errors->correspondence_error);
    if (stage.size() == 3 && stage[0] >= stage[1] && stage[1] >= stage[2]) ++out.monotone;

    std::set<ImageIndex> flagged;
    for (const auto& st : r.stages) flagged.insert(st.outliers.begin(), st.outliers.end());
    const std::set<ImageIndex> injected(c.outliers.begin(), c.outliers.end());
    out.injected += injected.size();
    for (const auto& i : injected) out.recalled += flagged.count(i);
    for (std::size_t m = 0; m < 12; ++m) {
      for (std::size_t n = 0; n < 20; ++n) {
        const ImageIndex idx{n, m};
        if (injected.count(idx) || (c.grid(m, n).vec() - s.grid(m, n).vec()).norm() >= 30.0) continue;
        ++out.clean;
        out.clean_flagged += r.stages.front().outliers.contains(idx);
      }
    }
  }
  return out;
}

Outcome metric_fidelity() {
  auto image_error = [](const std::vector<double>& d) {
    ObservationGrid truth(d.size(), 1), est(d.size(), 1);
    for (std::size_t m = 0; m < d.size(); ++m) {
      truth(m, 0) = Pixel2::at(500.0 + 40.0 * m, 700.0);
      est(m, 0) = Pixel2::at(truth(m, 0).u + d[m] * 0.6, truth(m, 0).v - d[m] * 0.8);
    }
    return compute_errors(est, truth).image_errors[0];
  };
  const double a = image_error({48.54, 43.43, 32.20, 33.36, 53.60, 129.02, 28.45});
  const double b = image_error({36.02, 38.35, 76.00, 150.83, 45.81, 31.00, 48.62, 43.65, 102.86});
  return {std::abs(a - 52.66) <= 0.01 && std::abs(b - 63.68) <= 0.01, fmt("%.4f and %.4f", a, b)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void strip_timing(nlohmann::ordered_json& j) {
  if (j.is_object()) {
    j.erase("timing_ms");
    for (auto& [k, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

Outcome cli_determinism(const std::string& cli, const fs::path& dir) {
  fs::create_directories(dir);
  const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
  int rc = std::system((q(cli) + " generate --points 12 --views 20 --seed 7 --target-mean-error 30"
                        " --outlier-rate 0.1 --out-truth " + q(dir / "truth.csv") +
                        " --out-noisy " + q(dir / "noisy.csv") + " > /dev/null")
                           .c_str());
  if (rc != 0) return {false, "generate failed"};
  std::string out[2], rep[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path o = dir / fmt("refined%d.csv", i), r = dir / fmt("report%d.json", i);
    rc = std::system((q(cli) + " refine --input " + q(dir / "noisy.csv") + " --truth " +
                      q(dir / "truth.csv") + " --seed 7 --output " + q(o) + " --report " + q(r) +
                      " > /dev/null")
                         .c_str());
    if (rc != 0) return {false, "refine failed"};
    out[i] = slurp(o);
    auto j = nlohmann::ordered_json::parse(slurp(r));
    strip_timing(j);
    rep[i] = j.dump();
  }
  const bool same = out[0] == out[1] && rep[0] == rep[1] && !out[0].empty();
  return {same, fmt("outputs %s, reports %s", out[0] == out[1] ? "identical" : "differ",
                    rep[0] == rep[1] ? "identical" : "differ")};
}

Outcome round_trips() {
  double dlt = 0.0, tri = 0.0, drift = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Scene s = generate_scene(12, 4, mix_seed(t, {12}));
    const auto cams = std::span<const ProjMatrix34>(s.cameras);
    for (std::size_t n = 0; n < 4; ++n) {
      std::vector<Pixel2> image;
      for (std::size_t m = 0; m < 12; ++m) image.push_back(s.grid(m, n));
      const ProjMatrix34 p = estimate_projection_dlt(s.points, image);
      for (std::size_t m = 0; m < 12; ++m)
        dlt = std::max(dlt, (project(p, s.points[m]).vec() - image[m].vec()).norm());
    }
    for (std::size_t m = 0; m < 12; ++m) {
      std::vector<Pixel2> obs;
      for (std::size_t n = 0; n < 4; ++n) obs.push_back(s.grid(m, n));
      tri = std::max(tri, (triangulate(cams, obs) - s.points[m]).norm());
    }

    Rng rng(mix_seed(t, {12, 1}));
    Homography4 h;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) h.m(r, c) = (r == c ? 1.0 : 0.0) + 0.2 * rng.uniform(-1, 1);
    for (std::size_t m = 0; m < 12; ++m) {
      for (std::size_t n = 0; n < 4; ++n) {
        const auto moved = apply_transform(h, s.points[m], s.cameras[n]);
        drift = std::max(drift, (project(moved.camera, moved.point).vec() - s.grid(m, n).vec()).norm());
      }
    }
  }
  return {dlt < 1e-8 && tri < 1e-8 && drift < 1e-9,
          fmt("DLT reprojection %.2e px, triangulation %.2e, transform drift %.2e px", dlt, tri, drift)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <mvref-cli> <scratch-dir>\n", argv[0]);
    return 2;
  }
  int failures = 0;
  auto line = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s  %2d  %-32s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  line(1, "two-view rank witness", gamma_witness());
  line(2, "multi-view rank witness", lambda_witness());
  line(3, "vanishing epipolar coefficients", vanishing_coefficients());
  line(4, "b coefficient identities", b_identities());
  line(5, "two-view recovery", two_view_recovery());
  line(6, "six-point multi-view recovery", multi_view_recovery());

  const EndToEnd e = run_end_to_end();
  line(7, "end-to-end error reduction",
       {e.reduced >= 8 && e.slowest < 60.0,
        fmt("%d/10 trials at <= 0.8x (ratios %s), slowest %.1f s", e.reduced, e.ratios.c_str(), e.slowest)});
  line(8, "stage monotonicity", {e.monotone >= 8, fmt("%d/10 trials monotone", e.monotone)});
  const double recall = e.injected ? static_cast<double>(e.recalled) / e.injected : 0.0;
  const double false_rate = e.clean ? static_cast<double>(e.clean_flagged) / e.clean : 0.0;
  line(9, "outlier recall",
       {recall >= 0.7 && false_rate <= 0.1,
        fmt("recall %.2f (%zu/%zu), clean flagged at first stage %.3f", recall, e.recalled, e.injected,
            false_rate)});
  line(10, "metric fidelity", metric_fidelity());
  line(11, "CLI determinism", cli_determinism(argv[1], argv[2]));
  line(12, "geometry round trips", round_trips());
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
