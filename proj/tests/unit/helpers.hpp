#pragma once

#include <doctest.h>

#include <vector>

#include "mvref/common.hpp"
#include "mvref/geometry.hpp"
#include "mvref/random.hpp"

#define CHECK_KIND(expr, expected)                                          \
  do {                                                                      \
    bool thrown_ = false;                                                   \
    try {                                                                   \
      (void)(expr);                                                         \
    } catch (const ::mvref::Error& e_) {                                    \
      thrown_ = true;                                                       \
      CHECK_MESSAGE(e_.kind() == (expected), "got " << e_.what());          \
    }                                                                       \
    CHECK_MESSAGE(thrown_, "expected " << ::mvref::to_string(expected));    \
  } while (0)

namespace testutil {

inline mvref::Mat34 random_camera(mvref::Rng& rng) {
  mvref::Mat34 p;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) p(r, c) = rng.uniform(-1.0, 1.0);
  return p;
}

inline mvref::Point3 random_point(mvref::Rng& rng, double lo = -1.0, double hi = 1.0) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

inline std::vector<mvref::Vec2> random_view(mvref::Rng& rng, std::size_t n, double scale = 1000.0) {
  std::vector<mvref::Vec2> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(rng.uniform(0, scale), rng.uniform(0, scale));
  return out;
}

inline std::vector<mvref::Pixel2> as_pixels(const std::vector<mvref::Vec2>& pts) {
  std::vector<mvref::Pixel2> out;
  for (const auto& p : pts) out.push_back(mvref::Pixel2::from(p));
  return out;
}

}  // namespace testutil
