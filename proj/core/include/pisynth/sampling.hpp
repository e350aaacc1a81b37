#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pisynth/expr.hpp"

namespace pisynth {

struct SampleOptions {
  std::map<std::string, std::pair<double, double>> ranges;  // default [-2, 2]
  Point fixed;                 // extra bindings (parameters, time)
  std::vector<Expr> must_eval; // resample where any of these throws or is non-finite
  std::vector<Expr> guards;    // resample where |guard| < margin
  double margin = 1e-3;
  std::size_t max_attempts = 200;  // per accepted point
};

// Deterministic uniform sampling with rejection. Returned points include the
// fixed bindings. Throws Error if too many draws are rejected.
std::vector<Point> sample_points(const std::vector<std::string>& vars, std::size_t n,
                                 std::uint64_t seed, const SampleOptions& opt = {});

struct PointwiseDiff {
  double max_rel = 0.0;   // |a - b| / max(1, |a|, |b|)
  double max_abs = 0.0;
  Point worst;
  std::size_t points = 0;
};

PointwiseDiff pointwise_diff(const Expr& a, const Expr& b, const std::vector<Point>& pts);

// True when e vanishes (|e| <= tol) at every point.
bool vanishes_at(const Expr& e, const std::vector<Point>& pts, double tol, Point* witness = nullptr);

}  // namespace pisynth
