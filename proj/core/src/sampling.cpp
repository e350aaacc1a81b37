#include "pisynth/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pisynth {

std::vector<Point> sample_points(const std::vector<std::string>& vars, std::size_t n,
                                 std::uint64_t seed, const SampleOptions& opt) {
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> dist;
  for (const auto& v : vars) {
    auto it = opt.ranges.find(v);
    if (it == opt.ranges.end()) dist.emplace_back(-2.0, 2.0);
    else dist.emplace_back(it->second.first, it->second.second);
  }
  std::vector<Point> out;
  out.reserve(n);
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > opt.max_attempts * std::max<std::size_t>(n, 1))
      throw Error("sampling rejected too many points");
    Point p = opt.fixed;
    for (std::size_t i = 0; i < vars.size(); ++i) p[vars[i]] = dist[i](rng);
    bool ok = true;
    try {
      for (const auto& g : opt.guards)
        if (!(std::abs(eval(g, p)) >= opt.margin)) {
          ok = false;
          break;
        }
      if (ok)
        for (const auto& e : opt.must_eval)
          if (!std::isfinite(eval(e, p))) {
            ok = false;
            break;
          }
    } catch (const DomainError&) {
      ok = false;
    }
    if (ok) out.push_back(std::move(p));
  }
  return out;
}

PointwiseDiff pointwise_diff(const Expr& a, const Expr& b, const std::vector<Point>& pts) {
  PointwiseDiff r;
  for (const auto& p : pts) {
    const double va = eval(a, p);
    const double vb = eval(b, p);
    const double abs = std::abs(va - vb);
    const double rel = abs / std::max({1.0, std::abs(va), std::abs(vb)});
    if (!(rel <= r.max_rel)) {
      r.max_rel = std::isnan(rel) ? INFINITY : rel;
      r.worst = p;
    }
    r.max_abs = std::max(r.max_abs, abs);
    ++r.points;
  }
  return r;
}

bool vanishes_at(const Expr& e, const std::vector<Point>& pts, double tol, Point* witness) {
  for (const auto& p : pts) {
    const double v = eval(e, p);
    if (!(std::abs(v) <= tol)) {
      if (witness) *witness = p;
      return false;
    }
  }
  return true;
}

}  // namespace pisynth
