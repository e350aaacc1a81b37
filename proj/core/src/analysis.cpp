#include <algorithm>
#include <cmath>
#include <numeric>

#include "pisynth/sim.hpp"

namespace pisynth {

ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& series,
                               double t_max, double floor) {
  if (t.size() != series.size()) throw Error("time and series lengths differ");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > t_max) break;
    const double a = std::abs(series[i]);
    if (a > floor) {
      xs.push_back(t[i]);
      ys.push_back(std::log(a));
    }
  }
  if (xs.size() < 10) throw InsufficientData("fewer than 10 samples above the floor");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InsufficientData("samples share one time stamp");
  const double slope = sxy / sxx;
  ExponentialFit f;
  f.rate = -slope;
  f.amplitude = std::exp(my - slope * mx);
  f.samples = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i)
    f.max_log_residual = std::max(f.max_log_residual, std::abs(ys[i] - (my + slope * (xs[i] - mx))));
  return f;
}

std::optional<double> settling_time(const std::vector<double>& t, const std::vector<double>& err,
                                    double tol) {
  if (t.empty() || t.size() != err.size()) return std::nullopt;
  std::size_t k = err.size();
  while (k > 0 && err[k - 1] <= tol) --k;
  if (k == err.size()) return std::nullopt;
  return t[k];
}

std::vector<double> distance_series(const Trajectory& tr, const std::vector<double>& target) {
  std::vector<double> out;
  out.reserve(tr.size());
  for (const auto& x : tr.x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - target[i]) * (x[i] - target[i]);
    out.push_back(std::sqrt(s));
  }
  return out;
}

std::vector<double> map_norm_series(const Trajectory& tr, const std::vector<Expr>& map,
                                    const std::vector<std::string>& states, const std::string& time) {
  std::vector<std::string> slots = states;
  if (!time.empty()) slots.push_back(time);
  CompiledVector cv(map, slots);
  std::vector<double> buf(slots.size()), z(map.size()), out;
  out.reserve(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    std::copy(tr.x[k].begin(), tr.x[k].end(), buf.begin());
    if (!time.empty()) buf.back() = tr.t[k];
    cv(buf, z);
    double s = 0.0;
    for (double v : z) s += v * v;
    out.push_back(std::sqrt(s));
  }
  return out;
}

Orbit detect_orbit(const std::vector<double>& t, const std::vector<double>& series, double transient) {
  Orbit o;
  if (t.size() != series.size() || t.size() < 3) return o;
  const double t0 = t.front() + transient * (t.back() - t.front());
  const auto first = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), t0) - t.begin());
  if (series.size() - first < 3) return o;
  const double mean =
      std::accumulate(series.begin() + first, series.end(), 0.0) / static_cast<double>(series.size() - first);

  std::vector<double> up;   // interpolated upward crossings of the mean
  std::vector<std::size_t> idx;
  for (std::size_t i = first + 1; i < series.size(); ++i) {
    const double a = series[i - 1] - mean, b = series[i] - mean;
    if (a < 0.0 && b >= 0.0) {
      up.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-a) / (b - a));
      idx.push_back(i);
    }
  }
  if (up.size() < 4) return o;  // three full cycles

  std::vector<double> amp;
  for (std::size_t c = 0; c + 1 < idx.size(); ++c) {
    const auto lo = series.begin() + static_cast<std::ptrdiff_t>(idx[c]);
    const auto hi = series.begin() + static_cast<std::ptrdiff_t>(idx[c + 1]);
    const auto [mn, mx] = std::minmax_element(lo, hi);
    amp.push_back(0.5 * (*mx - *mn));
  }
  o.cycles = amp.size();
  o.period = (up.back() - up.front()) / static_cast<double>(up.size() - 1);
  o.amplitude = std::accumulate(amp.begin(), amp.end(), 0.0) / static_cast<double>(amp.size());
  for (std::size_t c = 1; c < amp.size(); ++c)
    o.drift = std::max(o.drift, std::abs(amp[c] - amp[c - 1]) / std::max(amp[c - 1], 1e-300));
  o.found = o.amplitude > 1e-6 && amp.back() > 0.5 * amp.front();
  return o;
}

}  // namespace pisynth
