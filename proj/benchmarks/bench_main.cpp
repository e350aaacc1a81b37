#include <benchmark/benchmark.h>

#include <vector>

#include "pisynth/catalog.hpp"
#include "pisynth/compiled.hpp"

using namespace pisynth;

namespace {

const CatalogEntry& maglev() {
  static const auto e = catalog_get("maglev");
  return e;
}

Point state_point(const CatalogEntry& e, const std::vector<double>& x) {
  Point p = e.system.params;
  for (std::size_t i = 0; i < x.size(); ++i) p[e.system.states[i]] = x[i];
  return p;
}

}  // namespace

static void BM_EvalTree(benchmark::State& st) {
  const auto& e = maglev();
  const auto p = state_point(e, {0.1, 0.2, 1.5});
  for (auto _ : st) benchmark::DoNotOptimize(eval(e.law.u, p));
}
BENCHMARK(BM_EvalTree);

static void BM_EvalCompiled(benchmark::State& st) {
  const auto& e = maglev();
  const Compiled c(bind_values(e.law.u, e.system.params), e.system.states);
  const std::vector<double> x{0.1, 0.2, 1.5};
  for (auto _ : st) benchmark::DoNotOptimize(c(x));
}
BENCHMARK(BM_EvalCompiled);

static void BM_DiffSimplify(benchmark::State& st) {
  const auto& e = maglev();
  for (auto _ : st) benchmark::DoNotOptimize(simplify(diff(e.law.u, "x1")));
}
BENCHMARK(BM_DiffSimplify);

static void BM_Parse(benchmark::State& st) {
  const auto text = to_string(maglev().law.u);
  for (auto _ : st) benchmark::DoNotOptimize(parse(text));
}
BENCHMARK(BM_Parse);

static void BM_SynthesizePsf(benchmark::State& st) {
  const auto& e = maglev();
  for (auto _ : st) benchmark::DoNotOptimize(synthesize_psf(*e.psf, e.psf_synthesis->alphas));
}
BENCHMARK(BM_SynthesizePsf);

static void BM_Integrate(benchmark::State& st) {
  const auto e = catalog_get("ccm-3rd-order");
  const auto cl = make_closed_loop(e.system, e.law, e.manifold);
  SimOptions o;
  o.t_end = 10.0;
  o.method = st.range(0) ? Method::RK45 : Method::RK4;
  for (auto _ : st) benchmark::DoNotOptimize(integrate(cl, {0.5, 0.5, 0.5}, o));
}
BENCHMARK(BM_Integrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
