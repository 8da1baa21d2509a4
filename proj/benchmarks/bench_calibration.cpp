// Microbenchmarks for the calibration path: spline construction, knot
// placement, the residual stack evaluated once per solver iteration, and a
// short end-to-end solve.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "colloc/bspline.hpp"
#include "colloc/calibration.hpp"
#include "colloc/collocation_model.hpp"
#include "colloc/market_data.hpp"
#include "colloc/monotone_spline.hpp"

namespace {

using namespace colloc;

void bm_schumaker_build(benchmark::State& state) {
    const Dataset* d = find_dataset("jackel_case2");
    CalibrationConfig cfg;
    const std::vector<double> x = guess_abscissae(d->slice, cfg);
    InterpolationData data;
    data.abscissae = x;
    data.ordinates.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        data.ordinates[i] = std::log(d->slice.strikes[i]);
    for (auto _ : state) {
        auto pq = schumaker_build(data, lam_harmonic_derivatives(data));
        benchmark::DoNotOptimize(pq);
    }
}
BENCHMARK(bm_schumaker_build);

void bm_to_piecewise_quadratic(benchmark::State& state) {
    const Dataset* d = find_dataset("jackel_case2");
    const std::vector<double>& bp = d->guideline_knots;
    const std::size_t m = bp.size() - 1;
    QuadraticBSpline proto;
    proto.breakpoints = bp;
    proto.coefficients.assign(m + 2, 0.0);
    const std::vector<double> grev = proto.greville_abscissae();
    std::vector<double> inc(m + 1);
    for (std::size_t j = 0; j < inc.size(); ++j)
        inc[j] = grev[j + 1] - grev[j];
    const auto bs = from_increments(bp, 0.0, inc, 20.0);
    for (auto _ : state) {
        auto pq = to_piecewise_quadratic(bs);
        benchmark::DoNotOptimize(pq);
    }
}
BENCHMARK(bm_to_piecewise_quadratic);

void bm_build_knots_smile(benchmark::State& state) {
    const Dataset* d = find_dataset("jackel_case2");
    for (auto _ : state) {
        auto k = build_knots(KnotSetKind::smile_implied, d->slice);
        benchmark::DoNotOptimize(k);
    }
}
BENCHMARK(bm_build_knots_smile);

void bm_residual_stack(benchmark::State& state) {
    const Dataset* d = find_dataset("jackel_case2");
    CalibrationConfig cfg;
    const auto model = initial_guess(d->slice, cfg).enforce_first_moment();
    for (auto _ : state) {
        auto r = residuals(model, d->slice, cfg.weighting);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(bm_residual_stack);

void bm_calibrate_short(benchmark::State& state) {
    const Dataset* d = find_dataset("jackel_case2");
    CalibrationConfig cfg;
    cfg.epsilon = 1e-4;
    cfg.max_iterations = 10;  // fixed work per repetition, not a full solve
    for (auto _ : state) {
        auto res = calibrate_with_knots(d->slice, cfg, d->guideline_knots);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(bm_calibrate_short);

}  // namespace

BENCHMARK_MAIN();
