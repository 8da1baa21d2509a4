// Microbenchmarks for the closed-form pricing path: segment integrals across
// their three numerical branches, full call prices, densities, and the
// monotone-spline inverse they all route through.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "colloc/bspline.hpp"
#include "colloc/collocation_model.hpp"
#include "colloc/market_data.hpp"
#include "colloc/monotone_spline.hpp"
#include "colloc/special_functions.hpp"

namespace {

using namespace colloc;

CollocationModel fixture_model() {
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
    const auto bs = from_increments(bp, std::log(d->slice.strikes.front()), inc,
                                    20.0);
    return CollocationModel::with_natural_wings(to_piecewise_quadratic(bs), 0.0,
                                                0.0, d->slice.forward,
                                                d->slice.maturity)
        .enforce_first_moment();
}

std::vector<double> fixture_strikes(const CollocationModel& model, int n) {
    std::vector<double> k(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        k[static_cast<std::size_t>(i)] =
            std::exp(model.g(-3.0 + 6.0 * i / (n - 1)));
    return k;
}

void bm_segment_integral_gaussian(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(segment_integral(0.1, 0.8, -0.3, 0.2, -0.5, 1.5));
}
BENCHMARK(bm_segment_integral_gaussian);

void bm_segment_integral_oscillatory(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(segment_integral(0.1, 0.8, 1.3, 0.2, -0.5, 1.5));
}
BENCHMARK(bm_segment_integral_oscillatory);

void bm_segment_integral_linear_limit(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            segment_integral(0.1, 0.8, 0.5 + 1e-14, 0.2, -0.5, 1.5));
}
BENCHMARK(bm_segment_integral_linear_limit);

void bm_price_call(benchmark::State& state) {
    const auto model = fixture_model();
    const auto strikes = fixture_strikes(model, 64);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.price_call(strikes[i]));
        i = (i + 1) % strikes.size();
    }
}
BENCHMARK(bm_price_call);

void bm_density(benchmark::State& state) {
    const auto model = fixture_model();
    const auto strikes = fixture_strikes(model, 64);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.density(strikes[i]));
        i = (i + 1) % strikes.size();
    }
}
BENCHMARK(bm_density);

void bm_g_inverse(benchmark::State& state) {
    const auto model = fixture_model();
    const auto strikes = fixture_strikes(model, 64);
    std::vector<double> lnk(strikes.size());
    for (std::size_t j = 0; j < strikes.size(); ++j)
        lnk[j] = std::log(strikes[j]);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.g_inverse(lnk[i]));
        i = (i + 1) % lnk.size();
    }
}
BENCHMARK(bm_g_inverse);

void bm_first_moment(benchmark::State& state) {
    const auto model = fixture_model();
    for (auto _ : state) benchmark::DoNotOptimize(model.first_moment());
}
BENCHMARK(bm_first_moment);

void bm_implied_vol(benchmark::State& state) {
    const auto model = fixture_model();
    const double F = model.forward(), T = model.maturity();
    const auto strikes = fixture_strikes(model, 64);
    std::vector<double> prices(strikes.size());
    for (std::size_t j = 0; j < strikes.size(); ++j)
        prices[j] = model.price_call(strikes[j]);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(implied_vol(prices[i], F, strikes[i], T, true));
        i = (i + 1) % strikes.size();
    }
}
BENCHMARK(bm_implied_vol);

}  // namespace
