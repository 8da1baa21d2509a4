#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "colloc/market_data.hpp"
#include "colloc/monotone_spline.hpp"

using namespace colloc;

namespace {

InterpolationData linear_data(double slope, int n = 6) {
    InterpolationData d;
    for (int i = 0; i <= n; ++i) {
        d.abscissae.push_back(0.5 * i);
        d.ordinates.push_back(1.0 + slope * 0.5 * i);
    }
    return d;
}

void check_c1(const PiecewiseQuadratic& pq) {
    for (std::size_t j = 0; j + 1 < pq.segment_count(); ++j) {
        const double dx = pq.knots[j + 1] - pq.knots[j];
        const auto& s = pq.segments[j];
        const auto& t = pq.segments[j + 1];
        const double val = s.a + s.b * dx + s.c * dx * dx;
        const double der = s.b + 2.0 * s.c * dx;
        CHECK(val == doctest::Approx(t.a).epsilon(1e-12));
        CHECK(der == doctest::Approx(t.b).epsilon(1e-11));
    }
    const auto& last = pq.segments.back();
    const double dx = pq.knots.back() - pq.knots[pq.segment_count() - 1];
    CHECK(last.a + last.b * dx + last.c * dx * dx ==
          doctest::Approx(pq.value_end).epsilon(1e-12));
}

}  // namespace

TEST_CASE("secant_slopes") {
    InterpolationData two{{0.0, 1.0}, {0.0, 2.0}};
    CHECK(secant_slopes(two) == std::vector<double>{2.0});
    InterpolationData flat{{0.0, 1.0, 2.0}, {3.0, 3.0, 3.0}};
    for (double s : secant_slopes(flat)) CHECK(s == 0.0);
    // first two rows of the bundled counterexample fixture
    const XYFixture& ce = schumaker_counterexample();
    InterpolationData d{{ce.x[0], ce.x[1]}, {ce.y[0], ce.y[1]}};
    const double expected = (ce.y[1] - ce.y[0]) / (ce.x[1] - ce.x[0]);
    CHECK(secant_slopes(d)[0] == doctest::Approx(expected).epsilon(1e-15));
    CHECK(expected == doctest::Approx(0.4079).epsilon(1e-3));
}

TEST_CASE("schumaker_derivatives reproduces linear slopes") {
    const auto d = linear_data(1.7);
    for (double v : schumaker_derivatives(d))
        CHECK(v == doctest::Approx(1.7).epsilon(1e-13));
}

TEST_CASE("lam_harmonic_derivatives basics") {
    // equal secants give that secant back
    const auto lin = linear_data(0.8);
    for (double v : lam_harmonic_derivatives(lin))
        CHECK(v == doctest::Approx(0.8).epsilon(1e-13));
    // a zero secant forces a zero estimate at the shared point
    InterpolationData z{{0.0, 1.0, 2.0}, {0.0, 0.0, 1.0}};
    CHECK(lam_harmonic_derivatives(z)[1] == 0.0);
    // unweighted harmonic mean of secants 1 and 3 on uniform spacing is 1.5
    InterpolationData h{{0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}};
    CHECK(lam_harmonic_derivatives(h, false)[1] ==
          doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("schumaker_build: linear data stays a single-slope spline") {
    const auto d = linear_data(2.0);
    const auto pq = schumaker_build(d, schumaker_derivatives(d));
    for (const auto& s : pq.segments) {
        CHECK(s.b == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(s.c == doctest::Approx(0.0).epsilon(1e-13));
    }
}

TEST_CASE("counterexample data: original estimates break monotonicity, "
          "harmonic-mean estimates restore it") {
    const XYFixture& ce = schumaker_counterexample();
    REQUIRE(ce.x.size() == 21);
    InterpolationData d{ce.x, ce.y};
    CHECK(std::is_sorted(d.ordinates.begin(), d.ordinates.end()));

    const auto broken = schumaker_build(d, schumaker_derivatives(d));
    const auto rep = audit_monotonicity(broken);
    CHECK(rep.monotone == false);
    CHECK(rep.worst_derivative < -0.04);
    CHECK(rep.worst_location == doctest::Approx(3.03).epsilon(0.02));

    const auto fixed = schumaker_build(d, lam_harmonic_derivatives(d));
    CHECK(audit_monotonicity(fixed).monotone);
    // still interpolates exactly
    for (std::size_t i = 0; i < d.abscissae.size(); ++i)
        CHECK(eval(fixed, d.abscissae[i]) ==
              doctest::Approx(d.ordinates[i]).epsilon(1e-12));
}

TEST_CASE("eval / eval_derivative / boundary conventions") {
    PiecewiseQuadratic pq;
    pq.knots = {0.0, 1.0};
    pq.segments = {{1.0, 2.0, 0.5}};
    pq.value_end = 1.0 + 2.0 + 0.5;
    CHECK(eval(pq, 0.0) == 1.0);
    CHECK(eval(pq, 0.5) == doctest::Approx(2.125).epsilon(1e-15));
    CHECK(eval(pq, 1.0) == doctest::Approx(pq.value_end).epsilon(1e-15));
    CHECK(eval_derivative(pq, 0.0) == 2.0);
    CHECK(eval_derivative(pq, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(eval(pq, -0.1), std::out_of_range);
    CHECK_THROWS_AS(eval(pq, 1.1), std::out_of_range);
}

TEST_CASE("derivative matches central finite differences on random splines") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        InterpolationData d;
        double x = -2.0, y = -1.0;
        for (int i = 0; i < 8; ++i) {
            d.abscissae.push_back(x);
            d.ordinates.push_back(y);
            x += 0.2 + u(rng);
            y += u(rng);
        }
        const auto pq = schumaker_build(d, lam_harmonic_derivatives(d));
        check_c1(pq);
        for (int i = 0; i < 50; ++i) {
            const double t = pq.x_min() + 1e-3 +
                             (pq.x_max() - pq.x_min() - 2e-3) * u(rng);
            const double h = 1e-6;
            const double fd = (eval(pq, t + h) - eval(pq, t - h)) / (2.0 * h);
            CHECK(eval_derivative(pq, t) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("inverse round trip and oracle") {
    const XYFixture& ce = schumaker_counterexample();
    InterpolationData d{ce.x, ce.y};
    const auto pq = schumaker_build(d, lam_harmonic_derivatives(d));
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = pq.x_min() + (pq.x_max() - pq.x_min()) * u(rng);
        const double y = eval(pq, x);
        const double back = inverse(pq, y);
        CHECK(std::abs(eval(pq, back) - y) <= 1e-12 * std::max(1.0, std::abs(y)));
    }
    // knot values map back to knots
    CHECK(inverse(pq, pq.value_begin()) == doctest::Approx(pq.x_min()));
    CHECK(inverse(pq, pq.value_end) == doctest::Approx(pq.x_max()).epsilon(1e-12));
    CHECK_THROWS_AS(inverse(pq, pq.value_end + 1.0), std::out_of_range);
}

TEST_CASE("audit_monotonicity is exact on a hand-built segment") {
    PiecewiseQuadratic pq;
    pq.knots = {0.0, 1.0};
    pq.segments = {{0.0, 1.0, -1.0}};  // derivative 1 - 2x, minimum -1 at x=1
    pq.value_end = 0.0;
    const auto rep = audit_monotonicity(pq);
    CHECK(rep.monotone == false);
    CHECK(rep.worst_derivative == doctest::Approx(-1.0));
    CHECK(rep.worst_location == doctest::Approx(1.0));
}

TEST_CASE("harmonic-mean build is monotone on random monotone data") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        InterpolationData d;
        double x = 0.0, y = 0.0;
        const int n = 4 + static_cast<int>(u(rng) * 10);
        for (int i = 0; i < n; ++i) {
            d.abscissae.push_back(x);
            d.ordinates.push_back(y);
            x += 0.05 + u(rng);
            // include flat runs and tiny steps
            const double roll = u(rng);
            y += roll < 0.2 ? 0.0 : (roll < 0.4 ? 1e-9 : u(rng));
        }
        const auto pq = schumaker_build(d, lam_harmonic_derivatives(d));
        CHECK(audit_monotonicity(pq).monotone);
        CHECK(pq.knots.size() <= 2 * d.abscissae.size() - 1);
        for (std::size_t i = 0; i < d.abscissae.size(); ++i)
            CHECK(std::abs(eval(pq, d.abscissae[i]) - d.ordinates[i]) <= 1e-12);
    }
}
