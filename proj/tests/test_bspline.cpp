#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "colloc/bspline.hpp"
#include "colloc/market_data.hpp"
#include "colloc/monotone_spline.hpp"

using namespace colloc;

namespace {

// Cox-de Boor basis recursion, the direct numeric oracle for the symbolic
// conversion under test.
double basis(const std::vector<double>& t, std::size_t j, int order, double x) {
    if (order == 1) return t[j] <= x && x < t[j + 1] ? 1.0 : 0.0;
    double v = 0.0;
    const double d0 = t[j + order - 1] - t[j];
    const double d1 = t[j + order] - t[j + 1];
    if (d0 > 0.0) v += (x - t[j]) / d0 * basis(t, j, order - 1, x);
    if (d1 > 0.0) v += (t[j + order] - x) / d1 * basis(t, j + 1, order - 1, x);
    return v;
}

double de_boor_eval(const QuadraticBSpline& bs, double x) {
    const auto t = bs.knot_vector();
    double v = 0.0;
    for (std::size_t j = 0; j < bs.coefficients.size(); ++j)
        v += bs.coefficients[j] * basis(t, j, 3, x);
    return v;
}

}  // namespace

TEST_CASE("knot vector and Greville abscissae of a clamped spline") {
    QuadraticBSpline bs;
    bs.breakpoints = {0.0, 1.0, 3.0};
    bs.coefficients = {0.0, 0.0, 0.0, 0.0};
    const auto t = bs.knot_vector();
    CHECK(t == std::vector<double>{0.0, 0.0, 0.0, 1.0, 3.0, 3.0, 3.0});
    const auto g = bs.greville_abscissae();
    REQUIRE(g.size() == 4);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.5);
    CHECK(g[2] == 2.0);
    CHECK(g[3] == 3.0);
}

TEST_CASE("build_knots formulas and reference values") {
    const Dataset* d = find_dataset("jackel_case2");
    REQUIRE(d != nullptr);
    const auto atm = build_knots(KnotSetKind::atm_implied, d->slice);
    const auto smile = build_knots(KnotSetKind::smile_implied, d->slice);
    REQUIRE(atm.size() == 21);
    REQUIRE(smile.size() == 21);
    // the ATM abscissa coincides across both direct constructions
    CHECK(atm[10] == doctest::Approx(0.28574470434266874).epsilon(1e-12));
    CHECK(smile[10] == doctest::Approx(0.28574470434266874).epsilon(1e-12));
    CHECK(smile[0] == doctest::Approx(-1.557018972731845).epsilon(1e-9));
    CHECK(atm[0] == doctest::Approx(-5.574166094776138).epsilon(1e-9));
    // guideline fixture is returned verbatim
    const auto guide =
        build_knots(KnotSetKind::guideline_fixture, d->slice, d->guideline_knots);
    CHECK(guide == d->guideline_knots);
    CHECK(guide.front() == doctest::Approx(-1.6364870807848217).epsilon(1e-15));
    CHECK_THROWS_AS(build_knots(KnotSetKind::guideline_fixture, d->slice, {}),
                    std::invalid_argument);
}

TEST_CASE("from_increments builds monotone coefficients and round-trips") {
    const std::vector<double> bp{-1.0, 0.0, 0.5, 2.0};
    const std::vector<double> inc{0.1, 0.0, 0.7, 0.2};
    const auto bs = from_increments(bp, -2.0, inc, 1.0);
    REQUIRE(bs.coefficients.size() == 5);
    CHECK(bs.coefficients.front() == -2.0);
    const auto back = bs.increments();
    REQUIRE(back.size() == inc.size());
    for (std::size_t j = 0; j < inc.size(); ++j)
        CHECK(back[j] == doctest::Approx(inc[j]).epsilon(1e-15));
    CHECK_THROWS_AS(from_increments(bp, 0.0, {0.1, -0.1, 0.0, 0.0}, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(from_increments(bp, 0.0, {0.1, 1.5, 0.0, 0.0}, 1.0),
                    std::domain_error);
    // all-zero increments give the constant spline
    const auto flat = from_increments(bp, 3.0, {0, 0, 0, 0}, 1.0);
    const auto pq = to_piecewise_quadratic(flat);
    for (const auto& s : pq.segments) {
        CHECK(s.a == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(s.b == doctest::Approx(0.0));
        CHECK(s.c == doctest::Approx(0.0));
    }
}

TEST_CASE("partition of unity via the all-ones spline") {
    QuadraticBSpline bs;
    bs.breakpoints = {-2.0, -0.5, 0.3, 1.1, 4.0};
    bs.coefficients.assign(6, 1.0);
    const auto pq = to_piecewise_quadratic(bs);
    for (double x = -2.0; x <= 4.0; x += 0.006)
        CHECK(eval(pq, std::min(x, 4.0)) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("uniform increments on uniform knots give an affine interior") {
    const std::vector<double> bp{0.0, 1.0, 2.0, 3.0, 4.0};
    const auto bs = from_increments(bp, 0.0, {0.5, 0.5, 0.5, 0.5, 0.5}, 1.0);
    const auto pq = to_piecewise_quadratic(bs);
    // away from the clamped ends the curvature vanishes
    for (std::size_t j = 1; j + 1 < pq.segment_count(); ++j)
        CHECK(pq.segments[j].c == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("symbolic conversion matches the de Boor oracle on random splines") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        QuadraticBSpline bs;
        double x = -3.0;
        const int m = 3 + static_cast<int>(u(rng) * 8);
        for (int i = 0; i <= m; ++i) {
            bs.breakpoints.push_back(x);
            x += 0.1 + 2.0 * u(rng);
        }
        double a = -1.0;
        for (int j = 0; j < m + 2; ++j) {
            bs.coefficients.push_back(a);
            a += u(rng);
        }
        const auto pq = to_piecewise_quadratic(bs);
        CHECK(audit_monotonicity(pq).monotone);
        for (int i = 0; i < 40; ++i) {
            const double t = bs.breakpoints.front() +
                             (bs.breakpoints.back() - bs.breakpoints.front()) *
                                 0.9999 * u(rng);
            CHECK(eval(pq, t) == doctest::Approx(de_boor_eval(bs, t))
                                     .epsilon(1e-13));
        }
    }
}

TEST_CASE("conversion stays finite and monotone on nearly coincident knots") {
    // gap pattern mirroring the hardest bundled fixture: consecutive knots
    // separated by ~4e-7 near the right end
    QuadraticBSpline bs;
    bs.breakpoints = {3.4224, 3.4443005865798333, 3.4453202609481752,
                      3.4453469662892697, 3.4453473893808613};
    bs.coefficients = {0.0, 0.3, 0.31, 0.311, 0.3111, 0.31111};
    const auto pq = to_piecewise_quadratic(bs);
    CHECK(audit_monotonicity(pq).monotone);
    // values at the breakpoints must agree with the oracle despite the
    // 1/gap^2 growth of the basis coefficients
    for (std::size_t j = 0; j + 1 < bs.breakpoints.size(); ++j) {
        const double t = bs.breakpoints[j];
        CHECK(eval(pq, t) == doctest::Approx(de_boor_eval(bs, t)).epsilon(1e-12));
    }
    CHECK(pq.value_end == doctest::Approx(0.31111).epsilon(1e-12));
}
