#include "colloc/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "colloc/market_data.hpp"

namespace colloc {

namespace {

void check_breakpoints(const std::vector<double>& bp) {
    if (bp.size() < 2)
        throw std::invalid_argument("bspline: need at least two breakpoints");
    for (std::size_t i = 1; i < bp.size(); ++i)
        if (!(bp[i] > bp[i - 1]))
            throw std::invalid_argument("bspline: breakpoints not strictly increasing");
}

// Quadratic polynomial in the global coordinate, p(x) = c0 + c1 x + c2 x^2.
struct Poly2 {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;

    Poly2 operator+(const Poly2& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
    Poly2 scaled(double f) const { return {f * c0, f * c1, f * c2}; }
    // multiply by the linear weight (x - t) / d; caller guarantees the
    // product stays quadratic (input is at most linear)
    Poly2 ramp_up(double t, double d) const {
        return Poly2{-t * c0 / d, (c0 - t * c1) / d, c1 / d};
    }
    double at(double x) const { return c0 + x * (c1 + x * c2); }
    double derivative_at(double x) const { return c1 + 2.0 * c2 * x; }
};

}  // namespace

std::vector<double> QuadraticBSpline::knot_vector() const {
    std::vector<double> t;
    t.reserve(breakpoints.size() + 4);
    t.push_back(breakpoints.front());
    t.push_back(breakpoints.front());
    for (double b : breakpoints) t.push_back(b);
    t.push_back(breakpoints.back());
    t.push_back(breakpoints.back());
    return t;
}

std::vector<double> QuadraticBSpline::greville_abscissae() const {
    const std::vector<double> t = knot_vector();
    std::vector<double> g(coefficients.size());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = 0.5 * (t[j + 1] + t[j + 2]);
    return g;
}

std::vector<double> QuadraticBSpline::increments() const {
    std::vector<double> inc(coefficients.size() - 1);
    for (std::size_t j = 0; j + 1 < coefficients.size(); ++j)
        inc[j] = coefficients[j + 1] - coefficients[j];
    return inc;
}

std::vector<double> build_knots(KnotSetKind kind, const MarketSlice& market,
                                const std::vector<double>& guideline_knots,
                                double repair_gap) {
    market.validate();
    if (kind == KnotSetKind::guideline_fixture) {
        if (guideline_knots.empty())
            throw std::invalid_argument(
                "build_knots: no guideline knot fixture available for this dataset");
        return guideline_knots;
    }
    const double lnF = std::log(market.forward);
    const double rt = std::sqrt(market.maturity);
    double b_atm = 0.0;
    if (kind == KnotSetKind::atm_implied) {
        // vol at the forward; calibrator::atm_vol for the general fit
        // (callers pass pre-interpolated markets in practice)
        double best = market.vols.front();
        double best_d = std::abs(std::log(market.strikes.front()) - lnF);
        for (std::size_t i = 1; i < market.size(); ++i) {
            const double d = std::abs(std::log(market.strikes[i]) - lnF);
            if (d < best_d) { best_d = d; best = market.vols[i]; }
        }
        b_atm = best * rt;
    }
    std::vector<double> x(market.size());
    for (std::size_t i = 0; i < market.size(); ++i) {
        const double b = kind == KnotSetKind::atm_implied ? b_atm : market.vols[i] * rt;
        x[i] = (std::log(market.strikes[i]) + 0.5 * b * b - lnF) / b;
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] <= x[i - 1] + repair_gap) {
            if (repair_gap <= 0.0) {
                std::ostringstream os;
                os << "build_knots: abscissae not increasing at rows " << i - 1
                   << "," << i << " (" << x[i - 1] << " >= " << x[i] << ")";
                throw std::runtime_error(os.str());
            }
            x[i] = x[i - 1] + repair_gap;
        }
    }
    return x;
}

QuadraticBSpline from_increments(const std::vector<double>& breakpoints,
                                 double alpha0,
                                 const std::vector<double>& increments,
                                 double lambda_max) {
    check_breakpoints(breakpoints);
    if (increments.size() != breakpoints.size())
        throw std::invalid_argument(
            "from_increments: expected one increment per coefficient gap "
            "(breakpoints + 1 coefficients)");
    QuadraticBSpline bs;
    bs.breakpoints = breakpoints;
    bs.coefficients.resize(increments.size() + 1);
    bs.coefficients[0] = alpha0;
    for (std::size_t j = 0; j < increments.size(); ++j) {
        if (!(increments[j] >= 0.0) || increments[j] > lambda_max)
            throw std::domain_error("from_increments: increment outside [0, lambda_max]");
        bs.coefficients[j + 1] = bs.coefficients[j] + increments[j];
    }
    return bs;
}

PiecewiseQuadratic to_piecewise_quadratic(const QuadraticBSpline& bs) {
    check_breakpoints(bs.breakpoints);
    if (bs.coefficients.size() != bs.breakpoints.size() + 1)
        throw std::invalid_argument("bspline: coefficient count must be breakpoints + 1");
    const std::vector<double> t = bs.knot_vector();
    const std::size_t m = bs.breakpoints.size() - 1;  // segments

    PiecewiseQuadratic pq;
    pq.knots = bs.breakpoints;
    pq.segments.resize(m);
    for (std::size_t s = 0; s < m; ++s) {
        // span [t[i], t[i+1]) with i = s + 2 in the clamped vector; active
        // basis functions are j = s, s+1, s+2. The recursion runs in the
        // local variable u = x - breakpoint[s]: with nearly coincident knots
        // the basis coefficients grow like 1/gap^2, and evaluating such a
        // polynomial at a large global x would cancel catastrophically.
        const std::size_t i = s + 2;
        const double x0 = bs.breakpoints[s];
        Poly2 g{};
        for (std::size_t j = s; j <= s + 2; ++j) {
            // Cox-de Boor on the span, run symbolically on polynomials
            // degree 0: B_{l,1} = 1 on [t_l, t_{l+1})
            Poly2 deg0[3] = {};
            if (j <= i && i < j + 3) deg0[i - j] = Poly2{1.0, 0.0, 0.0};
            // degree 1: B_{l,2}, l = j, j+1
            Poly2 deg1[2] = {};
            for (std::size_t k = 0; k < 2; ++k) {
                const std::size_t l = j + k;
                const double d0 = t[l + 1] - t[l];
                const double d1 = t[l + 2] - t[l + 1];
                Poly2 acc{};
                if (d0 > 0.0) acc = acc + deg0[k].ramp_up(t[l] - x0, d0);
                // second weight is (t_{l+2} - x)/d1 = -(x - t_{l+2})/d1
                if (d1 > 0.0)
                    acc = acc + deg0[k + 1].ramp_up(t[l + 2] - x0, d1).scaled(-1.0);
                deg1[k] = acc;
            }
            // degree 2: B_{j,3}
            Poly2 basis{};
            {
                const double d0 = t[j + 2] - t[j];
                const double d1 = t[j + 3] - t[j + 1];
                if (d0 > 0.0) basis = basis + deg1[0].ramp_up(t[j] - x0, d0);
                if (d1 > 0.0)
                    basis = basis + deg1[1].ramp_up(t[j + 3] - x0, d1).scaled(-1.0);
            }
            g = g + basis.scaled(bs.coefficients[j]);
        }
        pq.segments[s].a = g.c0;  // g at u = 0
        pq.segments[s].b = g.c1;
        pq.segments[s].c = g.c2;
        if (s == m - 1) pq.value_end = g.at(bs.breakpoints[s + 1] - x0);
    }
    return pq;
}

}  // namespace colloc
