#include "colloc/monotone_spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace colloc {

double PiecewiseQuadratic::slope_end() const {
    const Segment& s = segments.back();
    const double d = knots[knots.size() - 1] - knots[knots.size() - 2];
    return s.b + 2.0 * s.c * d;
}

namespace {

void check_data(const InterpolationData& data) {
    if (data.abscissae.size() != data.ordinates.size())
        throw std::invalid_argument("interpolation data: length mismatch");
    if (data.abscissae.size() < 2)
        throw std::invalid_argument("interpolation data: need at least two points");
    for (std::size_t i = 1; i < data.abscissae.size(); ++i)
        if (!(data.abscissae[i] > data.abscissae[i - 1]))
            throw std::invalid_argument("interpolation data: abscissae not increasing");
}

// Index of the segment containing x, right-open intervals, last knot
// belonging to the last segment.
std::size_t locate(const std::vector<double>& knots, double x) {
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    std::size_t j = static_cast<std::size_t>(it - knots.begin());
    if (j == 0) return 0;
    return std::min(j - 1, knots.size() - 2);
}

}  // namespace

std::vector<double> secant_slopes(const InterpolationData& data) {
    check_data(data);
    const std::size_t n = data.abscissae.size() - 1;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = (data.ordinates[i + 1] - data.ordinates[i]) /
               (data.abscissae[i + 1] - data.abscissae[i]);
    return s;
}

std::vector<double> schumaker_derivatives(const InterpolationData& data) {
    check_data(data);
    const std::vector<double> s = secant_slopes(data);
    const std::size_t n = s.size();
    std::vector<double> d(n + 1, 0.0);
    std::vector<double> len(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = data.abscissae[i + 1] - data.abscissae[i];
        const double dy = data.ordinates[i + 1] - data.ordinates[i];
        len[i] = std::hypot(dx, dy);
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (s[i - 1] * s[i] > 0.0)
            d[i] = (len[i - 1] * s[i - 1] + len[i] * s[i]) / (len[i - 1] + len[i]);
        else
            d[i] = 0.0;
    }
    d[0] = 0.5 * (3.0 * s[0] - d[1]);
    d[n] = 0.5 * (3.0 * s[n - 1] - d[n - 1]);
    return d;
}

std::vector<double> lam_harmonic_derivatives(const InterpolationData& data,
                                             bool length_weighted) {
    check_data(data);
    const std::vector<double> s = secant_slopes(data);
    const std::size_t n = s.size();
    std::vector<double> d(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double s0 = s[i - 1], s1 = s[i];
        if (s0 * s1 <= 0.0) {
            d[i] = 0.0;
            continue;
        }
        double h;
        if (length_weighted) {
            const double w0 = data.abscissae[i] - data.abscissae[i - 1];
            const double w1 = data.abscissae[i + 1] - data.abscissae[i];
            h = (w0 + w1) / (w0 / s0 + w1 / s1);
        } else {
            h = 2.0 / (1.0 / s0 + 1.0 / s1);
        }
        // clip into the region where the Schumaker interpolant keeps the
        // local monotonicity for any admissible inserted knot
        const double cap = 2.0 * std::min(std::abs(s0), std::abs(s1));
        d[i] = std::copysign(std::min(std::abs(h), cap), h);
    }
    auto one_sided = [](double sec) {
        if (sec >= 0.0) return std::min(std::max(sec, 0.0), 3.0 * sec);
        return std::max(std::min(sec, 0.0), 3.0 * sec);
    };
    d[0] = one_sided(s[0]);
    d[n] = one_sided(s[n - 1]);
    return d;
}

PiecewiseQuadratic schumaker_build(const InterpolationData& data,
                                   const std::vector<double>& derivatives) {
    check_data(data);
    if (derivatives.size() != data.abscissae.size())
        throw std::invalid_argument("schumaker_build: one derivative per data point required");

    PiecewiseQuadratic pq;
    pq.knots.push_back(data.abscissae.front());
    const std::size_t n = data.abscissae.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = data.abscissae[i], t2 = data.abscissae[i + 1];
        const double z1 = data.ordinates[i], z2 = data.ordinates[i + 1];
        const double s1 = derivatives[i], s2 = derivatives[i + 1];
        const double dt = t2 - t1;
        const double sec = (z2 - z1) / dt;
        const double scale = std::abs(s1) + std::abs(s2) + std::abs(sec);
        if (std::abs(s1 + s2 - 2.0 * sec) <= 1e-14 * std::max(1.0, scale)) {
            // single quadratic fits both slopes
            pq.segments.push_back({z1, s1, (s2 - s1) / (2.0 * dt)});
            pq.knots.push_back(t2);
            continue;
        }
        // insert one knot, placed per the Schumaker rule
        double xi;
        if ((s1 - sec) * (s2 - sec) >= 0.0) {
            xi = 0.5 * (t1 + t2);
        } else if (std::abs(s2 - sec) < std::abs(s1 - sec)) {
            const double xbar = t1 + 2.0 * dt * (s2 - sec) / (s2 - s1);
            xi = 0.5 * (t1 + xbar);
        } else {
            const double xbar = t2 + 2.0 * dt * (s1 - sec) / (s2 - s1);
            xi = 0.5 * (t2 + xbar);
        }
        const double alpha = xi - t1, beta = t2 - xi;
        double sbar = (2.0 * (z2 - z1) - (alpha * s1 + beta * s2)) / dt;
        // for monotone data and admissible derivatives the mid-knot slope is
        // nonnegative in exact arithmetic; snap roundoff-scale negatives so the
        // monotonicity guarantee holds bit-exactly
        if (sbar < 0.0 && sbar >= -1e-13 * std::max(1.0, scale)) sbar = 0.0;
        const double c1 = (sbar - s1) / (2.0 * alpha);
        const double zmid = z1 + alpha * s1 + c1 * alpha * alpha;
        const double c2 = (s2 - sbar) / (2.0 * beta);
        pq.segments.push_back({z1, s1, c1});
        pq.knots.push_back(xi);
        pq.segments.push_back({zmid, sbar, c2});
        pq.knots.push_back(t2);
    }
    pq.value_end = data.ordinates.back();
    return pq;
}

double eval(const PiecewiseQuadratic& pq, double x) {
    if (x < pq.x_min() || x > pq.x_max())
        throw std::out_of_range("piecewise quadratic: x outside knot range");
    const std::size_t j = locate(pq.knots, x);
    const PiecewiseQuadratic::Segment& s = pq.segments[j];
    const double u = x - pq.knots[j];
    return s.a + u * (s.b + u * s.c);
}

double eval_derivative(const PiecewiseQuadratic& pq, double x) {
    if (x < pq.x_min() || x > pq.x_max())
        throw std::out_of_range("piecewise quadratic: x outside knot range");
    const std::size_t j = locate(pq.knots, x);
    const PiecewiseQuadratic::Segment& s = pq.segments[j];
    return s.b + 2.0 * s.c * (x - pq.knots[j]);
}

double inverse(const PiecewiseQuadratic& pq, double y) {
    MonotonicityReport rep = audit_monotonicity(pq);
    if (!rep.monotone)
        throw std::invalid_argument("inverse: spline is not monotone nondecreasing");
    const double y0 = pq.value_begin();
    const double y1 = pq.value_end;
    if (y < y0 || y > y1)
        throw std::out_of_range("inverse: y outside value range");
    // binary search on segment start values
    std::size_t lo = 0, hi = pq.segment_count();  // segment index in [lo, hi)
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (pq.segments[mid].a <= y)
            lo = mid;
        else
            hi = mid;
    }
    std::size_t j = lo;
    // deterministic tie-break: a flat run at value y resolves to its left end
    while (j > 0 && pq.segments[j].a == y && pq.segments[j - 1].b == 0.0 &&
           pq.segments[j - 1].c == 0.0 && pq.segments[j - 1].a == y)
        --j;
    const PiecewiseQuadratic::Segment& s = pq.segments[j];
    const double dt = pq.knots[j + 1] - pq.knots[j];
    double u;
    if (std::abs(s.c) * dt <= 1e-14 * std::abs(s.b)) {
        u = s.b != 0.0 ? (y - s.a) / s.b : 0.0;
    } else {
        // stable quadratic root inside [0, dt]
        const double disc = s.b * s.b - 4.0 * s.c * (s.a - y);
        const double sq = std::sqrt(std::max(disc, 0.0));
        if (s.b >= 0.0)
            u = 2.0 * (y - s.a) / (s.b + sq);
        else
            u = (-s.b + sq) / (2.0 * s.c);
    }
    u = std::clamp(u, 0.0, dt);
    return pq.knots[j] + u;
}

MonotonicityReport audit_monotonicity(const PiecewiseQuadratic& pq) {
    MonotonicityReport rep;
    rep.worst_derivative = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (std::size_t j = 0; j < pq.segment_count(); ++j) {
        const PiecewiseQuadratic::Segment& s = pq.segments[j];
        const double dt = pq.knots[j + 1] - pq.knots[j];
        const double left = s.b;
        const double right = s.b + 2.0 * s.c * dt;
        scale = std::max({scale, std::abs(left), std::abs(right)});
        if (left < rep.worst_derivative) {
            rep.worst_derivative = left;
            rep.worst_location = pq.knots[j];
        }
        if (right < rep.worst_derivative) {
            rep.worst_derivative = right;
            rep.worst_location = pq.knots[j + 1];
        }
    }
    // the evaluated end slope b + 2c dt of a segment built to hit a target
    // slope carries a few ulps of roundoff relative to the largest slope;
    // a zero-tolerance audit would flag exactly-flat constructions as
    // violations, so allow that roundoff band
    rep.monotone = rep.worst_derivative >= -1e-12 * scale;
    return rep;
}

}  // namespace colloc
