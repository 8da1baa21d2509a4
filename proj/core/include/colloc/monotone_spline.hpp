#pragma once

#include <cstddef>
#include <vector>

namespace colloc {

/// C^1 piecewise quadratic: g(x) = a_j + b_j (x - k_j) + c_j (x - k_j)^2 on
/// [knots[j], knots[j+1]]. `value_end` is g at the last knot.
struct PiecewiseQuadratic {
    struct Segment {
        double a, b, c;
    };
    std::vector<double> knots;      // strictly increasing, size m+1
    std::vector<Segment> segments;  // size m
    double value_end = 0.0;

    std::size_t segment_count() const { return segments.size(); }
    double x_min() const { return knots.front(); }
    double x_max() const { return knots.back(); }
    double value_begin() const { return segments.front().a; }
    /// Derivative at the left/right boundary.
    double slope_begin() const { return segments.front().b; }
    double slope_end() const;
};

/// Interpolation sites: abscissae strictly increasing, ordinates the values
/// to reproduce.
struct InterpolationData {
    std::vector<double> abscissae;
    std::vector<double> ordinates;
};

struct MonotonicityReport {
    bool monotone = false;
    double worst_derivative = 0.0;
    double worst_location = 0.0;
};

/// Secant slopes between consecutive data points (size N for N+1 points).
std::vector<double> secant_slopes(const InterpolationData& data);

/// Derivative estimates from the original Schumaker construction
/// (arc-length-weighted secant averages, extrapolated endpoints). These do
/// not guarantee a monotone interpolant on monotone data.
std::vector<double> schumaker_derivatives(const InterpolationData& data);

/// Harmonic-mean derivative estimates (Lam's variant). Interior estimates are
/// zero where the secants change sign, otherwise the interval-length-weighted
/// harmonic mean of the adjacent secants clipped into the safe region
/// |d| <= 2 min(|s-|, |s+|); endpoints use the one-sided secant clipped to
/// [0, 3s]. On monotone data the resulting Schumaker spline is monotone.
std::vector<double> lam_harmonic_derivatives(const InterpolationData& data,
                                             bool length_weighted = true);

/// Schumaker shape-preserving C^1 quadratic spline through the data with the
/// given endpoint derivative estimates (one per point). Inserts at most one
/// knot per data interval.
PiecewiseQuadratic schumaker_build(const InterpolationData& data,
                                   const std::vector<double>& derivatives);

/// Value of the spline; x must lie within [knots.front(), knots.back()].
double eval(const PiecewiseQuadratic& pq, double x);

/// Derivative of the spline at x (right-sided at interior knots).
double eval_derivative(const PiecewiseQuadratic& pq, double x);

/// Inverse of a monotone nondecreasing spline. y must lie in the value range.
double inverse(const PiecewiseQuadratic& pq, double y);

/// Monotonicity audit: the derivative of each quadratic segment attains its
/// extrema at the segment endpoints. A derivative down to a few ulps below
/// zero (relative to the largest slope) still counts as monotone, since the
/// stored (b, c) representation cannot express an exactly-flat end slope.
MonotonicityReport audit_monotonicity(const PiecewiseQuadratic& pq);

}  // namespace colloc
