#pragma once

#include "colloc/monotone_spline.hpp"

namespace colloc {

/// Exponential extrapolation of g outside the spline knots:
///   left : g(x) = a0 + s_left (x - x0) + c_left (x - x0)^2,  x < x0
///   right: g(x) = aM + s_right (x - xM) + c_right (x - xM)^2, x > xM
/// c_left <= 0 and 0 <= c_right < 1/2 keep the first moment finite; the
/// curvature fixes the asymptotic implied-variance slope on its wing.
struct WingSpec {
    double s_left = 0.0;
    double s_right = 0.0;
    double c_left = 0.0;
    double c_right = 0.0;
};

struct DensityPoint {
    double strike = 0.0;
    double density = 0.0;
};

/// The priced object: asset = exp(g(X)) with X standard normal, g the spline
/// continued by the wings. Construction validates monotonicity and the
/// curvature ranges. In the default mode the wing slopes equal g' at the
/// boundary knots.
class CollocationModel {
public:
    CollocationModel(PiecewiseQuadratic spline, WingSpec wings, double forward,
                     double maturity);

    /// Wing slopes from the boundary derivatives of the spline (the
    /// continuous-derivative default).
    static CollocationModel with_natural_wings(PiecewiseQuadratic spline,
                                               double c_left, double c_right,
                                               double forward, double maturity);

    /// Rebuild a model from serialized state, including the moment-enforcement
    /// flag and accumulated shift, without re-running the shift (so restored
    /// models price bit-identically to the originals).
    static CollocationModel restore(PiecewiseQuadratic spline, WingSpec wings,
                                    double forward, double maturity,
                                    bool moment_enforced, double moment_shift);

    const PiecewiseQuadratic& spline() const { return spline_; }
    const WingSpec& wings() const { return wings_; }
    double forward() const { return forward_; }
    double maturity() const { return maturity_; }
    bool moment_enforced() const { return moment_enforced_; }
    /// ln F - ln M1 applied by enforce_first_moment (0 before enforcement).
    double moment_shift() const { return moment_shift_; }

    double g(double x) const;
    double g_derivative(double x) const;
    /// x with g(x) = log_strike, across wing and body regions. Returns -inf
    /// when the strike lies below the attainable left range (flat wing);
    /// throws std::out_of_range above the right range.
    double g_inverse(double log_strike) const;

    /// E[exp(g(X))], closed form.
    double first_moment() const;
    /// ln E[exp(g(X))], safe against overflow for extreme ordinates.
    double log_first_moment() const;

    /// Shifts all ordinates by ln F - ln M1 so that the first moment equals
    /// the forward exactly; slopes and curvatures are unchanged.
    CollocationModel enforce_first_moment() const;

    /// Undiscounted call price, Eq-2-style closed form. Requires a
    /// moment-enforced model.
    double price_call(double strike) const;

    /// Risk-neutral density phi(x) / (K g'(x)) at x = g_inverse(ln K).
    DensityPoint density(double strike) const;

private:
    PiecewiseQuadratic spline_;
    WingSpec wings_;
    double forward_;
    double maturity_;
    bool moment_enforced_ = false;
    double moment_shift_ = 0.0;
};

/// Closed form of int_lo^hi exp(a + b (x-xref) + c (x-xref)^2) phi(x) dx.
/// Handles 1-2c < 0 on finite intervals through the rescaled imaginary error
/// function; infinite endpoints with 1-2c <= 0 throw std::domain_error.
double segment_integral(double a, double b, double c, double xref, double lo,
                        double hi);

/// log of segment_integral for overflow-free accumulation; -inf when the mass
/// underflows.
double segment_integral_log(double a, double b, double c, double xref,
                            double lo, double hi);

/// Eq-3 linear-exponent special case: exp(y - s x + s^2/2) (Phi(hi-s) -
/// Phi(lo-s)); identical to segment_integral(y, s, 0, x, lo, hi).
double extrapolation_integral(double s, double x, double y, double lo,
                              double hi);

}  // namespace colloc
