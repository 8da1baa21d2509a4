#pragma once

#include <functional>
#include <stdexcept>

namespace colloc {

/// Thrown by integrate() when the refinement budget is exhausted before the
/// requested tolerance is met. Carries the best estimate and its error bound.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate(estimate), error_bound(error_bound) {}
    double estimate;
    double error_bound;
};

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, Phi(-inf)=0, Phi(inf)=1. Absolute error <= 1e-15.
double norm_cdf(double x);

/// Mills ratio Phi(-t)/phi(t). Accurate for all t; uses the asymptotic
/// continued fraction for t >= 8 where the direct quotient degrades.
double norm_mills_ratio(double t);

/// log(Phi(x)), accurate in the far left tail where Phi underflows.
double log_norm_cdf(double x);

/// log(Phi(hi) - Phi(lo)), lo < hi, computed on the better-conditioned side
/// of the distribution. Returns -inf when the mass underflows.
double log_norm_cdf_diff(double lo, double hi);

/// Dawson's integral D(x) = exp(-x^2) * int_0^x exp(t^2) dt.
double dawson(double x);

/// Imaginary error function. Throws std::overflow_error once exp(x^2)
/// leaves double range (|x| > ~26.6); use dawson() for the rescaled form
/// erfi(x)*exp(-x^2) = 2/sqrt(pi) * D(x).
double erfi(double x);

/// Undiscounted Black-76 option quote.
struct BSQuote {
    double forward;
    double strike;
    double maturity;
    double vol;
    bool is_call = true;
};

/// Undiscounted Black-76 price.
double black_scholes_price(const BSQuote& q);

/// dPrice/dVol of the undiscounted Black-76 formula (same for calls and puts).
double black_scholes_vega(double forward, double strike, double maturity, double vol);

/// Inverts black_scholes_price in the vol. The price must lie strictly inside
/// the no-arbitrage band; otherwise a std::domain_error names the violated
/// bound. Round-trips vols in [1e-4, 5] to 1e-12 relative.
double implied_vol(double price, double forward, double strike, double maturity,
                   bool is_call);

/// Adaptive Gauss-Kronrod (15 point) quadrature with absolute-plus-relative
/// target |err| <= tol * max(1, |I|). Infinite endpoints are truncated at
/// |x| = 12; every integrand this library integrates is dominated by the
/// normal density, whose tail mass beyond 12 is below 1e-32.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol);

}  // namespace colloc
