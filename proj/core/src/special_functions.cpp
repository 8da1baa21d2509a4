#include "colloc/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace colloc {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kInvSqrtPi = 0.5641895835477563;
constexpr double kTruncation = 12.0;
}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double norm_cdf(double x) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-x / kSqrt2);
}

double norm_mills_ratio(double t) {
    if (std::isinf(t)) return 0.0;
    if (t < 8.0) return norm_cdf(-t) / norm_pdf(t);
    // Asymptotic continued fraction, t >> 0:
    // Phi(-t)/phi(t) = 1/t * 1/(1 + 1/(t^2 + 2/(1 + 3/(t^2 + ...))))
    const double z = t * t;
    double r = 0.0;
    for (int k = 20; k >= 1; --k) {
        if (k % 2 == 1)
            r = k / (z + r);
        else
            r = k / (1.0 + r);
    }
    return 1.0 / (t * (1.0 + r));
}

double log_norm_cdf(double x) {
    if (std::isinf(x)) return x > 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (x > -8.0) return std::log(norm_cdf(x));
    return -0.5 * x * x - std::log(kSqrt2Pi) + std::log(norm_mills_ratio(-x));
}

double log_norm_cdf_diff(double lo, double hi) {
    if (!(hi > lo)) return -std::numeric_limits<double>::infinity();
    double la, lb;
    if (hi + lo < 0.0) {
        la = log_norm_cdf(lo);
        lb = log_norm_cdf(hi);
    } else {  // use the survival side
        la = log_norm_cdf(-hi);
        lb = log_norm_cdf(-lo);
    }
    if (std::isinf(lb)) return -std::numeric_limits<double>::infinity();
    const double d = std::min(la - lb, 0.0);
    return lb + std::log1p(-std::exp(d));
}

namespace {

// erfi Maclaurin series; all terms positive, so no cancellation.
double erfi_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 400; ++n) {
        term *= x2 / n;
        const double add = term / (2 * n + 1);
        sum += add;
        if (add < 1e-17 * sum) break;
    }
    return 2.0 * kInvSqrtPi * sum;
}

// Dawson asymptotic series, valid for |x| >= ~6.
double dawson_asymptotic(double x) {
    const double ix2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= (2 * k - 1) * ix2;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / (2.0 * x);
}

}  // namespace

double dawson(double x) {
    const double ax = std::abs(x);
    if (ax < 6.5) {
        // exp(x^2) stays below ~2.3e18 here, well inside double range
        return std::copysign(0.5 / kInvSqrtPi * std::exp(-x * x) * erfi_series(ax), x);
    }
    return std::copysign(dawson_asymptotic(ax), x);
}

double erfi(double x) {
    const double ax = std::abs(x);
    if (ax < 6.5) return std::copysign(erfi_series(ax), x);
    if (ax > 26.5) throw std::overflow_error("erfi: exp(x^2) overflows double range");
    return std::copysign(2.0 * kInvSqrtPi * std::exp(ax * ax) * dawson_asymptotic(ax), x);
}

double black_scholes_price(const BSQuote& q) {
    const double intrinsic_call = std::max(q.forward - q.strike, 0.0);
    const double s = q.vol * std::sqrt(q.maturity);
    double call;
    if (s <= 0.0) {
        call = intrinsic_call;
    } else {
        const double d1 = std::log(q.forward / q.strike) / s + 0.5 * s;
        call = q.forward * norm_cdf(d1) - q.strike * norm_cdf(d1 - s);
        call = std::max(call, intrinsic_call);
    }
    if (q.is_call) return call;
    return call - q.forward + q.strike;  // parity, undiscounted
}

double black_scholes_vega(double forward, double strike, double maturity, double vol) {
    const double rt = std::sqrt(maturity);
    const double s = vol * rt;
    if (s <= 0.0) return 0.0;
    const double d1 = std::log(forward / strike) / s + 0.5 * s;
    return forward * norm_pdf(d1) * rt;
}

double implied_vol(double price, double forward, double strike, double maturity,
                   bool is_call) {
    const double lower = is_call ? std::max(forward - strike, 0.0)
                                 : std::max(strike - forward, 0.0);
    const double upper = is_call ? forward : strike;
    if (!(price > lower))
        throw std::domain_error("implied_vol: price at or below intrinsic lower bound");
    if (!(price < upper))
        throw std::domain_error("implied_vol: price at or above upper bound");

    const double call_price = is_call ? price : price + forward - strike;
    auto f = [&](double v) {
        return black_scholes_price({forward, strike, maturity, v, true}) - call_price;
    };
    double vlo = 1e-8, vhi = 10.0;
    while (f(vhi) < 0.0 && vhi < 1e4) vhi *= 2.0;
    double v = 0.5;
    if (f(v) > 0.0) vhi = v; else vlo = v;
    // safeguarded Newton
    for (int it = 0; it < 100; ++it) {
        const double fv = f(v);
        if (fv > 0.0) vhi = v; else vlo = v;
        const double vega = black_scholes_vega(forward, strike, maturity, v);
        double vn = v - fv / std::max(vega, 1e-300);
        if (!(vn > vlo && vn < vhi)) vn = 0.5 * (vlo + vhi);
        if (std::abs(vn - v) <= 1e-14 * std::max(1.0, v)) return vn;
        v = vn;
    }
    return v;
}

namespace {

// Gauss-Kronrod 15/7 nodes and weights on [-1, 1].
constexpr double kGK15Nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813};
constexpr double kGK15Weights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};
constexpr double kG7Weights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct Interval {
    double lo, hi, value, error;
};

Interval gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(c + h * kGK15Nodes[i]);
        kron += kGK15Weights[i] * fx;
        if (i % 2 == 1) gauss += kG7Weights[i / 2] * fx;
    }
    kron *= h;
    gauss *= h;
    return {lo, hi, kron, std::abs(kron - gauss)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
    if (std::isinf(lo)) lo = -kTruncation;
    if (std::isinf(hi)) hi = kTruncation;
    if (lo >= hi) return 0.0;

    // seed with several equal panels: a single Gauss-Kronrod rule across a
    // long interval can report a deceptively small error when most nodes land
    // where the integrand is negligible, stalling refinement
    std::vector<Interval> heap;
    const int kSeedPanels = 8;
    double value = 0.0;
    double error = 0.0;
    for (int i = 0; i < kSeedPanels; ++i) {
        const double a = lo + (hi - lo) * i / kSeedPanels;
        const double b = lo + (hi - lo) * (i + 1) / kSeedPanels;
        heap.push_back(gk15(f, a, b));
        value += heap.back().value;
        error += heap.back().error;
    }
    const int kMaxIntervals = 2000;
    while (error > tol * std::max(1.0, std::abs(value)) &&
           static_cast<int>(heap.size()) < kMaxIntervals) {
        // split the interval with the largest error estimate
        size_t worst = 0;
        for (size_t i = 1; i < heap.size(); ++i)
            if (heap[i].error > heap[worst].error) worst = i;
        const Interval iv = heap[worst];
        const double mid = 0.5 * (iv.lo + iv.hi);
        Interval left = gk15(f, iv.lo, mid);
        Interval right = gk15(f, mid, iv.hi);
        heap[worst] = left;
        heap.push_back(right);
        value += left.value + right.value - iv.value;
        error += left.error + right.error - iv.error;
    }
    if (error > tol * std::max(1.0, std::abs(value)))
        throw AccuracyError("integrate: refinement budget exhausted", value, error);
    return value;
}

}  // namespace colloc
