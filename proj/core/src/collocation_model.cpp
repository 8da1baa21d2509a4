#include "colloc/collocation_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "colloc/special_functions.hpp"

namespace colloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrtPi = 1.7724538509055159;

struct Exponent {
    double A, B, C;  // integrand exponent A + B x + C x^2 (phi merged later)
};

Exponent absolute_form(double a, double b, double c, double xref) {
    return {a - b * xref + c * xref * xref, b - 2.0 * c * xref, c};
}

// log of the integral for the Gaussian branch q = 1 - 2c > 0
double gaussian_branch_log(const Exponent& e, double q, double lo, double hi) {
    const double sq = std::sqrt(q);
    const double m = e.B / sq;
    const double lo_t = std::isinf(lo) ? -kInf : lo * sq - m;
    const double hi_t = std::isinf(hi) ? kInf : hi * sq - m;
    if (!(hi_t > lo_t)) return -kInf;

    // When both transformed endpoints sit in the same far tail the direct
    // form A + m^2/2 + log(Phi(hi_t) - Phi(lo_t)) cancels catastrophically:
    // for small q, m^2/2 ~ B^2/(2q) can reach 1e12 while the result is O(1),
    // so the last ~B^2/q * 1e-16 digits are noise. Factor each endpoint as
    //   exp(A + m^2/2) * Phi(u) = exp(L(x)) * R(|u|) / sqrt(2 pi),
    // with L(x) = A + B x - q x^2 / 2 the (well-conditioned) integrand log
    // at the endpoint and R the Mills ratio; the huge exponent cancels
    // analytically. The 8.0 cut matches log_norm_cdf's asymptotic switch;
    // in the remaining cases |m| is bounded and the direct form is fine.
    constexpr double kTail = 8.0;
    constexpr double kLogSqrt2Pi = 0.9189385332046727;
    if (hi_t <= -kTail || lo_t >= kTail) {
        auto L = [&](double x) {
            return std::isinf(x) ? -kInf : e.A + x * (e.B - 0.5 * q * x);
        };
        double first_L, first_R, second_L, second_R;
        if (hi_t <= -kTail) {  // left tail: Phi(t) = phi(t) R(-t)
            first_L = L(hi);
            first_R = norm_mills_ratio(-hi_t);
            second_L = L(lo);
            second_R = norm_mills_ratio(-lo_t);
        } else {  // right tail: Phi(hi_t) - Phi(lo_t) = Phi(-lo_t) - Phi(-hi_t)
            first_L = L(lo);
            first_R = norm_mills_ratio(lo_t);
            second_L = L(hi);
            second_R = norm_mills_ratio(hi_t);
        }
        const double Lm = std::max(first_L, second_L);
        if (std::isinf(Lm)) return -kInf;
        const double diff = std::exp(first_L - Lm) * first_R -
                            std::exp(second_L - Lm) * second_R;
        if (!(diff > 0.0)) return -kInf;
        return Lm + std::log(diff) - kLogSqrt2Pi - std::log(sq);
    }

    const double logd = log_norm_cdf_diff(lo_t, hi_t);
    if (std::isinf(logd)) return -kInf;
    return e.A + 0.5 * m * m + logd - std::log(sq);
}

// erfi branch, q < 0, finite interval. Each endpoint term is
// exp(L(x)) * (2/sqrt(pi)) D(u/sqrt(2)) with L the integrand exponent at x,
// so intermediates stay on the scale of the integrand itself.
double erfi_branch(const Exponent& e, double p, double lo, double hi,
                   double* log_scale) {
    auto piece = [&](double x, double& L, double& E) {
        L = e.A + e.B * x + 0.5 * p * x * x;
        const double u = std::sqrt(p) * (x + e.B / p);
        E = (2.0 / kSqrtPi) * dawson(u / std::sqrt(2.0));
    };
    double Lh, Eh, Ll, El;
    piece(hi, Lh, Eh);
    piece(lo, Ll, El);
    const double Lm = std::max(Lh, Ll);
    const double diff =
        (std::exp(Lh - Lm) * Eh - std::exp(Ll - Lm) * El) / (2.0 * std::sqrt(p));
    if (log_scale) *log_scale = Lm;
    return diff;  // value = exp(Lm) * diff
}

}  // namespace

double segment_integral(double a, double b, double c, double xref, double lo,
                        double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("segment_integral: lo > hi");
    if (lo == hi) return 0.0;
    const double q = 1.0 - 2.0 * c;
    const Exponent e = absolute_form(a, b, c, xref);
    if (std::abs(q) <= 1e-12) {
        if (std::isinf(lo) || std::isinf(hi))
            throw std::domain_error("segment_integral: divergent (c = 1/2 with infinite endpoint)");
        // phi cancels the quadratic term; plain exponential integrand
        const double kSqrt2Pi = 2.5066282746310002;
        if (e.B == 0.0) return std::exp(e.A) * (hi - lo) / kSqrt2Pi;
        const double Lm = e.A + e.B * (e.B > 0 ? hi : lo);  // larger endpoint
        const double span = -std::abs(e.B) * (hi - lo);
        return std::exp(Lm) * -std::expm1(span) / (std::abs(e.B) * kSqrt2Pi);
    }
    if (q < 0.0) {
        if (std::isinf(lo) || std::isinf(hi))
            throw std::domain_error("segment_integral: divergent (1-2c < 0 with infinite endpoint)");
        double log_scale = 0.0;
        const double diff = erfi_branch(e, -q, lo, hi, &log_scale);
        return std::exp(log_scale) * diff;
    }
    const double lv = gaussian_branch_log(e, q, lo, hi);
    return std::isinf(lv) ? 0.0 : std::exp(lv);
}

double segment_integral_log(double a, double b, double c, double xref, double lo,
                            double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("segment_integral: lo > hi");
    if (lo == hi) return -kInf;
    const double q = 1.0 - 2.0 * c;
    const Exponent e = absolute_form(a, b, c, xref);
    if (std::abs(q) <= 1e-12 || q < 0.0) {
        if (std::isinf(lo) || std::isinf(hi))
            throw std::domain_error("segment_integral: divergent configuration");
        if (q < -1e-12) {
            double log_scale = 0.0;
            const double diff = erfi_branch(e, -q, lo, hi, &log_scale);
            return diff > 0.0 ? log_scale + std::log(diff) : -kInf;
        }
        const double v = segment_integral(a, b, c, xref, lo, hi);
        return v > 0.0 ? std::log(v) : -kInf;
    }
    return gaussian_branch_log(e, q, lo, hi);
}

double extrapolation_integral(double s, double x, double y, double lo,
                              double hi) {
    return segment_integral(y, s, 0.0, x, lo, hi);
}

CollocationModel::CollocationModel(PiecewiseQuadratic spline, WingSpec wings,
                                   double forward, double maturity)
    : spline_(std::move(spline)), wings_(wings), forward_(forward),
      maturity_(maturity) {
    if (!(forward_ > 0.0)) throw std::invalid_argument("model: forward must be positive");
    if (!(maturity_ > 0.0)) throw std::invalid_argument("model: maturity must be positive");
    if (wings_.c_left > 0.0)
        throw std::invalid_argument("model: c_left must be nonpositive");
    if (!(wings_.c_right >= 0.0 && wings_.c_right < 0.5))
        throw std::invalid_argument("model: c_right must lie in [0, 1/2)");
    const MonotonicityReport rep = audit_monotonicity(spline_);
    if (!rep.monotone)
        throw std::invalid_argument("model: spline is not monotone nondecreasing");
    if (wings_.s_left < 0.0 || wings_.s_right < 0.0)
        throw std::invalid_argument("model: wing slopes must be nonnegative");
}

CollocationModel CollocationModel::with_natural_wings(PiecewiseQuadratic spline,
                                                      double c_left, double c_right,
                                                      double forward, double maturity) {
    WingSpec w;
    w.s_left = spline.slope_begin();
    w.s_right = spline.slope_end();
    w.c_left = c_left;
    w.c_right = c_right;
    return CollocationModel(std::move(spline), w, forward, maturity);
}

CollocationModel CollocationModel::restore(PiecewiseQuadratic spline, WingSpec wings,
                                           double forward, double maturity,
                                           bool moment_enforced, double moment_shift) {
    CollocationModel out(std::move(spline), wings, forward, maturity);
    out.moment_enforced_ = moment_enforced;
    out.moment_shift_ = moment_shift;
    return out;
}

double CollocationModel::g(double x) const {
    if (x < spline_.x_min()) {
        const double u = x - spline_.x_min();
        return spline_.value_begin() + u * (wings_.s_left + u * wings_.c_left);
    }
    if (x > spline_.x_max()) {
        const double u = x - spline_.x_max();
        return spline_.value_end + u * (wings_.s_right + u * wings_.c_right);
    }
    return eval(spline_, x);
}

double CollocationModel::g_derivative(double x) const {
    if (x < spline_.x_min())
        return wings_.s_left + 2.0 * wings_.c_left * (x - spline_.x_min());
    if (x > spline_.x_max())
        return wings_.s_right + 2.0 * wings_.c_right * (x - spline_.x_max());
    return eval_derivative(spline_, x);
}

double CollocationModel::g_inverse(double log_strike) const {
    const double a0 = spline_.value_begin();
    const double aM = spline_.value_end;
    if (log_strike < a0) {
        // left wing: c u^2 + s u + a0 = y with u <= 0
        const double cw = wings_.c_left, sw = wings_.s_left;
        if (cw == 0.0) {
            if (sw <= 0.0) return -kInf;  // flat wing never reaches below a0
            return spline_.x_min() + (log_strike - a0) / sw;
        }
        const double disc = sw * sw - 4.0 * cw * (a0 - log_strike);
        if (disc < 0.0) return -kInf;  // below the wing infimum
        const double u = (-sw + std::sqrt(disc)) / (2.0 * cw);
        return spline_.x_min() + u;
    }
    if (log_strike > aM) {
        const double cw = wings_.c_right, sw = wings_.s_right;
        if (cw == 0.0) {
            if (sw <= 0.0)
                throw std::out_of_range("g_inverse: strike above flat right wing");
            return spline_.x_max() + (log_strike - aM) / sw;
        }
        const double disc = sw * sw - 4.0 * cw * (aM - log_strike);
        const double u = (-sw + std::sqrt(disc)) / (2.0 * cw);
        return spline_.x_max() + u;
    }
    return inverse(spline_, log_strike);
}

double CollocationModel::log_first_moment() const {
    std::vector<double> logs;
    logs.reserve(spline_.segment_count() + 2);
    auto push = [&](double lv) {
        if (!std::isinf(lv)) logs.push_back(lv);
    };
    push(segment_integral_log(spline_.value_begin(), wings_.s_left, wings_.c_left,
                              spline_.x_min(), -kInf, spline_.x_min()));
    for (std::size_t j = 0; j < spline_.segment_count(); ++j) {
        const auto& s = spline_.segments[j];
        push(segment_integral_log(s.a, s.b, s.c, spline_.knots[j], spline_.knots[j],
                                  spline_.knots[j + 1]));
    }
    push(segment_integral_log(spline_.value_end, wings_.s_right, wings_.c_right,
                              spline_.x_max(), spline_.x_max(), kInf));
    if (logs.empty()) return -kInf;
    const double m = *std::max_element(logs.begin(), logs.end());
    double acc = 0.0;
    for (double lv : logs) acc += std::exp(lv - m);
    return m + std::log(acc);
}

double CollocationModel::first_moment() const { return std::exp(log_first_moment()); }

CollocationModel CollocationModel::enforce_first_moment() const {
    const double delta = std::log(forward_) - log_first_moment();
    PiecewiseQuadratic shifted = spline_;
    for (auto& s : shifted.segments) s.a += delta;
    shifted.value_end += delta;
    CollocationModel out(std::move(shifted), wings_, forward_, maturity_);
    out.moment_enforced_ = true;
    out.moment_shift_ = moment_shift_ + delta;
    return out;
}

double CollocationModel::price_call(double strike) const {
    if (!(strike > 0.0)) throw std::invalid_argument("price_call: strike must be positive");
    if (!moment_enforced_)
        throw std::logic_error("price_call: model is not moment-enforced");
    const double y = std::log(strike);
    double xt;
    try {
        xt = g_inverse(y);
    } catch (const std::out_of_range&) {
        return 0.0;  // strike above the attainable range (flat right wing)
    }

    double total = 0.0;
    const double x0 = spline_.x_min(), xM = spline_.x_max();
    if (xt < x0)
        total += segment_integral(spline_.value_begin(), wings_.s_left, wings_.c_left,
                                  x0, xt, x0);
    for (std::size_t j = 0; j < spline_.segment_count(); ++j) {
        const double lo = std::max(xt, spline_.knots[j]);
        const double hi = spline_.knots[j + 1];
        if (lo < hi) {
            const auto& s = spline_.segments[j];
            total += segment_integral(s.a, s.b, s.c, spline_.knots[j], lo, hi);
        }
    }
    total += segment_integral(spline_.value_end, wings_.s_right, wings_.c_right, xM,
                              std::max(xt, xM), kInf);
    if (!std::isinf(xt)) total -= strike * norm_cdf(-xt);
    else total -= strike;  // always-exercised side: subtract K * 1
    return std::max(total, 0.0);
}

DensityPoint CollocationModel::density(double strike) const {
    if (!(strike > 0.0)) throw std::invalid_argument("density: strike must be positive");
    double xt;
    try {
        xt = g_inverse(std::log(strike));
    } catch (const std::out_of_range&) {
        return {strike, 0.0};  // no mass above a flat right wing
    }
    if (std::isinf(xt)) return {strike, 0.0};
    const double slope = g_derivative(xt);
    if (!(slope > 0.0))
        throw std::domain_error("density: g is flat at this strike, density is singular");
    return {strike, norm_pdf(xt) / (strike * slope)};
}

}  // namespace colloc
