#include "colloc/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "colloc/special_functions.hpp"

namespace colloc {

namespace detail {

double softplus(double u) {
    // log(1 + e^u), stable on both tails
    if (u > 40.0) return u;
    if (u < -40.0) return std::exp(u);
    return std::log1p(std::exp(u));
}

double softplus_inverse(double g) {
    if (!(g > 0.0)) throw std::domain_error("softplus_inverse: argument must be positive");
    if (g > 40.0) return g;
    return std::log(std::expm1(g));
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double sigmoid_inverse(double s) {
    if (!(s > 0.0 && s < 1.0))
        throw std::domain_error("sigmoid_inverse: argument must lie in (0,1)");
    return std::log(s / (1.0 - s));
}

}  // namespace detail

double atm_vol(const MarketSlice& market, bool* warned) {
    market.validate();
    if (warned) *warned = false;
    const double lnF = std::log(market.forward);
    const std::size_t n = market.size();
    for (std::size_t i = 0; i < n; ++i)
        if (market.strikes[i] == market.forward) return market.vols[i];
    if (n < 3) {
        if (warned) *warned = true;
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(std::log(market.strikes[i]) - lnF) <
                std::abs(std::log(market.strikes[best]) - lnF))
                best = i;
        return market.vols[best];
    }
    // three quotes nearest in |ln K - ln F|
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + 3, idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          return std::abs(std::log(market.strikes[a]) - lnF) <
                                 std::abs(std::log(market.strikes[b]) - lnF);
                      });
    double x[3], y[3];
    for (int i = 0; i < 3; ++i) {
        x[i] = std::log(market.strikes[idx[i]]);
        y[i] = market.vols[idx[i]];
    }
    // Lagrange quadratic at lnF
    double v = 0.0;
    for (int i = 0; i < 3; ++i) {
        double li = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) li *= (lnF - x[j]) / (x[i] - x[j]);
        v += y[i] * li;
    }
    return v;
}

std::vector<double> guess_abscissae(const MarketSlice& market,
                                    const CalibrationConfig& config,
                                    bool* repaired) {
    market.validate();
    if (repaired) *repaired = false;
    const double lnF = std::log(market.forward);
    const double rt = std::sqrt(market.maturity);
    const double vatm = config.guess == GuessKind::atm ? atm_vol(market) : 0.0;
    std::vector<double> x(market.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double b =
            (config.guess == GuessKind::atm ? vatm : market.vols[i]) * rt;
        x[i] = (std::log(market.strikes[i]) + 0.5 * b * b - lnF) / b;
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] <= x[i - 1] + config.min_gap) {
            x[i] = x[i - 1] + config.min_gap;
            if (repaired) *repaired = true;
        }
    }
    return x;
}

namespace {

CollocationModel schumaker_model(const std::vector<double>& abscissae,
                                 const std::vector<double>& ordinates,
                                 const CalibrationConfig& config, double forward,
                                 double maturity) {
    InterpolationData data{abscissae, ordinates};
    const std::vector<double> d = lam_harmonic_derivatives(data);
    PiecewiseQuadratic pq = schumaker_build(data, d);
    return CollocationModel::with_natural_wings(std::move(pq), config.c_left,
                                                config.c_right, forward, maturity)
        .enforce_first_moment();
}

}  // namespace

CollocationModel initial_guess(const MarketSlice& market,
                               const CalibrationConfig& config) {
    const std::vector<double> x = guess_abscissae(market, config);
    std::vector<double> lnK(market.size());
    for (std::size_t i = 0; i < lnK.size(); ++i) lnK[i] = std::log(market.strikes[i]);
    return schumaker_model(x, lnK, config, market.forward, market.maturity);
}

namespace {

// slopes g'(x_j) at the knots of a piecewise quadratic (right-sided except at
// the last knot)
std::vector<double> knot_slopes(const PiecewiseQuadratic& pq) {
    std::vector<double> b(pq.knots.size());
    for (std::size_t j = 0; j < pq.segment_count(); ++j) b[j] = pq.segments[j].b;
    b.back() = pq.slope_end();
    return b;
}

double inverse_slope_penalty(const std::vector<double>& slopes, double epsilon) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < slopes.size(); ++j) {
        const double b0 = std::max(slopes[j], 1e-12);
        const double b1 = std::max(slopes[j + 1], 1e-12);
        const double d = 1.0 / b1 - 1.0 / b0;
        acc += d * d;
    }
    return epsilon * epsilon * acc;
}

}  // namespace

double penalty_bspline(const PiecewiseQuadratic& pq, double epsilon) {
    return inverse_slope_penalty(knot_slopes(pq), epsilon);
}

double penalty_schumaker(const CollocationModel& model, const MarketSlice& market,
                         double epsilon) {
    std::vector<double> slopes(market.size());
    for (std::size_t i = 0; i < market.size(); ++i) {
        const double xt = model.g_inverse(std::log(market.strikes[i]));
        slopes[i] = std::isinf(xt) ? 0.0 : model.g_derivative(xt);
    }
    return inverse_slope_penalty(slopes, epsilon);
}

std::vector<double> residuals(const CollocationModel& model,
                              const MarketSlice& market, Weighting weighting) {
    if (!model.moment_enforced())
        throw std::logic_error("residuals: model is not moment-enforced");
    const double F = model.forward(), T = model.maturity();
    const double vega_floor = 1e-6 * F * std::sqrt(T);
    std::vector<double> r(market.size());
    for (std::size_t i = 0; i < market.size(); ++i) {
        const double K = market.strikes[i];
        const double target =
            black_scholes_price({F, K, T, market.vols[i], true});
        double w = 1.0;
        if (weighting == Weighting::inverse_vega)
            w = 1.0 / std::max(black_scholes_vega(F, K, T, market.vols[i]),
                               vega_floor);
        r[i] = w * (model.price_call(K) - target);
    }
    return r;
}

double implied_vol_rmse(const CollocationModel& model, const MarketSlice& market) {
    double acc = 0.0;
    for (std::size_t i = 0; i < market.size(); ++i) {
        const double p = model.price_call(market.strikes[i]);
        const double v = implied_vol(p, model.forward(), market.strikes[i],
                                     model.maturity(), true);
        const double d = v - market.vols[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(market.size()));
}

namespace {

std::size_t hash_parameters(const Eigen::VectorXd& p) {
    std::size_t h = 0;
    std::hash<double> hd;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        h = h * 1000003 + hd(p[i]);
    return h;
}

struct Problem {
    // decode parameters into a moment-enforced model; throws on infeasible
    std::function<CollocationModel(const Eigen::VectorXd&)> decode;
    // extra penalty residual rows for a decoded model
    std::function<std::vector<double>(const CollocationModel&)> penalties;
    Eigen::VectorXd p0;
};

Problem make_bspline_problem(const MarketSlice& market,
                             const CalibrationConfig& config,
                             const std::vector<double>& breakpoints) {
    if (breakpoints.size() < 2)
        throw std::invalid_argument("calibrate: need at least two knots");
    const std::size_t m = breakpoints.size() - 1;
    const double lnK0 = std::log(market.strikes.front());
    const double lnKN = std::log(market.strikes.back());
    double lam_max = config.lambda_max;
    if (!(lam_max > 0.0)) lam_max = 20.0 * (lnKN - lnK0) / static_cast<double>(m);

    // initial coefficients: sample the piecewise-linear smile map at the
    // Greville abscissae (linear extrapolation beyond the data)
    CalibrationConfig gc = config;
    const std::vector<double> xs = guess_abscissae(market, gc);
    std::vector<double> lnK(market.size());
    for (std::size_t i = 0; i < lnK.size(); ++i) lnK[i] = std::log(market.strikes[i]);
    QuadraticBSpline proto;
    proto.breakpoints = breakpoints;
    proto.coefficients.assign(m + 2, 0.0);
    const std::vector<double> grev = proto.greville_abscissae();
    auto interp = [&](double t) {
        if (t <= xs.front())
            return lnK[0] + (t - xs[0]) * (lnK[1] - lnK[0]) / (xs[1] - xs[0]);
        const std::size_t n = xs.size();
        if (t >= xs.back())
            return lnK[n - 1] + (t - xs[n - 1]) * (lnK[n - 1] - lnK[n - 2]) /
                                    (xs[n - 1] - xs[n - 2]);
        const auto it = std::upper_bound(xs.begin(), xs.end(), t);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double f = (t - xs[j]) / (xs[j + 1] - xs[j]);
        return lnK[j] + f * (lnK[j + 1] - lnK[j]);
    };
    std::vector<double> g0(grev.size());
    for (std::size_t i = 0; i < grev.size(); ++i) g0[i] = interp(grev[i]);

    // The base coefficient is not optimized: first-moment enforcement shifts
    // all ordinates by lnF - lnM1, which exactly undoes any constant added to
    // the spline, so the level is a gauge direction with zero true gradient.
    // Leaving it in the parameter vector feeds the solver a pure-noise
    // Jacobian column along which it drifts without progress.
    const double alpha0 = g0[0];
    Eigen::VectorXd p0(static_cast<Eigen::Index>(m + 1));
    for (std::size_t j = 0; j + 1 < g0.size(); ++j) {
        double inc = std::clamp(g0[j + 1] - g0[j], 1e-8, lam_max * (1.0 - 1e-9));
        p0[static_cast<Eigen::Index>(j)] = detail::sigmoid_inverse(inc / lam_max);
    }

    Problem prob;
    prob.p0 = std::move(p0);
    prob.decode = [breakpoints, config, lam_max, alpha0,
                   market](const Eigen::VectorXd& p) {
        std::vector<double> inc(static_cast<std::size_t>(p.size()));
        for (std::size_t j = 0; j < inc.size(); ++j)
            inc[j] = lam_max * detail::sigmoid(p[static_cast<Eigen::Index>(j)]);
        QuadraticBSpline bs = from_increments(breakpoints, alpha0, inc, lam_max);
        PiecewiseQuadratic pq = to_piecewise_quadratic(bs);
        return CollocationModel::with_natural_wings(std::move(pq), config.c_left,
                                                    config.c_right, market.forward,
                                                    market.maturity)
            .enforce_first_moment();
    };
    prob.penalties = [eps = config.epsilon](const CollocationModel& mdl) {
        const std::vector<double> b = knot_slopes(mdl.spline());
        std::vector<double> rows(b.size() - 1);
        for (std::size_t j = 0; j + 1 < b.size(); ++j)
            rows[j] = eps * (1.0 / std::max(b[j + 1], 1e-12) -
                             1.0 / std::max(b[j], 1e-12));
        return rows;
    };
    return prob;
}

Problem make_schumaker_problem(const MarketSlice& market,
                               const CalibrationConfig& config,
                               const std::vector<double>& abscissae) {
    if (abscissae.size() != market.size())
        throw std::invalid_argument(
            "calibrate: schumaker mode needs one abscissa per strike");
    std::vector<double> lnK(market.size());
    for (std::size_t i = 0; i < lnK.size(); ++i) lnK[i] = std::log(market.strikes[i]);

    const std::size_t n = abscissae.size();
    Eigen::VectorXd p0(static_cast<Eigen::Index>(n));
    p0[0] = abscissae[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double gap = abscissae[i] - abscissae[i - 1];
        const double excess = std::max(gap - config.min_gap, 1e-10);
        p0[static_cast<Eigen::Index>(i)] = detail::softplus_inverse(excess);
    }

    Problem prob;
    prob.p0 = std::move(p0);
    prob.decode = [lnK, config, market](const Eigen::VectorXd& p) {
        std::vector<double> x(static_cast<std::size_t>(p.size()));
        x[0] = p[0];
        for (std::size_t i = 1; i < x.size(); ++i)
            x[i] = x[i - 1] + config.min_gap +
                   detail::softplus(p[static_cast<Eigen::Index>(i)]);
        return schumaker_model(x, lnK, config, market.forward, market.maturity);
    };
    prob.penalties = [eps = config.epsilon, market](const CollocationModel& mdl) {
        std::vector<double> slopes(market.size());
        for (std::size_t i = 0; i < market.size(); ++i) {
            const double xt = mdl.g_inverse(std::log(market.strikes[i]));
            slopes[i] = std::isinf(xt) ? 1e-12 : mdl.g_derivative(xt);
        }
        std::vector<double> rows(slopes.size() - 1);
        for (std::size_t i = 0; i + 1 < slopes.size(); ++i)
            rows[i] = eps * (1.0 / std::max(slopes[i + 1], 1e-12) -
                             1.0 / std::max(slopes[i], 1e-12));
        return rows;
    };
    return prob;
}

}  // namespace

CalibratedResult calibrate_with_knots(const MarketSlice& market,
                                      const CalibrationConfig& config,
                                      const std::vector<double>& knots) {
    market.validate();
    Problem prob = config.parameterization == Parameterization::bspline
                       ? make_bspline_problem(market, config, knots)
                       : make_schumaker_problem(market, config, knots);

    auto eval_residuals = [&](const Eigen::VectorXd& p,
                              CollocationModel* out_model) -> Eigen::VectorXd {
        CollocationModel mdl = prob.decode(p);
        std::vector<double> r = residuals(mdl, market, config.weighting);
        const std::vector<double> pen = prob.penalties(mdl);
        r.insert(r.end(), pen.begin(), pen.end());
        Eigen::VectorXd v(static_cast<Eigen::Index>(r.size()));
        for (std::size_t i = 0; i < r.size(); ++i)
            v[static_cast<Eigen::Index>(i)] = r[i];
        if (out_model) *out_model = std::move(mdl);
        return v;
    };

    Eigen::VectorXd p = prob.p0;
    CollocationModel model = prob.decode(p);
    Eigen::VectorXd r = eval_residuals(p, &model);
    if (!r.allFinite())
        throw std::runtime_error("calibrate: non-finite objective at the initial guess");
    double obj = 0.5 * r.squaredNorm();

    const Eigen::Index np = p.size();
    const Eigen::Index nr = r.size();
    bool converged = false;
    int iter = 0;

    CalibratedResult result{model, 0.0, 0.0, {}, false, 0, false};
    result.trace.push_back(
        {0, obj, model.spline().value_begin(), hash_parameters(p)});

    // Trust-region damped least squares in the classic MINPACK style: the
    // damping `par` is chosen so the scaled step lands on the trust radius,
    // the radius adapts with the gain ratio, and small-but-positive gains are
    // accepted. Scaling D is the running maximum of the Jacobian column norms.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(np);
    double delta = 0.0;
    double par = 0.0;

    // solve min ||J step + r||^2 + par ||D step||^2
    auto damped_step = [&](const Eigen::MatrixXd& J, double lam) {
        Eigen::MatrixXd A(nr + np, np);
        A.topRows(nr) = J;
        A.bottomRows(np) = (std::sqrt(lam) * diag).asDiagonal().toDenseMatrix();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nr + np);
        rhs.head(nr) = -r;
        return Eigen::VectorXd(A.colPivHouseholderQr().solve(rhs));
    };

    for (; iter < config.max_iterations; ++iter) {
        // forward-difference Jacobian
        Eigen::MatrixXd J(nr, np);
        bool jac_ok = true;
        for (Eigen::Index j = 0; j < np && jac_ok; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(p[j]));
            Eigen::VectorXd pj = p;
            pj[j] += h;
            try {
                J.col(j) = (eval_residuals(pj, nullptr) - r) / h;
            } catch (const std::exception&) {
                jac_ok = false;
            }
        }
        if (!jac_ok) break;

        const Eigen::VectorXd gradient = J.transpose() * r;
        if (gradient.lpNorm<Eigen::Infinity>() < config.gradient_tol) {
            converged = true;
            break;
        }
        diag = diag.cwiseMax(J.colwise().norm().transpose()).cwiseMax(1e-8);
        if (delta == 0.0)
            delta = std::max(100.0 * diag.cwiseProduct(p).norm(), 100.0);

        const double fnorm = std::sqrt(2.0 * obj);
        bool accepted = false;
        for (int tries = 0; tries < 60 && !accepted; ++tries) {
            // choose par so that ||D step|| lies within ~10% of delta, or
            // par = 0 when the Gauss-Newton step already fits
            Eigen::VectorXd step = damped_step(J, 0.0);
            double pnorm = diag.cwiseProduct(step).norm();
            if (!step.allFinite() || pnorm > 1.1 * delta) {
                double lo = 0.0, hi = std::max(par, 1e-10);
                while (true) {
                    step = damped_step(J, hi);
                    pnorm = diag.cwiseProduct(step).norm();
                    if (step.allFinite() && pnorm <= 1.1 * delta) break;
                    lo = hi;
                    hi *= 8.0;
                    if (hi > 1e18) break;
                }
                par = hi;
                if (lo > 0.0) {
                    for (int b = 0;
                         b < 40 && (pnorm < 0.9 * delta || pnorm > 1.1 * delta);
                         ++b) {
                        const double mid = std::sqrt(lo * hi);
                        const Eigen::VectorXd s2 = damped_step(J, mid);
                        const double n2 = diag.cwiseProduct(s2).norm();
                        if (!s2.allFinite() || n2 > 1.1 * delta) {
                            lo = mid;
                        } else {
                            hi = mid;
                            step = s2;
                            pnorm = n2;
                            par = mid;
                        }
                    }
                }
            } else {
                par = 0.0;
            }
            if (!step.allFinite()) break;

            const Eigen::VectorXd pc = p + step;
            double obj_c = std::numeric_limits<double>::infinity();
            Eigen::VectorXd rc;
            CollocationModel cand = model;
            try {
                rc = eval_residuals(pc, &cand);
                if (rc.allFinite()) obj_c = 0.5 * rc.squaredNorm();
            } catch (const std::exception&) {
            }
            const double fnorm1 = std::isfinite(obj_c)
                                      ? std::sqrt(2.0 * obj_c)
                                      : 10.0 * fnorm;

            // MINPACK reductions, all relative to fnorm^2
            const double actred =
                0.1 * fnorm1 < fnorm ? 1.0 - (fnorm1 / fnorm) * (fnorm1 / fnorm)
                                     : -1.0;
            const double t1 = (J * step).norm() / fnorm;
            const double t2 = std::sqrt(par) * pnorm / fnorm;
            const double prered = t1 * t1 + 2.0 * t2 * t2;
            const double dirder = -(t1 * t1 + t2 * t2);
            const double ratio = prered > 0.0 ? actred / prered : 0.0;

            if (ratio <= 0.25) {
                double temp = actred >= 0.0
                                  ? 0.5
                                  : 0.5 * dirder / (dirder + 0.5 * actred);
                if (0.1 * fnorm1 >= fnorm || temp < 0.1) temp = 0.1;
                delta = temp * std::min(delta, 10.0 * pnorm);
                par /= temp;
            } else if (par == 0.0 || ratio >= 0.75) {
                delta = 2.0 * pnorm;
                par *= 0.5;
            }

            if (ratio >= 1e-4 && obj_c < obj) {
                const double drop = obj - obj_c;
                p = pc;
                r = std::move(rc);
                model = std::move(cand);
                obj = obj_c;
                accepted = true;
                result.trace.push_back({iter + 1, obj, model.spline().value_begin(),
                                        hash_parameters(p)});
                if (delta < config.step_tol * diag.cwiseProduct(p).norm() ||
                    (std::abs(actred) <= config.objective_tol &&
                     prered <= config.objective_tol && ratio <= 2.0) ||
                    drop < config.objective_tol * std::max(obj, 1.0))
                    converged = true;
            } else if (delta < 1e-13 * std::max(diag.cwiseProduct(p).norm(), 1.0)) {
                break;  // radius collapsed without progress
            }
        }
        if (!accepted) break;  // stagnation: converged stays false
        if (converged) break;
    }

    result.model = std::move(model);
    result.residual_norm = std::sqrt(2.0 * obj);
    result.vol_rmse = implied_vol_rmse(result.model, market);
    result.converged = converged;
    result.iterations = iter;
    return result;
}

CalibratedResult calibrate(const MarketSlice& market,
                           const CalibrationConfig& config) {
    bool repaired = false;
    std::vector<double> knots;
    if (config.parameterization == Parameterization::bspline) {
        if (config.knot_set == KnotSetKind::guideline_fixture)
            throw std::invalid_argument(
                "calibrate: guideline knots must be passed via calibrate_with_knots");
        CalibrationConfig gc = config;
        gc.guess = config.knot_set == KnotSetKind::atm_implied ? GuessKind::atm
                                                               : GuessKind::smile;
        knots = guess_abscissae(market, gc, &repaired);
    } else {
        knots = guess_abscissae(market, config, &repaired);
    }
    CalibratedResult res = calibrate_with_knots(market, config, knots);
    res.knots_repaired = repaired;
    return res;
}

}  // namespace colloc
