#pragma once

#include <string>
#include <vector>

#include "colloc/bspline.hpp"
#include "colloc/collocation_model.hpp"
#include "colloc/market_data.hpp"

namespace colloc {

enum class Parameterization { schumaker, bspline };
enum class GuessKind { atm, smile };
enum class Weighting { inverse_vega, unit };

struct CalibrationConfig {
    Parameterization parameterization = Parameterization::bspline;
    GuessKind guess = GuessKind::smile;
    KnotSetKind knot_set = KnotSetKind::smile_implied;  // bspline only
    double epsilon = 1e-4;
    double c_left = 0.0;
    double c_right = 0.0;
    /// Cap on B-spline coefficient increments; <= 0 means the default
    /// 20 * (ln K_N - ln K_0) / M.
    double lambda_max = 0.0;
    int max_iterations = 500;
    double gradient_tol = 1e-10;
    double step_tol = 1e-12;
    double objective_tol = 1e-12;
    Weighting weighting = Weighting::inverse_vega;
    /// Minimum abscissa gap: Schumaker spacing floor and the repair gap for
    /// non-monotone smile-implied knots.
    double min_gap = 1e-4;
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;       // 0.5 * ||r||^2
    double first_ordinate = 0.0;  // a0 after the moment shift
    std::size_t parameter_hash = 0;
};

using IterationTrace = std::vector<IterationRecord>;

struct CalibratedResult {
    CollocationModel model;
    double residual_norm = 0.0;
    double vol_rmse = 0.0;
    IterationTrace trace;
    bool converged = false;
    int iterations = 0;
    bool knots_repaired = false;  // smile-implied abscissae needed the gap repair
};

/// Implied vol at the forward: quadratic fit in ln K through the three quotes
/// nearest ln F, exact when F is itself a quoted strike. With fewer than three
/// quotes falls back to the nearest vol and sets *warned.
double atm_vol(const MarketSlice& market, bool* warned = nullptr);

/// Abscissae x_j = (ln K_j + b_j^2/2 - ln F)/b_j, with b_j either the flat ATM
/// vol (atm guess) or each strike's own vol (smile guess), times sqrt(T).
/// Non-increasing sequences are repaired by pushing each violator to its
/// predecessor plus config.min_gap; *repaired reports whether that happened.
std::vector<double> guess_abscissae(const MarketSlice& market,
                                    const CalibrationConfig& config,
                                    bool* repaired = nullptr);

/// Schumaker-Lam model through (x_j, ln K_j) with natural wing slopes,
/// moment-enforced. The atm guess preserves the first moment up to roundoff.
CollocationModel initial_guess(const MarketSlice& market,
                               const CalibrationConfig& config);

/// Eq-7-style penalty on the knot slopes of the piecewise quadratic:
/// epsilon^2 sum_j (1/b_{j+1} - 1/b_j)^2, slopes floored at 1e-12.
double penalty_bspline(const PiecewiseQuadratic& pq, double epsilon);

/// Same penalty evaluated at the market strikes through g_inverse.
double penalty_schumaker(const CollocationModel& model, const MarketSlice& market,
                         double epsilon);

/// Weighted price residuals only (no penalty rows). inverse_vega weights are
/// 1/max(vega_i, 1e-6 F sqrt(T)).
std::vector<double> residuals(const CollocationModel& model,
                              const MarketSlice& market, Weighting weighting);

/// Root-mean-square error of model implied vols against the market quotes.
double implied_vol_rmse(const CollocationModel& model, const MarketSlice& market);

/// Damped least squares on weighted price residuals plus penalty rows, with a
/// forward-difference Jacobian. Deterministic; records a0 per iteration.
CalibratedResult calibrate(const MarketSlice& market,
                           const CalibrationConfig& config);

/// Same, but with the knot abscissae (B-spline breakpoints or Schumaker
/// initial sites) supplied explicitly, e.g. a guideline fixture.
CalibratedResult calibrate_with_knots(const MarketSlice& market,
                                      const CalibrationConfig& config,
                                      const std::vector<double>& knots);

namespace detail {

/// Parameter transforms shared by encode/decode and the tests: gaps are
/// min_gap + softplus(u), increments are lambda_max * sigmoid(v). Inverses
/// are exact on the open feasible region.
double softplus(double u);
double softplus_inverse(double g);
double sigmoid(double v);
double sigmoid_inverse(double s);

}  // namespace detail

}  // namespace colloc
