#pragma once

#include <vector>

#include "colloc/monotone_spline.hpp"

namespace colloc {

struct MarketSlice;  // market_data.hpp

/// Quadratic (order 3) B-spline with clamped (triple) end knots over the
/// given breakpoints. With m+1 breakpoints there are m+2 coefficients;
/// nondecreasing coefficients give a monotone nondecreasing spline.
struct QuadraticBSpline {
    std::vector<double> breakpoints;   // strictly increasing
    std::vector<double> coefficients;  // breakpoints.size() + 1

    /// Full clamped knot vector (first/last value with multiplicity 3).
    std::vector<double> knot_vector() const;
    /// Greville abscissae, one per coefficient.
    std::vector<double> greville_abscissae() const;
    std::vector<double> increments() const;
};

enum class KnotSetKind {
    guideline_fixture,  // shipped per-dataset fixture
    smile_implied,      // x_j from the full smile: b_j = vol(K_j) * sqrt(T)
    atm_implied,        // x_j from the ATM vol:    b_j = vol_atm * sqrt(T)
};

/// Collocation abscissae x_j = (ln K_j + b_j^2/2 - ln F) / b_j for the market
/// strikes, or the verbatim guideline fixture when kind is guideline_fixture
/// (throws std::invalid_argument when no fixture is supplied). For noisy
/// smiles the smile-implied sequence can fail to increase; repair_gap > 0
/// pushes each violating abscissa to predecessor + repair_gap, repair_gap == 0
/// throws instead.
std::vector<double> build_knots(KnotSetKind kind, const MarketSlice& market,
                                const std::vector<double>& guideline_knots = {},
                                double repair_gap = 0.0);

/// Spline from a base coefficient and nonnegative coefficient increments,
/// each capped by lambda_max. Monotone by construction.
QuadraticBSpline from_increments(const std::vector<double>& breakpoints,
                                 double alpha0,
                                 const std::vector<double>& increments,
                                 double lambda_max);

/// Exact segment-by-segment polynomial conversion.
PiecewiseQuadratic to_piecewise_quadratic(const QuadraticBSpline& bs);

}  // namespace colloc
