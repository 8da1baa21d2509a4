#pragma once

#include <optional>
#include <string>
#include <vector>

namespace colloc {

/// One expiry's quotes: undiscounted forward, maturity in years, strikes with
/// their Black-Scholes implied vols.
struct MarketSlice {
    double forward = 0.0;
    double maturity = 0.0;
    std::vector<double> strikes;  // strictly increasing
    std::vector<double> vols;

    std::size_t size() const { return strikes.size(); }
    void validate() const;  // throws std::invalid_argument
};

struct Dataset {
    std::string name;
    MarketSlice slice;
    std::vector<double> guideline_knots;  // empty when no fixture exists
};

/// Raw (x, y) interpolation fixtures that ship with the library.
struct XYFixture {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Parse a market CSV. Lines starting with '#' are comments; the first
/// payload line must read "forward=<v> maturity=<v>", the second is the
/// column header "strike,vol" or "moneyness,vol" (moneyness is converted via
/// K = m * forward). Throws std::runtime_error with the line number on
/// malformed rows and on duplicate strikes.
MarketSlice load_market_csv(const std::string& path);

/// Single-column CSV of reals (header line "x"), used for knot fixtures.
std::vector<double> load_column_csv(const std::string& path);

/// Two-column CSV (header "x,y").
XYFixture load_xy_csv(const std::string& path);

/// Bundled datasets: jackel_case1, jackel_case2 (guideline knots attached),
/// tsla_18m.
const std::vector<Dataset>& registry();

/// Bundled non-market fixture: the monotone dataset that defeats the original
/// Schumaker derivative estimates.
const XYFixture& schumaker_counterexample();

/// Locate a bundled dataset by name; nullptr when absent.
const Dataset* find_dataset(const std::string& name);

/// Directory the bundled CSV files live in.
std::string data_directory();

}  // namespace colloc
