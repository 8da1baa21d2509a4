// smilecal: calibrate collocation smile models and emit curves for plotting.
//
// Subcommands:
//   calibrate --data <name|csv> --model bspline|schumaker [--guess atm|smile]
//             [--knots smile|atm|guideline] [--epsilon e] [--c-left c]
//             [--c-right c] [--weighting inverse-vega|unit] [--grid n]
//             --out <dir>
//   price    --model-file model.json --strikes <list|lo:hi:n>
//   density  --model-file model.json --strikes <list|lo:hi:n>
//   verify   --model-file model.json [--tol t]
//
// Exit codes: 0 success/converged, 2 calibration stopped before convergence,
// 64 usage error, 65 configuration error (e.g. guideline knots unavailable),
// 1 runtime failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "colloc/calibration.hpp"
#include "colloc/serialization.hpp"
#include "colloc/special_functions.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// "a,b,c" or "lo:hi:n" (n equally spaced, inclusive)
std::vector<double> parse_strikes(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double lo, hi;
        int n;
        char c1, c2;
        std::istringstream is(text);
        if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
            throw CLI::ValidationError("--strikes", "expected lo:hi:n");
        for (int i = 0; i < n; ++i)
            out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return out;
    }
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("--strikes", "no strikes given");
    return out;
}

colloc::MarketSlice resolve_data(const std::string& spec, std::string* name,
                                 std::vector<double>* guideline) {
    if (const colloc::Dataset* d = colloc::find_dataset(spec)) {
        *name = d->name;
        *guideline = d->guideline_knots;
        return d->slice;
    }
    if (!std::filesystem::exists(spec))
        throw CLI::ValidationError("--data", "unknown dataset or missing file: " + spec);
    *name = std::filesystem::path(spec).stem().string();
    guideline->clear();
    return colloc::load_market_csv(spec);
}

std::string maybe_vol(const colloc::CollocationModel& m, double strike) {
    try {
        const double p = m.price_call(strike);
        return fmt(colloc::implied_vol(p, m.forward(), strike, m.maturity(), true));
    } catch (const std::exception&) {
        return "";  // out of the arbitrage band; leave the column blank
    }
}

int cmd_calibrate(const std::string& data, const std::string& model_kind,
                  const std::string& guess, const std::string& knots,
                  double epsilon, double c_left, double c_right,
                  const std::string& weighting, int grid,
                  const std::string& out_dir) {
    std::string name;
    std::vector<double> guideline;
    const colloc::MarketSlice market = resolve_data(data, &name, &guideline);

    colloc::CalibrationConfig cfg;
    cfg.parameterization = model_kind == "bspline"
                               ? colloc::Parameterization::bspline
                               : colloc::Parameterization::schumaker;
    cfg.guess = guess == "atm" ? colloc::GuessKind::atm : colloc::GuessKind::smile;
    cfg.knot_set = knots == "guideline" ? colloc::KnotSetKind::guideline_fixture
                   : knots == "atm"     ? colloc::KnotSetKind::atm_implied
                                        : colloc::KnotSetKind::smile_implied;
    cfg.epsilon = epsilon;
    cfg.c_left = c_left;
    cfg.c_right = c_right;
    cfg.weighting = weighting == "unit" ? colloc::Weighting::unit
                                        : colloc::Weighting::inverse_vega;

    if (cfg.parameterization == colloc::Parameterization::bspline &&
        cfg.knot_set == colloc::KnotSetKind::guideline_fixture &&
        guideline.empty()) {
        std::cerr << "error: no guideline knot fixture available for dataset '"
                  << name << "'\n";
        return 65;
    }

    colloc::CalibratedResult res =
        cfg.parameterization == colloc::Parameterization::bspline &&
                cfg.knot_set == colloc::KnotSetKind::guideline_fixture
            ? colloc::calibrate_with_knots(market, cfg, guideline)
            : colloc::calibrate(market, cfg);

    std::filesystem::create_directories(out_dir);
    std::ostringstream cs;
    cs << model_kind << '|' << guess << '|' << knots << '|' << epsilon << '|'
       << c_left << '|' << c_right << '|' << weighting;
    std::ostringstream hdr;
    hdr << "# dataset=" << name << " config_hash=" << std::hex
        << fnv1a(cs.str()) << std::dec << " version=" << kVersion << "\n";

    std::ofstream(out_dir + "/model.json") << colloc::model_to_json(res.model);

    {
        std::ofstream f(out_dir + "/ivcurve.csv");
        f << hdr.str() << "strike,model_vol,market_vol\n";
        for (std::size_t i = 0; i < market.size(); ++i)
            f << fmt(market.strikes[i]) << ','
              << maybe_vol(res.model, market.strikes[i]) << ','
              << fmt(market.vols[i]) << "\n";
    }
    {
        // log-spaced grid over [K_min/3, 3 K_max] merged with the quoted strikes
        std::vector<double> ks;
        const double lo = std::log(market.strikes.front() / 3.0);
        const double hi = std::log(market.strikes.back() * 3.0);
        for (int i = 0; i < grid; ++i)
            ks.push_back(std::exp(lo + (hi - lo) * i / (grid - 1)));
        ks.insert(ks.end(), market.strikes.begin(), market.strikes.end());
        std::sort(ks.begin(), ks.end());
        std::ofstream f(out_dir + "/density.csv");
        f << hdr.str() << "strike,density\n";
        for (double k : ks)
            f << fmt(k) << ',' << fmt(res.model.density(k).density) << "\n";
    }
    {
        std::ofstream f(out_dir + "/trace.csv");
        f << hdr.str() << "iteration,objective,first_ordinate\n";
        for (const auto& rec : res.trace)
            f << rec.iteration << ',' << fmt(rec.objective) << ','
              << fmt(rec.first_ordinate) << "\n";
    }

    std::cout << "dataset " << name << ": " << (res.converged ? "converged" : "stopped")
              << " after " << res.iterations << " iterations, vol RMSE "
              << res.vol_rmse << (res.knots_repaired ? " (knots repaired)" : "")
              << "\n";
    return res.converged ? 0 : 2;
}

int cmd_price(const std::string& model_file, const std::string& strikes,
              bool density_mode) {
    const colloc::CollocationModel m = colloc::load_model(model_file);
    std::cout << (density_mode ? "strike,density\n" : "strike,price,implied_vol\n");
    for (double k : parse_strikes(strikes)) {
        if (density_mode) {
            std::cout << fmt(k) << ',' << fmt(m.density(k).density) << "\n";
        } else {
            std::cout << fmt(k) << ',' << fmt(m.price_call(k)) << ','
                      << maybe_vol(m, k) << "\n";
        }
    }
    return 0;
}

int cmd_verify(const std::string& model_file, double tol) {
    const colloc::CollocationModel m = colloc::load_model(model_file);
    const double m1_err = std::abs(m.first_moment() - m.forward()) / m.forward();

    // 50 strikes log-spaced across +-4 standard normal quantiles of the body
    double worst = 0.0, worst_k = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double x = -4.0 + 8.0 * i / 49.0;
        const double k = std::exp(m.g(x));
        const double closed = m.price_call(k);
        const double quad = colloc::integrate(
            [&](double t) {
                const double payoff = std::exp(m.g(t)) - k;
                return payoff > 0.0 ? payoff * colloc::norm_pdf(t) : 0.0;
            },
            -12.0, 12.0, 1e-13);
        const double rel = std::abs(closed - quad) / std::max(quad, 1e-300);
        if (rel > worst) {
            worst = rel;
            worst_k = k;
        }
    }
    std::cout << "max relative price error " << worst << " at strike " << worst_k
              << "; |M1 - F|/F = " << m1_err << "\n";
    return (worst <= tol && m1_err <= 1e-10) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arbitrage-free smile calibration by spline collocation"};
    app.require_subcommand(1);

    std::string data, model_kind = "bspline", guess = "smile", knots = "smile";
    std::string weighting = "inverse-vega", out_dir;
    double epsilon = 1e-4, c_left = 0.0, c_right = 0.0;
    int grid = 400;

    CLI::App* cal = app.add_subcommand("calibrate", "Fit a model to a smile");
    cal->add_option("--data", data, "Bundled dataset name or CSV path")->required();
    cal->add_option("--model", model_kind)->check(CLI::IsMember({"bspline", "schumaker"}));
    cal->add_option("--guess", guess)->check(CLI::IsMember({"atm", "smile"}));
    cal->add_option("--knots", knots)->check(CLI::IsMember({"guideline", "smile", "atm"}));
    cal->add_option("--epsilon", epsilon, "Inverse-slope penalty weight");
    cal->add_option("--c-left", c_left, "Left wing curvature (<= 0)");
    cal->add_option("--c-right", c_right, "Right wing curvature in [0, 1/2)");
    cal->add_option("--weighting", weighting)->check(CLI::IsMember({"inverse-vega", "unit"}));
    cal->add_option("--grid", grid, "Density grid size")->check(CLI::Range(2, 100000));
    cal->add_option("--out", out_dir, "Output directory")->required();

    std::string model_file, strikes;
    double tol = 1e-8;
    CLI::App* pr = app.add_subcommand("price", "Price calls from a model file");
    pr->add_option("--model-file", model_file)->required();
    pr->add_option("--strikes", strikes, "Comma list or lo:hi:n")->required();
    CLI::App* de = app.add_subcommand("density", "Implied density from a model file");
    de->add_option("--model-file", model_file)->required();
    de->add_option("--strikes", strikes, "Comma list or lo:hi:n")->required();
    CLI::App* ve = app.add_subcommand("verify", "Closed form vs quadrature check");
    ve->add_option("--model-file", model_file)->required();
    ve->add_option("--tol", tol, "Max relative price error");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 64;
    }

    try {
        if (cal->parsed())
            return cmd_calibrate(data, model_kind, guess, knots, epsilon, c_left,
                                 c_right, weighting, grid, out_dir);
        if (pr->parsed()) return cmd_price(model_file, strikes, false);
        if (de->parsed()) return cmd_price(model_file, strikes, true);
        if (ve->parsed()) return cmd_verify(model_file, tol);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 65;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}
