#include "colloc/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#ifndef COLLOC_DATA_DIR
#define COLLOC_DATA_DIR "data"
#endif

namespace colloc {

void MarketSlice::validate() const {
    if (!(forward > 0.0)) throw std::invalid_argument("market slice: forward must be positive");
    if (!(maturity > 0.0)) throw std::invalid_argument("market slice: maturity must be positive");
    if (strikes.size() != vols.size())
        throw std::invalid_argument("market slice: strikes/vols length mismatch");
    if (strikes.empty()) throw std::invalid_argument("market slice: empty");
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        if (!(strikes[i] > 0.0))
            throw std::invalid_argument("market slice: strikes must be positive");
        if (!(vols[i] > 0.0))
            throw std::invalid_argument("market slice: vols must be positive");
        if (i > 0 && !(strikes[i] > strikes[i - 1]))
            throw std::invalid_argument("market slice: strikes not strictly increasing");
    }
}

namespace {

double parse_number(const std::string& tok, const std::string& path, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        std::ostringstream os;
        os << path << ":" << line << ": cannot parse number '" << tok << "'";
        throw std::runtime_error(os.str());
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// payload lines of a CSV file: (line number, text), comments skipped
std::vector<std::pair<int, std::string>> read_payload(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<int, std::string>> lines;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const std::string t = strip(line);
        if (t.empty() || t[0] == '#') continue;
        lines.emplace_back(no, t);
    }
    return lines;
}

}  // namespace

MarketSlice load_market_csv(const std::string& path) {
    const auto lines = read_payload(path);
    if (lines.size() < 3)
        throw std::runtime_error(path + ": expected metadata, header and at least one row");

    MarketSlice slice;
    {  // "forward=<v> maturity=<v>"
        const auto& [no, text] = lines[0];
        std::stringstream ss(text);
        std::string kv;
        while (ss >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                std::ostringstream os;
                os << path << ":" << no << ": expected key=value metadata, got '" << kv << "'";
                throw std::runtime_error(os.str());
            }
            const std::string key = kv.substr(0, eq);
            const double val = parse_number(kv.substr(eq + 1), path, no);
            if (key == "forward") slice.forward = val;
            else if (key == "maturity") slice.maturity = val;
            else throw std::runtime_error(path + ": unknown metadata key '" + key + "'");
        }
    }
    const std::string header = lines[1].second;
    bool moneyness;
    if (header == "strike,vol") moneyness = false;
    else if (header == "moneyness,vol") moneyness = true;
    else throw std::runtime_error(path + ": header must be 'strike,vol' or 'moneyness,vol'");

    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto& [no, text] = lines[i];
        const auto cols = split(text, ',');
        if (cols.size() != 2) {
            std::ostringstream os;
            os << path << ":" << no << ": expected 2 columns, got " << cols.size();
            throw std::runtime_error(os.str());
        }
        double k = parse_number(strip(cols[0]), path, no);
        const double v = parse_number(strip(cols[1]), path, no);
        if (moneyness) k *= slice.forward;
        slice.strikes.push_back(k);
        slice.vols.push_back(v);
    }
    // sort by strike, reject duplicates
    std::vector<std::size_t> order(slice.strikes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return slice.strikes[a] < slice.strikes[b];
    });
    MarketSlice sorted;
    sorted.forward = slice.forward;
    sorted.maturity = slice.maturity;
    for (std::size_t i : order) {
        if (!sorted.strikes.empty() && slice.strikes[i] == sorted.strikes.back())
            throw std::runtime_error(path + ": duplicate strike in data");
        sorted.strikes.push_back(slice.strikes[i]);
        sorted.vols.push_back(slice.vols[i]);
    }
    sorted.validate();
    return sorted;
}

std::vector<double> load_column_csv(const std::string& path) {
    const auto lines = read_payload(path);
    if (lines.empty() || lines[0].second != "x")
        throw std::runtime_error(path + ": expected single-column file with header 'x'");
    std::vector<double> out;
    for (std::size_t i = 1; i < lines.size(); ++i)
        out.push_back(parse_number(lines[i].second, path, lines[i].first));
    return out;
}

XYFixture load_xy_csv(const std::string& path) {
    const auto lines = read_payload(path);
    if (lines.empty() || lines[0].second != "x,y")
        throw std::runtime_error(path + ": expected two-column file with header 'x,y'");
    XYFixture f;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cols = split(lines[i].second, ',');
        if (cols.size() != 2)
            throw std::runtime_error(path + ": expected 2 columns");
        f.x.push_back(parse_number(strip(cols[0]), path, lines[i].first));
        f.y.push_back(parse_number(strip(cols[1]), path, lines[i].first));
    }
    return f;
}

std::string data_directory() { return COLLOC_DATA_DIR; }

namespace {
std::vector<Dataset> load_registry() {
    const std::string dir = data_directory();
    std::vector<Dataset> out;
    Dataset j1{"jackel_case1", load_market_csv(dir + "/jackel_case1.csv"), {}};
    Dataset j2{"jackel_case2", load_market_csv(dir + "/jackel_case2.csv"),
               load_column_csv(dir + "/jackel_case2_guideline_knots.csv")};
    Dataset tsla{"tsla_18m", load_market_csv(dir + "/tsla_jan2020.csv"), {}};
    out.push_back(std::move(j1));
    out.push_back(std::move(j2));
    out.push_back(std::move(tsla));
    return out;
}
}  // namespace

const std::vector<Dataset>& registry() {
    static const std::vector<Dataset> r = load_registry();
    return r;
}

const XYFixture& schumaker_counterexample() {
    static const XYFixture f = [] {
        XYFixture x = load_xy_csv(data_directory() + "/schumaker_counterexample.csv");
        x.name = "schumaker_counterexample";
        return x;
    }();
    return f;
}

const Dataset* find_dataset(const std::string& name) {
    for (const Dataset& d : registry())
        if (d.name == name) return &d;
    return nullptr;
}

}  // namespace colloc
