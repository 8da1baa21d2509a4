#include "colloc/serialization.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace colloc {

using nlohmann::json;

std::string model_to_json(const CollocationModel& model) {
    const PiecewiseQuadratic& pq = model.spline();
    json segs = json::array();
    for (const auto& s : pq.segments)
        segs.push_back({{"a", s.a}, {"b", s.b}, {"c", s.c}});
    const WingSpec& w = model.wings();
    json j = {
        {"version", 1},
        {"forward", model.forward()},
        {"maturity", model.maturity()},
        {"moment_shift", model.moment_shift()},
        {"moment_enforced", model.moment_enforced()},
        {"knots", pq.knots},
        {"segments", segs},
        {"value_end", pq.value_end},
        {"wings",
         {{"s_left", w.s_left},
          {"s_right", w.s_right},
          {"c_left", w.c_left},
          {"c_right", w.c_right}}},
    };
    return j.dump(2) + "\n";
}

CollocationModel model_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (j.at("version").get<int>() != 1)
        throw std::runtime_error("model file: unsupported version");
    PiecewiseQuadratic pq;
    pq.knots = j.at("knots").get<std::vector<double>>();
    for (const auto& s : j.at("segments"))
        pq.segments.push_back({s.at("a").get<double>(), s.at("b").get<double>(),
                               s.at("c").get<double>()});
    pq.value_end = j.at("value_end").get<double>();
    WingSpec w;
    const json& jw = j.at("wings");
    w.s_left = jw.at("s_left").get<double>();
    w.s_right = jw.at("s_right").get<double>();
    w.c_left = jw.at("c_left").get<double>();
    w.c_right = jw.at("c_right").get<double>();
    return CollocationModel::restore(std::move(pq), w, j.at("forward").get<double>(),
                                     j.at("maturity").get<double>(),
                                     j.at("moment_enforced").get<bool>(),
                                     j.at("moment_shift").get<double>());
}

void save_model(const CollocationModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << model_to_json(model);
}

CollocationModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace colloc
