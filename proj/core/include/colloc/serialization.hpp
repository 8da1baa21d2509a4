#pragma once

#include <string>

#include "colloc/collocation_model.hpp"

namespace colloc {

/// JSON text for the model. Schema (version 1):
///   version        integer, currently 1
///   forward        number
///   maturity       number (years)
///   moment_shift   number, accumulated ordinate shift ln F - ln M1
///   moment_enforced  bool
///   knots          array of numbers, strictly increasing
///   segments       array of {a, b, c} objects, one per knot interval, where
///                  g(x) = a + b (x - knot_j) + c (x - knot_j)^2
///   value_end      number, g at the last knot
///   wings          {s_left, s_right, c_left, c_right}
/// Numbers carry 17 significant digits so read-back is bit-exact.
std::string model_to_json(const CollocationModel& model);

CollocationModel model_from_json(const std::string& text);

void save_model(const CollocationModel& model, const std::string& path);
CollocationModel load_model(const std::string& path);

}  // namespace colloc
