#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "floquet/floquet.hpp"

namespace floquet {

using ordered_json = nlohmann::ordered_json;

/// Serializes with insertion-ordered keys and every floating value printed
/// as %.12e, so identical inputs give byte-identical text.
std::string dump_deterministic(const ordered_json& value, int indent = 2);

ordered_json to_json(const Complex& z);
ordered_json to_json(const CMatrix& m);
ordered_json to_json(const RMatrix& m);
ordered_json to_json(const HypothesisReport& report);
ordered_json to_json(const std::vector<Residual>& residuals);
ordered_json to_json(const FloquetReport& report);

}  // namespace floquet
