#pragma once

#include <string>
#include <vector>

#include "glpin/cli/config.hpp"
#include "glpin/vortex_analysis.hpp"

namespace glpin::cli {

// Entry point of the glpin tool: 0 ok, 1 validation error, 2 solver error.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

json to_json(const Point2& p);
json to_json(const Sym2& q);
json to_json(const DefectReport& r);
json to_json(const Comparison& c);
json to_json(const Prediction& p);
json to_json(const CriticalLadder& l);
json to_json(const DecompositionReport& d);

}  // namespace glpin::cli
