#pragma once

#include <string>

#include "colmatch/core.hpp"

namespace colmatch {

// Wire formats:
//   instance  {"n2": int, "matchings": [[[u,v],...],...]}
//   solution  {"edges": [[u,v],...], "chosen": [i,...], "counts": [c,...]}
// Parsers throw InvalidInputError on malformed documents.

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

std::string solution_to_json(const Solution& sol);
Solution solution_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace colmatch
