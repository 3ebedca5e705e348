#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pca/cylinder.hpp"

namespace pca::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 ok, 2 parse/config, 3 certification, 4 resource budget.
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCertification = 3;
inline constexpr int kExitResource = 4;

// `100@0` (d=1) or `x:y=v,...` (d=2)
Pattern parse_pattern(const std::string& text, int dim);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pca::cli
