#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "pca/model.hpp"

namespace pca {

// Subset key: offsets joined by ";", coordinates joined by ":", offsets in
// ascending lexicographic order; the empty set is "". d=1: "-1;1",
// d=2: "-1:0;0:1".
std::string subset_key(const Neighborhood& nb, std::uint64_t mask);
std::uint64_t parse_subset_key(const Neighborhood& nb, const std::string& key);

// JSON model document:
//   {"dimension":d, "radius":r, "spec":{...}}
// where spec is one of the kinds below.
struct ModelFile {
    enum class Kind { Table, Lambda, DomanyKinzel, Binomial2d };

    int dimension = 1;
    int radius = 1;
    Kind kind = Kind::Table;
    std::map<std::string, double> entries;  // "table": p, "lambda": weights
    double a0 = 0, a1 = 0, a2 = 0;          // domany-kinzel
    double alpha = 0;                       // binomial2d

    static ModelFile parse(const std::string& json_text);
    static ModelFile load(const std::string& path);
    std::string serialize() const;

    Neighborhood neighborhood() const;
    // Dense table; throws ConfigError when the neighborhood exceeds the
    // dense cap (use to_lambda then).
    TransitionTable to_table() const;
    LambdaTable to_lambda() const;
    bool dense_capable() const;

    std::string digest() const;  // stable hex hash of the canonical serialization
};

}  // namespace pca
