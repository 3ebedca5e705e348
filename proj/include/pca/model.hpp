#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "pca/errors.hpp"
#include "pca/neighborhood.hpp"

namespace pca {

inline constexpr double kLambdaNegTol = 1e-12;

// The complete definition of a two-state PCA: p[J] is the probability that
// a site becomes 1 given that exactly the neighbors at offsets J are 1.
// Stored densely over all 2^n subset bitmasks; n is capped at 20.
struct TransitionTable {
    Neighborhood nb;
    std::vector<double> p;  // size 1 << nb.size()

    double full() const { return p.back(); }  // p(I_r), the absorption parameter D
    void validate() const;
};

// Sparse Moebius weights: p(J) = sum_{J' subset of J} lambda(J').
struct LambdaTable {
    Neighborhood nb;
    std::map<std::uint64_t, double> lambda;  // zero entries omitted

    double at(std::uint64_t mask) const {
        auto it = lambda.find(mask);
        return it == lambda.end() ? 0.0 : it->second;
    }
    double sum() const;          // = p(I_r)
    double weighted_sum() const; // sum over nonempty J of lambda(J)*|J|
};

struct ClassReport {
    bool is_class_C = false;
    std::vector<std::pair<std::uint64_t, double>> violations;  // lambda < -tol or >= 1
    double D = 0.0;
    bool ergodic = false;
    double gamma = 0.0;
};

// Non-class-C or non-ergodic model rejected by the dual construction
// (CLI exit code 3). Carries the certificate so callers can report it.
struct CertificationError : Error {
    CertificationError(const std::string& what, ClassReport rep)
        : Error(what), report(std::move(rep)) {}
    ClassReport report;
};

Neighborhood build_neighborhood(int radius, int dimension);

// Moebius inverse over the subset lattice, O(n 2^n).
LambdaTable mobius_lambda(const TransitionTable& table);

// Zeta transform: rebuild the dense table from lambda weights (n <= 20).
TransitionTable table_from_lambda(const LambdaTable& lt);

ClassReport check_class(const TransitionTable& table);
ClassReport check_class(const LambdaTable& lt);

// gamma = sum_j sup_J |p(J u {j}) - p(J)|, by full subset scan.
double dobrushin_gamma(const TransitionTable& table);

// Model builders.
TransitionTable domany_kinzel(double a0, double a1, double a2);
TransitionTable binomial2d(double alpha);
TransitionTable constant_table(const Neighborhood& nb, double c);

}  // namespace pca
