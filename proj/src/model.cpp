#include "pca/model.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

namespace pca {

void TransitionTable::validate() const {
    if (nb.size() > Neighborhood::kMaxDense)
        throw ConfigError("dense transition table needs (2r+1)^d <= " +
                          std::to_string(Neighborhood::kMaxDense) + ", got " +
                          std::to_string(nb.size()));
    const std::size_t want = 1ULL << nb.size();
    if (p.size() != want)
        throw ConfigError("transition table must define all " + std::to_string(want) +
                          " subsets, got " + std::to_string(p.size()));
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0))
            throw ConfigError("transition probability out of [0,1]");
}

double LambdaTable::sum() const {
    double s = 0.0;
    for (const auto& [m, v] : lambda) s += v;
    return s;
}

double LambdaTable::weighted_sum() const {
    double s = 0.0;
    for (const auto& [m, v] : lambda)
        if (m != 0) s += v * static_cast<double>(std::popcount(m));
    return s;
}

Neighborhood build_neighborhood(int radius, int dimension) {
    return Neighborhood::build(radius, dimension);
}

LambdaTable mobius_lambda(const TransitionTable& table) {
    table.validate();
    const int n = table.nb.size();
    std::vector<double> f = table.p;
    for (int i = 0; i < n; ++i) {
        const std::size_t bit = 1ULL << i;
        for (std::size_t mask = 0; mask < f.size(); ++mask)
            if (mask & bit) f[mask] -= f[mask ^ bit];
    }
    LambdaTable lt{table.nb, {}};
    for (std::size_t mask = 0; mask < f.size(); ++mask)
        if (f[mask] != 0.0) lt.lambda.emplace(static_cast<std::uint64_t>(mask), f[mask]);
    return lt;
}

TransitionTable table_from_lambda(const LambdaTable& lt) {
    const int n = lt.nb.size();
    if (n > Neighborhood::kMaxDense)
        throw ConfigError("cannot densify lambda table with " + std::to_string(n) +
                          " neighborhood sites (cap " +
                          std::to_string(Neighborhood::kMaxDense) + ")");
    std::vector<double> f(1ULL << n, 0.0);
    for (const auto& [m, v] : lt.lambda) f[m] = v;
    for (int i = 0; i < n; ++i) {
        const std::size_t bit = 1ULL << i;
        for (std::size_t mask = 0; mask < f.size(); ++mask)
            if (mask & bit) f[mask] += f[mask ^ bit];
    }
    TransitionTable t{lt.nb, std::move(f)};
    t.validate();
    return t;
}

namespace {

ClassReport report_from_lambda(const LambdaTable& lt, double D, double gamma) {
    ClassReport rep;
    rep.D = D;
    for (const auto& [m, v] : lt.lambda)
        if (v < -kLambdaNegTol || v >= 1.0) rep.violations.emplace_back(m, v);
    rep.is_class_C = rep.violations.empty();
    rep.ergodic = rep.is_class_C && rep.D < 1.0;
    rep.gamma = gamma;
    return rep;
}

}  // namespace

ClassReport check_class(const TransitionTable& table) {
    LambdaTable lt = mobius_lambda(table);
    return report_from_lambda(lt, table.full(), dobrushin_gamma(table));
}

ClassReport check_class(const LambdaTable& lt) {
    // Sparse route: D = sum of weights; the full subset scan for gamma is
    // unavailable, so use the class-C identity gamma = sum lambda(J)|J|.
    ClassReport rep = report_from_lambda(lt, lt.sum(), 0.0);
    rep.gamma = rep.is_class_C ? lt.weighted_sum() : std::nan("");
    return rep;
}

double dobrushin_gamma(const TransitionTable& table) {
    table.validate();
    const int n = table.nb.size();
    double gamma = 0.0;
    for (int j = 0; j < n; ++j) {
        const std::size_t bit = 1ULL << j;
        double sup = 0.0;
        for (std::size_t mask = 0; mask < table.p.size(); ++mask) {
            if (mask & bit) continue;
            sup = std::max(sup, std::abs(table.p[mask | bit] - table.p[mask]));
        }
        gamma += sup;
    }
    return gamma;
}

TransitionTable domany_kinzel(double a0, double a1, double a2) {
    Neighborhood nb = Neighborhood::build(1, 1);
    // offset order: -1, 0, 1 -> bits 0, 1, 2; the center site has no effect
    std::vector<double> p(8, 0.0);
    for (std::size_t mask = 0; mask < 8; ++mask) {
        const bool left = mask & 1, right = mask & 4;
        p[mask] = (left && right) ? a2 : (left || right) ? a1 : a0;
    }
    TransitionTable t{nb, std::move(p)};
    t.validate();
    return t;
}

TransitionTable binomial2d(double alpha) {
    Neighborhood nb = Neighborhood::build(1, 2);
    std::vector<double> p(1ULL << 9);
    for (std::size_t mask = 0; mask < p.size(); ++mask)
        p[mask] = alpha * static_cast<double>(1ULL << std::popcount(mask));
    TransitionTable t{nb, std::move(p)};
    t.validate();
    return t;
}

TransitionTable constant_table(const Neighborhood& nb, double c) {
    TransitionTable t{nb, std::vector<double>(1ULL << nb.size(), c)};
    t.validate();
    return t;
}

}  // namespace pca
