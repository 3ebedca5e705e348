#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pca/cylinder.hpp"
#include "pca/model.hpp"

namespace pca {

// Explicit constants of the exponential correlation bound
// |mu(U n sigma^-t V) - mu(U) mu(V)| <= K(U,V) exp(-a t).
struct DecayConstants {
    double D = 0.0;
    int r = 1;
    double a = 0.0;  // ln(1/D) / (2r)
    double F = 0.0;  // sum_{i,j} |alpha_i beta_j| * D/(1-D)
    double K = 0.0;  // F * D^{-(|U|+|V|)/(2r)}
};

DecayConstants decay_constants(const CylinderCombination& comb_u,
                               const CylinderCombination& comb_v, double D, int r);

struct CorrelationPoint {
    std::int64_t t = 0;
    double corr = 0.0;      // |mu(U n sigma^-t V) - mu(U) mu(V)|
    double error = 0.0;     // combined error of the difference
    double envelope = 0.0;  // K exp(-a t)
    bool below_resolution = false;
};

std::vector<CorrelationPoint> correlation_curve(const CylinderCombination& comb_u,
                                                const CylinderCombination& comb_v,
                                                std::int64_t t_min, std::int64_t t_max,
                                                MuHatProvider& provider,
                                                const DecayConstants& constants);

// header `t,corr,err,envelope`, 12 significant digits
std::string correlation_csv(const std::vector<CorrelationPoint>& points);

struct DobrushinReport {
    double gamma = 0.0;
    double D = 0.0;
    bool duality_applies = false;    // class-C and D < 1
    bool dobrushin_applies = false;  // gamma < 1
    double rate_duality = 0.0;       // ln(1/D)/(2r), when applicable
    double rate_dobrushin = 0.0;     // ln(1/gamma)/(2r), when applicable
};

DobrushinReport dobrushin_report(const TransitionTable& table);

}  // namespace pca
