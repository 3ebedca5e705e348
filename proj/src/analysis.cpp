#include "pca/analysis.hpp"

#include <cmath>
#include <sstream>

namespace pca {

DecayConstants decay_constants(const CylinderCombination& comb_u,
                               const CylinderCombination& comb_v, double D, int r) {
    if (r < 1) throw ConfigError("decay constants need r >= 1");
    if (D <= 0.0)
        throw DegenerateModelError("D = 0: invariant measure is delta_0 and every "
                                   "correlation vanishes");
    if (D >= 1.0) throw ConfigError("decay constants need D < 1");

    double sum_u = 0.0, sum_v = 0.0;
    for (const auto& term : comb_u.terms) sum_u += std::abs(term.coeff);
    for (const auto& term : comb_v.terms) sum_v += std::abs(term.coeff);

    DecayConstants c;
    c.D = D;
    c.r = r;
    c.a = std::log(1.0 / D) / (2.0 * r);
    c.F = sum_u * sum_v * D / (1.0 - D);
    const double ext = static_cast<double>(comb_u.extent + comb_v.extent);
    c.K = c.F * std::pow(D, -ext / (2.0 * r));
    return c;
}

std::vector<CorrelationPoint> correlation_curve(const CylinderCombination& comb_u,
                                                const CylinderCombination& comb_v,
                                                std::int64_t t_min, std::int64_t t_max,
                                                MuHatProvider& provider,
                                                const DecayConstants& constants) {
    const std::int64_t threshold =
        static_cast<std::int64_t>(comb_u.extent) + static_cast<std::int64_t>(comb_v.extent);
    if (t_min < threshold)
        throw ConfigError("correlation curve needs t >= |U|+|V| = " + std::to_string(threshold));
    if (t_max < t_min) throw ConfigError("t_max must be >= t_min");

    const MeasureEstimate mu = measure(comb_u, provider);
    const MeasureEstimate mv = measure(comb_v, provider);

    std::vector<CorrelationPoint> points;
    points.reserve(static_cast<std::size_t>(t_max - t_min + 1));
    for (std::int64_t t = t_min; t <= t_max; ++t) {
        const MeasureEstimate joint = measure(couple(comb_u, comb_v, t), provider);
        CorrelationPoint pt;
        pt.t = t;
        pt.corr = std::abs(joint.value - mu.value * mv.value);
        pt.error = joint.combined_error() + mu.combined_error() * std::abs(mv.value) +
                   mv.combined_error() * std::abs(mu.value) +
                   mu.combined_error() * mv.combined_error();
        pt.envelope = constants.K * std::exp(-constants.a * static_cast<double>(t));
        pt.below_resolution = pt.corr < pt.error;
        points.push_back(pt);
    }
    return points;
}

std::string correlation_csv(const std::vector<CorrelationPoint>& points) {
    std::ostringstream out;
    out.precision(12);
    out << "t,corr,err,envelope\n";
    for (const auto& pt : points)
        out << pt.t << "," << pt.corr << "," << pt.error << "," << pt.envelope << "\n";
    return out.str();
}

DobrushinReport dobrushin_report(const TransitionTable& table) {
    const ClassReport rep = check_class(table);
    DobrushinReport out;
    out.gamma = rep.gamma;
    out.D = rep.D;
    out.duality_applies = rep.ergodic;
    out.dobrushin_applies = rep.gamma < 1.0;
    const double two_r = 2.0 * table.nb.radius();
    if (out.duality_applies && rep.D > 0.0) out.rate_duality = std::log(1.0 / rep.D) / two_r;
    if (out.dobrushin_applies && rep.gamma > 0.0)
        out.rate_dobrushin = std::log(1.0 / rep.gamma) / two_r;
    return out;
}

}  // namespace pca
