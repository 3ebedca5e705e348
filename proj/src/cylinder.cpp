#include "pca/cylinder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pca/errors.hpp"

namespace pca {

Pattern Pattern::from_word(const std::string& bits, std::int64_t base) {
    if (bits.empty()) throw ConfigError("pattern word must be nonempty");
    Pattern p;
    p.dim = 1;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const char c = bits[i];
        if (c != '0' && c != '1') throw ConfigError("pattern word must be over {0,1}");
        p.support.push_back(site1(static_cast<std::int32_t>(base + static_cast<std::int64_t>(i))));
        p.values.push_back(c == '1');
    }
    return p;
}

std::size_t Pattern::zeros() const {
    return static_cast<std::size_t>(std::count(values.begin(), values.end(), 0));
}

Pattern Pattern::shifted_by(const Coord& s) const {
    Pattern p = *this;
    for (auto& z : p.support) z = z + s;
    return p;
}

void Pattern::validate() const {
    if (support.size() != values.size()) throw ConfigError("pattern support/value length mismatch");
    if (support.empty()) throw ConfigError("pattern must have at least one cell");
    for (std::size_t i = 1; i < support.size(); ++i)
        if (!(support[i - 1] < support[i]))
            throw ConfigError("pattern support must be sorted and distinct");
}

double CylinderCombination::evaluate(const std::function<bool(const Coord&)>& config) const {
    double acc = 0.0;
    for (const auto& term : terms) {
        bool all = true;
        for (const auto& z : term.set)
            if (!config(z)) {
                all = false;
                break;
            }
        if (all) acc += term.coeff;
    }
    return acc;
}

CylinderCombination decompose(const Pattern& pattern) {
    pattern.validate();
    std::vector<Coord> ones, zeros;
    for (std::size_t i = 0; i < pattern.support.size(); ++i)
        (pattern.values[i] ? ones : zeros).push_back(pattern.support[i]);
    if (zeros.size() > kMaxZeroBits)
        throw ResourceError("pattern has " + std::to_string(zeros.size()) +
                            " zero cells; the 2^zeros expansion is capped at 2^" +
                            std::to_string(kMaxZeroBits) + " terms");

    CylinderCombination comb;
    comb.extent = pattern.cells();
    comb.dim = pattern.dim;
    const std::uint32_t count = 1u << zeros.size();
    comb.terms.reserve(count);
    for (std::uint32_t s = 0; s < count; ++s) {
        SiteSet set = ones;
        for (std::size_t i = 0; i < zeros.size(); ++i)
            if (s >> i & 1) set.push_back(zeros[i]);
        canonicalize(set);
        comb.terms.push_back({(std::popcount(s) & 1) ? -1 : 1, std::move(set)});
    }
    return comb;
}

MeasureEstimate ExactProvider::mu_hat(const SiteSet& y) {
    // serialized: the shared transition cache is not thread-safe
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(y); it != cache_.end()) return it->second;
    MeasureEstimate est = mu_hat_exact(y, kernel_, truncation_, budget_, &transitions_);
    return cache_.emplace(y, est).first->second;
}

MeasureEstimate McProvider::mu_hat(const SiteSet& y) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(y); it != cache_.end()) return it->second;
    }
    // stream block derived from the set itself, so every distinct Y gets an
    // independent, order-insensitive seed
    const std::uint64_t sub_seed = mix64(seed_ ^ SiteSetHash{}(y));
    McResult res = mu_hat_mc(y, kernel_, replicas_, sub_seed, threads_);
    std::lock_guard lock(mutex_);
    aborted_ += res.aborted;
    return cache_.emplace(y, res.estimate).first->second;
}

MeasureEstimate ProductProvider::mu_hat(const SiteSet& y) {
    MeasureEstimate est;
    est.method = MeasureEstimate::Method::ClosedForm;
    est.value = 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) est.value *= c_;
    return est;
}

MeasureEstimate measure(const CylinderCombination& comb, MuHatProvider& provider) {
    // collapse duplicate sets before touching the provider
    std::unordered_map<SiteSet, int, SiteSetHash> coeffs;
    for (const auto& term : comb.terms) coeffs[term.set] += term.coeff;

    std::vector<std::pair<SiteSet, int>> work(coeffs.begin(), coeffs.end());
    std::sort(work.begin(), work.end());  // deterministic accumulation order

    MeasureEstimate out;
    out.method = MeasureEstimate::Method::ClosedForm;
    double var = 0.0;
    for (const auto& [set, coeff] : work) {
        if (coeff == 0) continue;
        const MeasureEstimate e = provider.mu_hat(set);
        out.value += coeff * e.value;
        out.det_error += std::abs(coeff) * e.det_error;
        var += static_cast<double>(coeff) * coeff * (e.stat_error / 3.0) * (e.stat_error / 3.0);
        if (e.method != MeasureEstimate::Method::ClosedForm) out.method = e.method;
    }
    out.stat_error = 3.0 * std::sqrt(var);
    return out;
}

CylinderCombination couple(const CylinderCombination& comb_u, const CylinderCombination& comb_v,
                           std::int64_t t) {
    const std::int64_t threshold =
        static_cast<std::int64_t>(comb_u.extent) + static_cast<std::int64_t>(comb_v.extent);
    if (t < threshold)
        throw ConfigError("coupling needs t >= |U|+|V| = " + std::to_string(threshold) +
                          ", got t = " + std::to_string(t));
    CylinderCombination out;
    out.extent = comb_u.extent + comb_v.extent;
    out.dim = comb_u.dim;
    const Coord shift = site1(static_cast<std::int32_t>(t));
    out.terms.reserve(comb_u.terms.size() * comb_v.terms.size());
    for (const auto& a : comb_u.terms)
        for (const auto& b : comb_v.terms)
            out.terms.push_back({a.coeff * b.coeff, set_union(a.set, shifted(b.set, shift))});
    return out;
}

}  // namespace pca
