#include "pca/dual.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>

namespace pca {

namespace {

double pow_int(double base, std::size_t n) {
    double r = 1.0;
    for (std::size_t i = 0; i < n; ++i) r *= base;
    return r;
}

constexpr double kPruneThreshold = 1e-15;
constexpr std::uint64_t kMcStepCap = 1'000'000;

// The branching law is translation invariant and absorption at the empty set
// only depends on the shape of the site set, so DP states can be pooled up to
// translation: shift every set so its componentwise minimum is the origin.
SiteSet canonical_shape(SiteSet s) {
    if (s.empty()) return s;
    Coord min = s.front();
    for (const auto& z : s)
        for (int k = 0; k < 3; ++k) min[k] = std::min(min[k], z[k]);
    for (auto& z : s)
        for (int k = 0; k < 3; ++k) z[k] -= min[k];
    return s;
}

}  // namespace

const DualKernel::Branch& DualKernel::sample(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    if (i >= branches_.size()) i = branches_.size() - 1;
    return branches_[i];
}

DualKernel dual_kernel(const LambdaTable& lt) {
    ClassReport rep = check_class(lt);
    if (!rep.is_class_C)
        throw CertificationError("model is not class-C: " + std::to_string(rep.violations.size()) +
                                     " lambda weight(s) out of [0,1)",
                                 rep);
    if (rep.D >= 1.0)
        throw CertificationError("model is not ergodic: p(I_r) = " + std::to_string(rep.D) +
                                     " >= 1",
                                 rep);
    if (rep.D <= 0.0)
        throw DegenerateModelError("D = p(I_r) = 0: invariant measure is delta_0 "
                                   "(use closed_form_measure)");

    DualKernel k;
    k.nb_ = lt.nb;
    k.D_ = rep.D;
    k.lambda_empty_ = lt.at(0);
    double acc = 0.0;
    for (const auto& [mask, lam] : lt.lambda) {
        const double pi = std::max(lam, 0.0) / rep.D;  // clamp -1e-12 rounding
        if (pi == 0.0) continue;
        k.branches_.push_back({mask, pi, lt.nb.mask_offsets(mask)});
        acc += pi;
        k.cdf_.push_back(acc);
    }
    if (std::abs(acc - 1.0) > 1e-9)
        throw Error("dual kernel normalization failed: sum pi = " + std::to_string(acc));
    if (!k.cdf_.empty()) k.cdf_.back() = 1.0;
    return k;
}

DualKernel dual_kernel(const TransitionTable& table) { return dual_kernel(mobius_lambda(table)); }

SiteSet step_dual(const SiteSet& state, const DualKernel& kernel, CounterRng& rng) {
    SiteSet next;
    for (const auto& z : state) {  // site-sorted draw order
        const auto& b = kernel.sample(rng.next_unit());
        for (const auto& off : b.offsets) next.push_back(z + off);
    }
    canonicalize(next);
    return next;
}

DualState step_extended(const DualState& state, const DualKernel& kernel, CounterRng& rng) {
    if (state.sink || state.sites.empty()) return state;
    const double survive = pow_int(kernel.D(), state.sites.size());
    if (rng.next_unit() >= survive) return DualState::make_sink();
    return DualState::alive(step_dual(state.sites, kernel, rng));
}

namespace {

// Fast fold for one-dimensional shapes that fit in a 64-bit window: cells are
// bits relative to (min site - max offset), so unions are ORs and the
// translation-canonical form is a right shift.
bool fold_bitmask(const SiteSet& shape, const DualKernel& kernel, double& absorb,
                  std::vector<std::pair<SiteSet, double>>& next) {
    std::int64_t rmax = 0;
    for (const auto& b : kernel.branches())
        for (const auto& off : b.offsets) {
            if (off[1] != 0 || off[2] != 0) return false;
            rmax = std::max<std::int64_t>(rmax, std::abs(off[0]));
        }
    std::int64_t span = 0;
    for (const auto& z : shape) {
        if (z[1] != 0 || z[2] != 0) return false;
        span = std::max<std::int64_t>(span, z[0]);  // canonical: min is 0
    }
    if (span + 2 * rmax + 1 > 64) return false;

    std::vector<std::uint64_t> branch_bits;
    branch_bits.reserve(kernel.branches().size());
    for (const auto& b : kernel.branches()) {
        std::uint64_t m = 0;
        for (const auto& off : b.offsets) m |= 1ULL << (off[0] + rmax);
        branch_bits.push_back(m);
    }

    std::unordered_map<std::uint64_t, double> part{{0, 1.0}};
    std::unordered_map<std::uint64_t, double> folded;
    for (const auto& z : shape) {
        folded.clear();
        for (const auto& [u, w] : part)
            for (std::size_t i = 0; i < branch_bits.size(); ++i)
                folded[u | (branch_bits[i] << z[0])] += w * kernel.branches()[i].prob;
        std::swap(part, folded);
    }

    std::unordered_map<std::uint64_t, double> pooled;
    for (const auto& [u, w] : part) {
        if (u == 0)
            absorb += w;
        else
            pooled[u >> std::countr_zero(u)] += w;  // canonical shift
    }
    next.reserve(pooled.size());
    for (const auto& [u, w] : pooled) {
        SiteSet s;
        for (std::uint64_t m = u; m != 0; m &= m - 1)
            s.push_back(site1(static_cast<std::int32_t>(std::countr_zero(m))));
        next.emplace_back(std::move(s), w);
    }
    return true;
}

// Generic fold over explicit site sets; works in any dimension.
void fold_generic(const SiteSet& shape, const DualKernel& kernel, double& absorb,
                  std::vector<std::pair<SiteSet, double>>& next) {
    std::unordered_map<SiteSet, double, SiteSetHash> part{{SiteSet{}, 1.0}};
    for (const auto& z : shape) {
        std::unordered_map<SiteSet, double, SiteSetHash> folded;
        for (const auto& [u, w] : part)
            for (const auto& b : kernel.branches()) {
                SiteSet merged = u;
                for (const auto& off : b.offsets) merged.push_back(z + off);
                canonicalize(merged);
                folded[std::move(merged)] += w * b.prob;
            }
        part = std::move(folded);
    }
    std::unordered_map<SiteSet, double, SiteSetHash> pooled;
    for (const auto& [u, w] : part) {
        if (u.empty())
            absorb += w;
        else
            pooled[canonical_shape(u)] += w;
    }
    next.assign(pooled.begin(), pooled.end());
}

}  // namespace

std::uint32_t TransitionCache::intern(const SiteSet& canonical_shape) {
    if (auto it = ids_.find(canonical_shape); it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(shapes_.size());
    shapes_.push_back(canonical_shape);
    Transition tr;
    tr.sites = canonical_shape.size();
    transitions_.push_back(std::move(tr));
    ids_.emplace(canonical_shape, id);
    return id;
}

const TransitionCache::Transition& TransitionCache::expand(std::uint32_t id,
                                                           const DualKernel& kernel) {
    if (transitions_[id].expanded) return transitions_[id];

    const SiteSet shape = shapes_[id];  // copy: interning below may reallocate
    double absorb = 0.0;
    std::vector<std::pair<SiteSet, double>> next;
    if (!fold_bitmask(shape, kernel, absorb, next)) fold_generic(shape, kernel, absorb, next);
    std::sort(next.begin(), next.end());  // deterministic id assignment and accumulation

    Transition tr;
    tr.sites = shape.size();
    tr.expanded = true;
    tr.absorb = absorb;
    tr.next.reserve(next.size());
    for (auto& [s, w] : next) tr.next.emplace_back(intern(s), w);
    transitions_[id] = std::move(tr);
    return transitions_[id];
}

MeasureEstimate mu_hat_exact(const SiteSet& y, const DualKernel& kernel, int truncation,
                             std::size_t state_budget, TransitionCache* cache) {
    MeasureEstimate est;
    est.method = MeasureEstimate::Method::ExactTruncated;
    if (y.empty()) {
        est.value = 1.0;
        return est;
    }
    const double D = kernel.D();

    // The union of the per-site branch sets is empty only when every site
    // draws the empty branch, so one absorption step has probability
    // pi(empty)^|Y|. Without an empty branch the chain can never reach the
    // empty set and the absorption probability is exactly zero.
    const auto& branches = kernel.branches();
    const double pi_empty =
        (!branches.empty() && branches.front().mask == 0) ? branches.front().prob : 0.0;
    if (pi_empty == 0.0) return est;

    TransitionCache local;
    TransitionCache& tc = cache ? *cache : local;

    using Dist = std::unordered_map<std::uint32_t, double>;
    Dist dist{{tc.intern(canonical_shape(y)), 1.0}};
    double value = 0.0;
    double pruned = 0.0;
    double residual = 0.0;
    for (int step = 1; step <= truncation && !dist.empty(); ++step) {
        if (step == truncation) {
            // final step: only the absorption mass matters, no successor fold
            for (const auto& [id, q] : dist) {
                const double alive_mass = q * pow_int(D, tc.sites(id));
                const double absorb = pow_int(pi_empty, tc.sites(id));
                value += alive_mass * absorb;
                residual += alive_mass * (1.0 - absorb);
            }
            dist.clear();
            break;
        }
        Dist next;
        for (const auto& [id, q] : dist) {
            const double alive_mass = q * pow_int(D, tc.sites(id));
            if (alive_mass == 0.0) continue;
            const auto& tr = tc.expand(id, kernel);
            value += alive_mass * tr.absorb;
            for (const auto& [nid, w] : tr.next) next[nid] += alive_mass * w;
        }
        for (auto it = next.begin(); it != next.end();) {
            if (it->second < kPruneThreshold) {
                pruned += it->second;
                it = next.erase(it);
            } else {
                ++it;
            }
        }
        if (next.size() > state_budget)
            throw ResourceError("exact DP exceeded the state budget of " +
                                std::to_string(state_budget) + " states; use Monte Carlo");
        dist = std::move(next);
    }

    for (const auto& [id, q] : dist) residual += q;
    const double tail_bound = pow_int(D, static_cast<std::size_t>(truncation) + 1) / (1.0 - D);
    est.value = value;
    est.det_error = pruned + std::min(residual, tail_bound);
    return est;
}

namespace {

struct McCounts {
    std::uint64_t success = 0;
    std::uint64_t aborted = 0;
};

McCounts run_replicas(const SiteSet& y, const DualKernel& kernel, std::uint64_t seed,
                      std::uint64_t first, std::uint64_t last) {
    McCounts c;
    for (std::uint64_t rep = first; rep < last; ++rep) {
        CounterRng rng(seed, rep);
        DualState st = DualState::alive(y);
        std::uint64_t steps = 0;
        while (!st.absorbed()) {
            if (++steps > kMcStepCap) {
                ++c.aborted;
                break;
            }
            st = step_extended(st, kernel, rng);
        }
        if (!st.sink && st.sites.empty()) ++c.success;
    }
    return c;
}

}  // namespace

McResult mu_hat_mc(const SiteSet& y, const DualKernel& kernel, std::uint64_t replicas,
                   std::uint64_t seed, int threads) {
    if (replicas < 1) throw ConfigError("mu_hat_mc needs at least one replica");
    McCounts total;
    if (threads <= 1) {
        total = run_replicas(y, kernel, seed, 0, replicas);
    } else {
        std::vector<McCounts> parts(static_cast<std::size_t>(threads));
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (replicas + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::uint64_t lo = chunk * static_cast<std::uint64_t>(t);
            const std::uint64_t hi = std::min(replicas, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, t, lo, hi] {
                parts[static_cast<std::size_t>(t)] = run_replicas(y, kernel, seed, lo, hi);
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& p : parts) {
            total.success += p.success;
            total.aborted += p.aborted;
        }
    }
    McResult res;
    res.aborted = total.aborted;
    const double v = static_cast<double>(total.success) / static_cast<double>(replicas);
    res.estimate.value = v;
    res.estimate.stat_error = 3.0 * std::sqrt(v * (1.0 - v) / static_cast<double>(replicas));
    res.estimate.method = MeasureEstimate::Method::MonteCarlo;
    return res;
}

std::optional<Degenerate> closed_form_measure(const TransitionTable& table) {
    table.validate();
    if (table.p[0] == 0.0) return Degenerate::Delta0;  // lambda(empty) = p(empty)
    if (table.p[0] == 1.0) return Degenerate::Delta1;
    return std::nullopt;
}

MeasureEstimate degenerate_mu_hat(Degenerate which, const SiteSet& y) {
    MeasureEstimate est;
    est.method = MeasureEstimate::Method::ClosedForm;
    est.value = (which == Degenerate::Delta1) ? 1.0 : (y.empty() ? 1.0 : 0.0);
    return est;
}

}  // namespace pca
