#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pca/model.hpp"
#include "pca/rng.hpp"
#include "pca/site.hpp"

namespace pca {

// A value with its error envelope. det_error is a deterministic truncation
// bound; stat_error is the half-width of a 3-sigma confidence interval.
struct MeasureEstimate {
    enum class Method { ExactTruncated, MonteCarlo, ClosedForm };

    double value = 0.0;
    double det_error = 0.0;
    double stat_error = 0.0;
    Method method = Method::ClosedForm;

    double combined_error() const { return det_error + stat_error; }
    double lower() const { return std::max(0.0, value - combined_error()); }
    double upper() const { return std::min(1.0, value + combined_error()); }
};

// Branching law of the dual chain: each site of the current set is replaced
// by the offset set J with probability pi(J) = lambda(J)/D, and the union of
// all replacements is the next state.
class DualKernel {
  public:
    struct Branch {
        std::uint64_t mask;
        double prob;
        std::vector<Coord> offsets;
    };

    const Neighborhood& nb() const { return nb_; }
    double D() const { return D_; }
    double lambda_empty() const { return lambda_empty_; }
    const std::vector<Branch>& branches() const { return branches_; }

    // inverse-CDF sample; consumes one uniform
    const Branch& sample(double u) const;

    friend DualKernel dual_kernel(const LambdaTable& lt);

  private:
    Neighborhood nb_;
    double D_ = 0.0;
    double lambda_empty_ = 0.0;
    std::vector<Branch> branches_;  // ascending mask order
    std::vector<double> cdf_;
};

// Raised when lambda(empty) in {0, p(empty)=1} or D = 0: measures come from
// closed_form_measure instead of the dual chain.
struct DegenerateModelError : Error {
    using Error::Error;
};

DualKernel dual_kernel(const TransitionTable& table);
DualKernel dual_kernel(const LambdaTable& lt);

struct DualState {
    bool sink = false;
    SiteSet sites;  // meaningful only when !sink

    static DualState alive(SiteSet s) { return {false, std::move(s)}; }
    static DualState make_sink() { return {true, {}}; }
    bool absorbed() const { return sink || sites.empty(); }
};

SiteSet step_dual(const SiteSet& state, const DualKernel& kernel, CounterRng& rng);
DualState step_extended(const DualState& state, const DualKernel& kernel, CounterRng& rng);

// Memoized one-step law of the dual chain. The kernel is translation
// invariant, so states are pooled by the shape of the site set shifted to
// the origin; shapes are interned to integer ids and transitions are reused
// across steps and starting sets. Not thread-safe; callers sharing a cache
// must serialize.
class TransitionCache {
  public:
    struct Transition {
        std::size_t sites = 0;  // |shape|, for the survival factor D^|shape|
        bool expanded = false;
        double absorb = 0.0;  // weight of branch unions equal to the empty set
        std::vector<std::pair<std::uint32_t, double>> next;  // shape id -> weight
    };

    std::uint32_t intern(const SiteSet& canonical_shape);
    std::size_t sites(std::uint32_t id) const { return transitions_[id].sites; }
    // May invalidate references returned by earlier calls.
    const Transition& expand(std::uint32_t id, const DualKernel& kernel);

  private:
    std::vector<SiteSet> shapes_;
    std::vector<Transition> transitions_;
    std::unordered_map<SiteSet, std::uint32_t, SiteSetHash> ids_;
};

// P(extended dual from Y is absorbed at the empty set within N steps),
// by exact forward dynamic programming over the state distribution.
MeasureEstimate mu_hat_exact(const SiteSet& y, const DualKernel& kernel, int truncation,
                             std::size_t state_budget = 10'000'000,
                             TransitionCache* cache = nullptr);

struct McResult {
    MeasureEstimate estimate;
    std::uint64_t aborted = 0;  // replicas that hit the step cap
};

McResult mu_hat_mc(const SiteSet& y, const DualKernel& kernel, std::uint64_t replicas,
                   std::uint64_t seed, int threads = 1);

enum class Degenerate { Delta0, Delta1 };

// Corollary-style degenerate invariant measures: delta_0 when lambda(empty)=0,
// delta_1 when p(empty)=1; nullopt otherwise.
std::optional<Degenerate> closed_form_measure(const TransitionTable& table);

// mu_hat under a degenerate point measure.
MeasureEstimate degenerate_mu_hat(Degenerate which, const SiteSet& y);

}  // namespace pca
