#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "pca/dual.hpp"
#include "pca/site.hpp"

namespace pca {

// A finite 0/1 pattern on Z^d; the cylinder [U] is the set of configurations
// agreeing with it on its support.
struct Pattern {
    std::vector<Coord> support;       // sorted, distinct
    std::vector<std::uint8_t> values; // parallel to support
    int dim = 1;

    // d = 1 convenience form: bit string placed at a base position.
    static Pattern from_word(const std::string& bits, std::int64_t base);

    std::size_t cells() const { return support.size(); }
    std::size_t zeros() const;
    Pattern shifted_by(const Coord& s) const;
    void validate() const;
};

// Integer combination of H(., Y) functionals representing a cylinder
// indicator: 1_[U](x) = sum_i coeff_i * H(x, set_i).
struct CylinderCombination {
    struct Term {
        int coeff;
        SiteSet set;
    };
    std::vector<Term> terms;
    std::size_t extent = 0;  // number of cells of the pattern
    int dim = 1;

    double evaluate(const std::function<bool(const Coord&)>& config) const;
};

inline constexpr std::size_t kMaxZeroBits = 24;

// Product expansion: one term per subset S of the zero cells,
// set = ones u S, coefficient (-1)^|S|.
CylinderCombination decompose(const Pattern& pattern);

// mu_hat evaluator. Implementations memoize per instance; safe to call
// concurrently.
class MuHatProvider {
  public:
    virtual ~MuHatProvider() = default;
    virtual MeasureEstimate mu_hat(const SiteSet& y) = 0;
};

class ExactProvider final : public MuHatProvider {
  public:
    ExactProvider(DualKernel kernel, int truncation, std::size_t state_budget = 10'000'000)
        : kernel_(std::move(kernel)), truncation_(truncation), budget_(state_budget) {}
    MeasureEstimate mu_hat(const SiteSet& y) override;

  private:
    DualKernel kernel_;
    int truncation_;
    std::size_t budget_;
    TransitionCache transitions_;  // shared across queries, guarded by mutex_
    std::unordered_map<SiteSet, MeasureEstimate, SiteSetHash> cache_;
    std::mutex mutex_;
};

class McProvider final : public MuHatProvider {
  public:
    McProvider(DualKernel kernel, std::uint64_t replicas, std::uint64_t seed, int threads = 1)
        : kernel_(std::move(kernel)), replicas_(replicas), seed_(seed), threads_(threads) {}
    MeasureEstimate mu_hat(const SiteSet& y) override;
    std::uint64_t aborted() const { return aborted_; }

  private:
    DualKernel kernel_;
    std::uint64_t replicas_;
    std::uint64_t seed_;
    int threads_;
    std::uint64_t aborted_ = 0;
    std::unordered_map<SiteSet, MeasureEstimate, SiteSetHash> cache_;
    std::mutex mutex_;
};

// Product measure of a constant-p table: mu_hat(Y) = c^|Y|.
class ProductProvider final : public MuHatProvider {
  public:
    explicit ProductProvider(double c) : c_(c) {}
    MeasureEstimate mu_hat(const SiteSet& y) override;

  private:
    double c_;
};

class DegenerateProvider final : public MuHatProvider {
  public:
    explicit DegenerateProvider(Degenerate which) : which_(which) {}
    MeasureEstimate mu_hat(const SiteSet& y) override { return degenerate_mu_hat(which_, y); }

  private:
    Degenerate which_;
};

// mu(U) = sum_i coeff_i mu_hat(Y_i), with error accumulation. Distinct sets
// are evaluated once.
MeasureEstimate measure(const CylinderCombination& comb, MuHatProvider& provider);

// Combination for [U]_0 n sigma^-t [V]_0; requires t >= extent(U)+extent(V).
CylinderCombination couple(const CylinderCombination& comb_u, const CylinderCombination& comb_v,
                           std::int64_t t);

}  // namespace pca
