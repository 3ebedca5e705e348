#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pca/cylinder.hpp"
#include "pca/model.hpp"

namespace pca {

// Periodic lattice {0..L-1}^d, d in {1,2}, one bit per site.
class Torus {
  public:
    Torus(int dim, std::int64_t side);

    int dim() const { return dim_; }
    std::int64_t side() const { return side_; }
    std::int64_t sites() const { return n_sites_; }

    bool get(std::int64_t idx) const { return bits_[idx >> 6] >> (idx & 63) & 1; }
    void set(std::int64_t idx, bool v) {
        const std::uint64_t bit = 1ULL << (idx & 63);
        if (v)
            bits_[idx >> 6] |= bit;
        else
            bits_[idx >> 6] &= ~bit;
    }

    std::int64_t wrap(std::int64_t x) const {
        x %= side_;
        return x < 0 ? x + side_ : x;
    }
    std::int64_t index(std::int64_t x, std::int64_t y = 0) const {
        return wrap(x) + (dim_ == 2 ? wrap(y) * side_ : 0);
    }

    void fill_bernoulli(double p, std::uint64_t seed);
    const std::vector<std::uint64_t>& words() const { return bits_; }
    bool operator==(const Torus& o) const {
        return dim_ == o.dim_ && side_ == o.side_ && bits_ == o.bits_;
    }

  private:
    int dim_;
    std::int64_t side_;
    std::int64_t n_sites_;
    std::vector<std::uint64_t> bits_;
};

// One synchronous update. The uniform for site i at step t is addressed by
// counter t*n+i on the stream keyed by seed, so the result is independent
// of traversal order.
void step_pca(Torus& torus, const TransitionTable& table, std::uint64_t seed,
              std::uint64_t step_index);

struct FrequencyEstimate {
    double value = 0.0;
    double stat_error = 0.0;  // 1-sigma standard error from batch means
    std::int64_t burn_in = 0;
    std::int64_t samples = 0;
    std::int64_t side = 0;
};

std::int64_t default_burn_in(double D);

// Space-time average of the pattern indicator over all translates after
// burn-in, one measurement every `thin` steps; 20-batch error bars.
// If raster is non-null and dim==1, sampled rows are appended to it.
FrequencyEstimate estimate_frequency(const TransitionTable& table, const Pattern& pattern,
                                     std::int64_t side, std::int64_t burn_in,
                                     std::int64_t samples, std::int64_t thin, std::uint64_t seed,
                                     std::vector<std::vector<bool>>* raster = nullptr);

// P4 (binary) PBM; rows[i] is one scanline.
void write_pbm(const std::string& path, const std::vector<std::vector<bool>>& rows);

}  // namespace pca
