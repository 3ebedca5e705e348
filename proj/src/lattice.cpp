#include "pca/lattice.hpp"

#include <cmath>
#include <fstream>

#include "pca/rng.hpp"

namespace pca {

Torus::Torus(int dim, std::int64_t side) : dim_(dim), side_(side) {
    if (dim != 1 && dim != 2) throw ConfigError("torus dimension must be 1 or 2");
    if (side < 1) throw ConfigError("torus side must be positive");
    n_sites_ = dim == 2 ? side * side : side;
    bits_.assign(static_cast<std::size_t>((n_sites_ + 63) / 64), 0);
}

void Torus::fill_bernoulli(double p, std::uint64_t seed) {
    const std::uint64_t key = stream_key(seed, /*stream=*/~0ULL);
    for (std::int64_t i = 0; i < n_sites_; ++i)
        set(i, unit_at(key, static_cast<std::uint64_t>(i)) < p);
}

void step_pca(Torus& torus, const TransitionTable& table, std::uint64_t seed,
              std::uint64_t step_index) {
    table.validate();
    const Neighborhood& nb = table.nb;
    if (nb.dimension() != torus.dim())
        throw ConfigError("model dimension does not match torus dimension");
    const std::uint64_t key = stream_key(seed, 0);
    const std::uint64_t base = step_index * static_cast<std::uint64_t>(torus.sites());
    const std::int64_t L = torus.side();

    Torus next = torus;
    if (torus.dim() == 1) {
        for (std::int64_t z = 0; z < L; ++z) {
            std::uint32_t mask = 0;
            for (int k = 0; k < nb.size(); ++k)
                if (torus.get(torus.index(z + nb.offset(k)[0]))) mask |= 1u << k;
            next.set(z, unit_at(key, base + static_cast<std::uint64_t>(z)) < table.p[mask]);
        }
    } else {
        for (std::int64_t y = 0; y < L; ++y)
            for (std::int64_t x = 0; x < L; ++x) {
                std::uint32_t mask = 0;
                for (int k = 0; k < nb.size(); ++k) {
                    const Coord& off = nb.offset(k);
                    if (torus.get(torus.index(x + off[0], y + off[1]))) mask |= 1u << k;
                }
                const std::int64_t idx = torus.index(x, y);
                next.set(idx, unit_at(key, base + static_cast<std::uint64_t>(idx)) < table.p[mask]);
            }
    }
    torus = std::move(next);
}

std::int64_t default_burn_in(double D) {
    if (!(D < 1.0)) throw ConfigError("default burn-in needs D < 1; pass --burnin explicitly");
    if (D <= 0.0) return 1;
    return static_cast<std::int64_t>(std::ceil(10.0 / std::log(1.0 / D)));
}

namespace {

std::int64_t count_matches(const Torus& torus, const Pattern& pattern) {
    const std::int64_t L = torus.side();
    std::int64_t count = 0;
    if (torus.dim() == 1) {
        for (std::int64_t z = 0; z < L; ++z) {
            bool ok = true;
            for (std::size_t i = 0; i < pattern.support.size() && ok; ++i)
                ok = torus.get(torus.index(z + pattern.support[i][0])) ==
                     static_cast<bool>(pattern.values[i]);
            count += ok;
        }
    } else {
        for (std::int64_t y = 0; y < L; ++y)
            for (std::int64_t x = 0; x < L; ++x) {
                bool ok = true;
                for (std::size_t i = 0; i < pattern.support.size() && ok; ++i)
                    ok = torus.get(torus.index(x + pattern.support[i][0],
                                               y + pattern.support[i][1])) ==
                         static_cast<bool>(pattern.values[i]);
                count += ok;
            }
    }
    return count;
}

std::int64_t pattern_extent(const Pattern& pattern) {
    std::int64_t ext = 0;
    for (int axis = 0; axis < pattern.dim; ++axis) {
        std::int32_t lo = pattern.support.front()[axis], hi = lo;
        for (const auto& z : pattern.support) {
            lo = std::min(lo, z[axis]);
            hi = std::max(hi, z[axis]);
        }
        ext = std::max<std::int64_t>(ext, hi - lo + 1);
    }
    return ext;
}

}  // namespace

FrequencyEstimate estimate_frequency(const TransitionTable& table, const Pattern& pattern,
                                     std::int64_t side, std::int64_t burn_in,
                                     std::int64_t samples, std::int64_t thin, std::uint64_t seed,
                                     std::vector<std::vector<bool>>* raster) {
    pattern.validate();
    if (pattern.dim != table.nb.dimension())
        throw ConfigError("pattern dimension does not match model dimension");
    constexpr std::int64_t kBatches = 20;
    if (burn_in < 0 || thin < 1) throw ConfigError("burn_in must be >= 0 and thin >= 1");
    if (samples < kBatches)
        throw ConfigError("need at least " + std::to_string(kBatches) + " samples");
    if (side < 4LL * table.nb.radius() + pattern_extent(pattern))
        throw ConfigError("torus side must be >= 4r + pattern extent = " +
                          std::to_string(4LL * table.nb.radius() + pattern_extent(pattern)));

    Torus torus(pattern.dim, side);
    torus.fill_bernoulli(0.5, seed);
    std::uint64_t step_index = 0;
    for (std::int64_t i = 0; i < burn_in; ++i) step_pca(torus, table, seed, step_index++);

    const double n_sites = static_cast<double>(torus.sites());
    std::vector<double> batch(static_cast<std::size_t>(kBatches), 0.0);
    std::vector<std::int64_t> batch_n(static_cast<std::size_t>(kBatches), 0);
    for (std::int64_t s = 0; s < samples; ++s) {
        for (std::int64_t i = 0; i < thin; ++i) step_pca(torus, table, seed, step_index++);
        const double frac = static_cast<double>(count_matches(torus, pattern)) / n_sites;
        const std::size_t b = static_cast<std::size_t>(s * kBatches / samples);
        batch[b] += frac;
        ++batch_n[b];
        if (raster && torus.dim() == 1) {
            std::vector<bool> row(static_cast<std::size_t>(side));
            for (std::int64_t z = 0; z < side; ++z) row[static_cast<std::size_t>(z)] = torus.get(z);
            raster->push_back(std::move(row));
        }
    }

    double mean = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        batch[b] /= static_cast<double>(batch_n[b]);
        mean += batch[b];
    }
    mean /= static_cast<double>(kBatches);
    double ss = 0.0;
    for (double b : batch) ss += (b - mean) * (b - mean);
    const double sd = std::sqrt(ss / static_cast<double>(kBatches - 1));

    FrequencyEstimate est;
    est.value = mean;
    est.stat_error = sd / std::sqrt(static_cast<double>(kBatches));
    est.burn_in = burn_in;
    est.samples = samples;
    est.side = side;
    return est;
}

void write_pbm(const std::string& path, const std::vector<std::vector<bool>>& rows) {
    if (rows.empty()) throw ConfigError("nothing to write to PBM");
    const std::size_t width = rows.front().size();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    out << "P4\n" << width << " " << rows.size() << "\n";
    for (const auto& row : rows) {
        std::vector<unsigned char> line((width + 7) / 8, 0);
        for (std::size_t i = 0; i < width; ++i)
            if (row[i]) line[i / 8] |= static_cast<unsigned char>(0x80u >> (i % 8));
        out.write(reinterpret_cast<const char*>(line.data()),
                  static_cast<std::streamsize>(line.size()));
    }
}

}  // namespace pca
