#include "pca/neighborhood.hpp"

#include <string>

#include "pca/errors.hpp"

namespace pca {

Neighborhood Neighborhood::build(int radius, int dimension) {
    if (radius < 1) throw ConfigError("neighborhood radius must be >= 1");
    if (dimension < 1 || dimension > 3)
        throw ConfigError("neighborhood dimension must be in {1,2,3}");
    long long n = 1;
    const long long side = 2LL * radius + 1;
    for (int k = 0; k < dimension; ++k) {
        n *= side;
        if (n > kMaxBits)
            throw ConfigError("neighborhood size (2r+1)^d = " + std::to_string(side) + "^" +
                              std::to_string(dimension) + " exceeds the cap of " +
                              std::to_string(kMaxBits) + " sites");
    }
    Neighborhood nb;
    nb.radius_ = radius;
    nb.dimension_ = dimension;
    nb.offsets_.reserve(static_cast<std::size_t>(n));
    // lexicographic on (i_1,...,i_d)
    std::vector<int> idx(dimension, -radius);
    while (true) {
        Coord c{0, 0, 0};
        for (int k = 0; k < dimension; ++k) c[k] = idx[k];
        nb.offsets_.push_back(c);
        int k = dimension - 1;
        while (k >= 0 && idx[k] == radius) idx[k--] = -radius;
        if (k < 0) break;
        ++idx[k];
    }
    return nb;
}

std::optional<int> Neighborhood::index_of(const Coord& c) const {
    const int side = 2 * radius_ + 1;
    long long idx = 0;
    for (int k = 0; k < dimension_; ++k) {
        if (c[k] < -radius_ || c[k] > radius_) return std::nullopt;
        idx = idx * side + (c[k] + radius_);
    }
    for (int k = dimension_; k < 3; ++k)
        if (c[k] != 0) return std::nullopt;
    return static_cast<int>(idx);
}

std::vector<Coord> Neighborhood::mask_offsets(std::uint64_t mask) const {
    std::vector<Coord> out;
    for (int i = 0; i < size(); ++i)
        if (mask >> i & 1) out.push_back(offsets_[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace pca
