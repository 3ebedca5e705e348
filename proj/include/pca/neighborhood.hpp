#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pca/site.hpp"

namespace pca {

// The cube of offsets {-r..r}^d, listed in strict lexicographic order.
// Subsets of the neighborhood are bitmasks over this offset order, so the
// encoding is stable across runs and across the file format.
class Neighborhood {
  public:
    static constexpr int kMaxBits = 63;    // sparse-lambda workflows
    static constexpr int kMaxDense = 20;   // dense transition tables

    static Neighborhood build(int radius, int dimension);

    int radius() const { return radius_; }
    int dimension() const { return dimension_; }
    int size() const { return static_cast<int>(offsets_.size()); }
    const std::vector<Coord>& offsets() const { return offsets_; }
    const Coord& offset(int i) const { return offsets_[i]; }

    std::optional<int> index_of(const Coord& c) const;

    std::uint64_t full_mask() const {
        return size() == 64 ? ~0ULL : (1ULL << size()) - 1;
    }

    // Offsets selected by a subset bitmask, in offset order.
    std::vector<Coord> mask_offsets(std::uint64_t mask) const;

    bool operator==(const Neighborhood& o) const {
        return radius_ == o.radius_ && dimension_ == o.dimension_;
    }

  private:
    int radius_ = 0;
    int dimension_ = 0;
    std::vector<Coord> offsets_;
};

}  // namespace pca
