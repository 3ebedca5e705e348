#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

namespace pca {

// A lattice site in Z^d, d <= 3. Unused axes stay 0 so ordering and
// equality work uniformly for every dimension.
using Coord = std::array<std::int32_t, 3>;

inline Coord site1(std::int32_t x) { return {x, 0, 0}; }
inline Coord site2(std::int32_t x, std::int32_t y) { return {x, y, 0}; }

inline Coord operator+(const Coord& a, const Coord& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

// Finite subset of Z^d: sorted, deduplicated (canonical form).
using SiteSet = std::vector<Coord>;

inline void canonicalize(SiteSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline SiteSet make_set(std::initializer_list<std::int32_t> xs) {
    SiteSet s;
    for (auto x : xs) s.push_back(site1(x));
    canonicalize(s);
    return s;
}

inline SiteSet set_union(const SiteSet& a, const SiteSet& b) {
    SiteSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline SiteSet shifted(const SiteSet& s, const Coord& by) {
    SiteSet out;
    out.reserve(s.size());
    for (const auto& z : s) out.push_back(z + by);
    return out;  // shift preserves order
}

inline bool is_subset(const SiteSet& a, const SiteSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

struct SiteSetHash {
    std::size_t operator()(const SiteSet& s) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (const auto& z : s)
            for (auto c : z) {
                h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)) + 0x9e3779b97f4a7c15ULL +
                     (h << 6) + (h >> 2);
            }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace pca
