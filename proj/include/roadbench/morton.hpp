#pragma once

#include <cstdint>

#include "roadbench/core.hpp"
#include "roadbench/graph.hpp"

namespace roadbench {

// Z-order code: bits of the quantized x and y interleaved (x in the even
// positions). Any axis-aligned quadtree square of the quantized space is a
// contiguous code range, so per-square data can be stored as intervals.
using MortonCode = std::uint32_t;

namespace morton_detail {

inline std::uint32_t spread16(std::uint32_t v) {
    v &= 0xFFFFu;
    v = (v | (v << 8)) & 0x00FF00FFu;
    v = (v | (v << 4)) & 0x0F0F0F0Fu;
    v = (v | (v << 2)) & 0x33333333u;
    v = (v | (v << 1)) & 0x55555555u;
    return v;
}

inline std::uint32_t compact16(std::uint32_t v) {
    v &= 0x55555555u;
    v = (v | (v >> 1)) & 0x33333333u;
    v = (v | (v >> 2)) & 0x0F0F0F0Fu;
    v = (v | (v >> 4)) & 0x00FF00FFu;
    v = (v | (v >> 8)) & 0x0000FFFFu;
    return v;
}

}  // namespace morton_detail

inline MortonCode morton_encode(std::uint32_t x, std::uint32_t y) {
    return morton_detail::spread16(x) | (morton_detail::spread16(y) << 1);
}

inline std::uint32_t morton_x(MortonCode c) { return morton_detail::compact16(c); }
inline std::uint32_t morton_y(MortonCode c) { return morton_detail::compact16(c >> 1); }

// Affine map of the bounding box onto [0, 2^bits) per axis; the maximum
// coordinate clamps into the last cell like the coarse grid does. A zero
// span (all vertices on one line) collapses that axis to 0, which is fine
// here: coincident quantized points are handled by exception lists.
struct Quantization {
    BoundingBox box;
    std::uint32_t bits = 16;

    std::uint32_t cells_per_axis() const { return 1u << bits; }
    std::uint64_t code_count() const { return std::uint64_t{1} << (2 * bits); }

    std::uint32_t axis(std::int64_t v, std::int64_t lo, std::uint64_t span) const {
        if (span == 0) return 0;
        auto q = static_cast<std::uint64_t>(
            static_cast<unsigned __int128>(v - lo) * cells_per_axis() / span);
        return q >= cells_per_axis() ? cells_per_axis() - 1 : static_cast<std::uint32_t>(q);
    }
    std::uint32_t qx(const Coord& c) const { return axis(c.x, box.min_x, box.span_x()); }
    std::uint32_t qy(const Coord& c) const { return axis(c.y, box.min_y, box.span_y()); }
    MortonCode code_of(const Coord& c) const { return morton_encode(qx(c), qy(c)); }
};

inline Quantization make_quantization(const RoadNetwork& net, std::uint32_t bits = 16) {
    if (bits < 1 || bits > 16) throw data_error("quantization must use between 1 and 16 bits per axis");
    if (!net.has_coords()) throw data_error("spatial indexing requires vertex coordinates");
    Quantization q;
    q.box = net.bbox();
    q.bits = bits;
    return q;
}

}  // namespace roadbench
