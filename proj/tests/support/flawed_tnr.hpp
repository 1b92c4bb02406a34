#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <vector>

#include "roadbench/tnr.hpp"

namespace roadbench::test {

// Regression-only reimplementation of a per-side access-node scan that looks
// plausible but is incomplete. For each side of the inner block it keeps a
// ring vertex only if that vertex lies on a best path from an in-cell vertex
// to one of THAT side's own far endpoints. A ring vertex whose only role is
// to relay traffic that never touches a far endpoint of its side (e.g. its
// sole outward neighbor IS the far destination) is silently dropped, so the
// resulting table can overestimate distances. Production code must never use
// this; tests pin the failure.
inline std::vector<Vertex> per_side_access_nodes(const RoadNetwork& net, const Grid& grid,
                                                 std::uint32_t cell, ShortestPathEngine& engine) {
    using namespace tnr_detail;
    auto buckets = cell_buckets(grid);
    const std::vector<Vertex>& members = buckets[cell];
    if (members.empty() || block_covers_grid(grid, cell, kOuterRadius)) return {};

    // 0=up 1=down 2=left 3=right, chosen by the outside endpoint's dominant
    // axis excess beyond the block; ties go to the vertical sides.
    auto side_of = [&](std::uint32_t c, std::uint32_t radius) {
        auto cx = static_cast<std::int64_t>(grid.cx(cell));
        auto cy = static_cast<std::int64_t>(grid.cy(cell));
        auto x = static_cast<std::int64_t>(grid.cx(c));
        auto y = static_cast<std::int64_t>(grid.cy(c));
        auto r = static_cast<std::int64_t>(radius);
        std::int64_t ex = 0, ey = 0;
        if (x < cx - r) ex = x - (cx - r);
        if (x > cx + r) ex = x - (cx + r);
        if (y < cy - r) ey = y - (cy - r);
        if (y > cy + r) ey = y - (cy + r);
        if (std::abs(ey) >= std::abs(ex)) return ey > 0 ? 0 : 1;
        return ex > 0 ? 3 : 2;
    };

    auto outside_endpoints_by_side = [&](std::uint32_t radius) {
        std::array<std::vector<Vertex>, 4> sides;
        for (Vertex u = 0; u < net.n(); ++u) {
            if (!in_block(grid, cell, grid.cell[u], radius)) continue;
            for (const Arc& a : net.neighbors(u))
                if (!in_block(grid, cell, grid.cell[a.to], radius))
                    sides[side_of(grid.cell[a.to], radius)].push_back(a.to);
        }
        for (auto& s : sides) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }
        return sides;
    };
    auto ring = outside_endpoints_by_side(kInnerRadius);
    auto far = outside_endpoints_by_side(kOuterRadius);

    std::vector<Vertex> marks;
    for (int side = 0; side < 4; ++side) {
        if (ring[side].empty()) continue;
        for (Vertex vi : members)
            for (Vertex vk : far[side]) {
                Vertex best = kNoVertex;
                Dist best_d = kInfDist;
                for (Vertex vj : ring[side]) {
                    Dist d = engine.distance(vi, vj) + engine.distance(vj, vk);
                    if (d < best_d) {
                        best_d = d;
                        best = vj;
                    }
                }
                if (best != kNoVertex && best_d < kInfDist) marks.push_back(best);
            }
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    return marks;
}

inline TNRIndex build_per_side_tnr(const RoadNetwork& net, const Grid& grid) {
    auto chi = std::make_shared<const CHIndex>(build_ch(net));
    auto buckets = tnr_detail::cell_buckets(grid);
    CHEngine engine(*chi);
    std::vector<AccessNodeSet> sets;
    for (std::uint32_t c = 0; c < grid.cell_count(); ++c) {
        if (buckets[c].empty()) continue;
        AccessNodeSet s;
        s.cell = c;
        s.members = buckets[c];
        s.nodes = per_side_access_nodes(net, grid, c, engine);
        s.dists.resize(s.members.size() * s.nodes.size());
        for (std::size_t mi = 0; mi < s.members.size(); ++mi)
            for (std::size_t ni = 0; ni < s.nodes.size(); ++ni)
                s.dists[mi * s.nodes.size() + ni] = engine.distance(s.members[mi], s.nodes[ni]);
        sets.push_back(std::move(s));
    }
    auto factory = [chi] { return std::make_unique<CHEngine>(*chi); };
    // No local-transit augmentation: this variant reproduces the uncorrected
    // behavior, overestimates included.
    return tnr_detail::assemble_tnr(net, grid, FallbackKind::ch, chi, sets, factory, 1, nullptr,
                                    false);
}

}  // namespace roadbench::test
