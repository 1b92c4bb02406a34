#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "roadbench/core.hpp"
#include "roadbench/dijkstra.hpp"
#include "roadbench/graph.hpp"
#include "roadbench/morton.hpp"
#include "roadbench/parallel.hpp"

namespace roadbench {

// ---------------------------------------------------------------------------
// First-hop partitions compressed to Z-order intervals, one map per source.
// Looking up which region of a source's map contains the target yields the
// first edge of the shortest path; iterating the lookup walks the whole path.
// ---------------------------------------------------------------------------

// First hop of the canonical shortest path source->u for every u (kNoVertex
// at the source itself and at unreachable vertices).
inline std::vector<Vertex> first_hop_partition(const RoadNetwork& net, Vertex source,
                                               DijkstraWorkspace* ws = nullptr) {
    std::vector<Vertex> hops;
    if (ws) {
        compute_first_hops(net, source, *ws, hops);
    } else {
        DijkstraWorkspace local;
        compute_first_hops(net, source, local, hops);
    }
    return hops;
}

struct Interval {
    MortonCode lo = 0;
    MortonCode hi = 0;
    Vertex color = kNoVertex;  // first hop; kNoVertex marks unreachable area

    bool operator==(const Interval&) const = default;
};

struct ColoredIntervalMap {
    Vertex source = kNoVertex;
    std::vector<Interval> intervals;                    // sorted by lo, disjoint
    std::vector<std::pair<Vertex, Vertex>> exceptions;  // (vertex, hop), sorted by vertex

    // First hop for target t with code tc; throws if the map has a hole,
    // which would mean the build postcondition was violated.
    Vertex lookup(Vertex t, MortonCode tc) const {
        auto ex = std::lower_bound(exceptions.begin(), exceptions.end(), t,
                                   [](const auto& e, Vertex v) { return e.first < v; });
        if (ex != exceptions.end() && ex->first == t) return ex->second;
        auto it = std::lower_bound(intervals.begin(), intervals.end(), tc,
                                   [](const Interval& iv, MortonCode c) { return iv.hi < c; });
        if (it == intervals.end() || it->lo > tc)
            throw data_error("first-hop map does not cover the target vertex");
        return it->color;
    }
};

namespace silc_detail {

// Recursive quadtree over the quantized plane. `order` holds all vertices
// sorted by code; a square whose vertices (ignoring the source) agree on one
// first hop becomes a single interval, a mixed single-code square spills its
// vertices into the exception list, and everything else subdivides.
inline void emit_squares(const std::vector<Vertex>& order, const std::vector<MortonCode>& codes,
                         const std::vector<Vertex>& hops, Vertex source, std::size_t first,
                         std::size_t last, std::uint64_t base, std::uint64_t size,
                         ColoredIntervalMap& out) {
    Vertex color = kNoVertex;
    bool any = false, mixed = false;
    for (std::size_t i = first; i < last && !mixed; ++i) {
        Vertex v = order[i];
        if (v == source) continue;
        if (!any) {
            any = true;
            color = hops[v];
        } else if (hops[v] != color) {
            mixed = true;
        }
    }
    if (!any) return;  // nothing to cover here
    if (!mixed) {
        out.intervals.push_back({static_cast<MortonCode>(base),
                                 static_cast<MortonCode>(base + size - 1), color});
        return;
    }
    if (size == 1) {  // distinct-color vertices collapsed onto one quantized point
        for (std::size_t i = first; i < last; ++i)
            if (order[i] != source) out.exceptions.emplace_back(order[i], hops[order[i]]);
        return;
    }
    std::uint64_t quarter = size / 4;
    std::size_t lo = first;
    for (int child = 0; child < 4; ++child) {
        std::uint64_t child_end = base + quarter * (child + 1);
        std::size_t hi = lo;
        while (hi < last && codes[order[hi]] < child_end) ++hi;  // slices are tiny once mixed
        emit_squares(order, codes, hops, source, lo, hi, child_end - quarter, quarter, out);
        lo = hi;
    }
}

inline void merge_adjacent(std::vector<Interval>& intervals) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (out > 0 && intervals[out - 1].color == intervals[i].color &&
            intervals[out - 1].hi + 1 == intervals[i].lo) {
            intervals[out - 1].hi = intervals[i].hi;
        } else {
            intervals[out++] = intervals[i];
        }
    }
    intervals.resize(out);
}

}  // namespace silc_detail

// Compresses one source's first-hop partition into a colored interval map.
// `order` lists all vertices sorted by (code, id); it is shared across
// sources since quantization does not depend on the source.
inline ColoredIntervalMap build_interval_map(const std::vector<Vertex>& hops, Vertex source,
                                             const Quantization& quant,
                                             const std::vector<MortonCode>& codes,
                                             const std::vector<Vertex>& order) {
    ColoredIntervalMap map;
    map.source = source;
    silc_detail::emit_squares(order, codes, hops, source, 0, order.size(), 0, quant.code_count(),
                              map);
    silc_detail::merge_adjacent(map.intervals);
    std::sort(map.exceptions.begin(), map.exceptions.end());
    return map;
}

struct SILCIndex {
    Quantization quant;
    std::vector<MortonCode> codes;         // per vertex
    std::vector<ColoredIntervalMap> maps;  // per source

    std::size_t total_intervals() const {
        std::size_t n = 0;
        for (const auto& m : maps) n += m.intervals.size();
        return n;
    }
    std::size_t total_exceptions() const {
        std::size_t n = 0;
        for (const auto& m : maps) n += m.exceptions.size();
        return n;
    }
};

struct SILCBuildStats {
    std::size_t intervals = 0;
    std::size_t exceptions = 0;
};

inline SILCIndex build_silc(const RoadNetwork& net, std::uint32_t bits = 16, unsigned threads = 1,
                            SILCBuildStats* stats = nullptr) {
    SILCIndex idx;
    idx.quant = make_quantization(net, bits);
    idx.codes.resize(net.n());
    for (Vertex v = 0; v < net.n(); ++v) idx.codes[v] = idx.quant.code_of(net.coord(v));

    std::vector<Vertex> order(net.n());
    for (Vertex v = 0; v < net.n(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
        return idx.codes[a] != idx.codes[b] ? idx.codes[a] < idx.codes[b] : a < b;
    });

    idx.maps.resize(net.n());
    std::vector<DijkstraWorkspace> ws(std::max(1u, threads));
    std::vector<std::vector<Vertex>> hops(std::max(1u, threads));
    detail::parallel_for(net.n(), threads, [&](std::uint32_t v, unsigned w) {
        compute_first_hops(net, v, ws[w], hops[w]);
        idx.maps[v] = build_interval_map(hops[w], v, idx.quant, idx.codes, order);
    });

    if (stats) {
        stats->intervals = idx.total_intervals();
        stats->exceptions = idx.total_exceptions();
    }
    return idx;
}

// First hop of the shortest path s->t; kNoVertex when t is unreachable.
inline Vertex lookup_first_hop(const SILCIndex& idx, Vertex s, Vertex t) {
    return idx.maps[s].lookup(t, idx.codes[t]);
}

// Walks the path one first-hop lookup at a time. There is no shortcut to the
// distance: it is the length of the reconstructed path.
inline Path silc_path(const SILCIndex& idx, const RoadNetwork& net, Vertex s, Vertex t) {
    if (s == t) return {{s}, 0};
    Path p;
    p.vertices.push_back(s);
    Vertex cur = s;
    while (cur != t) {
        Vertex h = lookup_first_hop(idx, cur, t);
        if (h == kNoVertex) return {};  // unreachable
        Weight w = 0;
        bool adjacent = false;
        for (const Arc& a : net.neighbors(cur))
            if (a.to == h && (!adjacent || a.w < w)) {
                w = a.w;
                adjacent = true;
            }
        if (!adjacent) throw data_error("stored first hop is not a neighbor of its source");
        p.vertices.push_back(h);
        p.length += w;
        cur = h;
        if (p.vertices.size() > net.n())
            throw data_error("first-hop chain revisited a vertex; index is inconsistent");
    }
    return p;
}

inline Dist silc_distance(const SILCIndex& idx, const RoadNetwork& net, Vertex s, Vertex t) {
    Path p = silc_path(idx, net, s, t);
    return p.empty() && s != t ? kInfDist : p.length;
}

}  // namespace roadbench
