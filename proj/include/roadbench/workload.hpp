#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "roadbench/core.hpp"
#include "roadbench/dijkstra.hpp"
#include "roadbench/graph.hpp"
#include "roadbench/parallel.hpp"
#include "roadbench/rng.hpp"

namespace roadbench {

// ---------------------------------------------------------------------------
// Benchmark query sets: ten buckets by straight-line (L-inf) distance over a
// 1024x1024 grid, ten by network distance relative to an estimated diameter,
// plus the detour-redundancy measurement used to characterize a network.
// ---------------------------------------------------------------------------

struct QuerySet {
    std::string label;  // Q1..Q10 or R1..R10
    std::uint64_t seed = 0;
    double lo = 0, hi = 0;  // bucket bounds, [lo, hi)
    std::size_t requested = 0;
    std::vector<std::pair<Vertex, Vertex>> pairs;  // dense vertex ids

    bool complete() const { return pairs.size() == requested; }
};

struct DeltaRow {
    Vertex s = kNoVertex, t = kNoVertex;
    Dist len_p = 0;
    Dist len_pprime = kInfDist;  // kInfDist: no route survives removal

    bool has_alternative() const { return len_pprime != kInfDist; }
    double ratio() const {
        return static_cast<double>(len_pprime) / static_cast<double>(len_p);
    }
};

struct RedundancyReport {
    std::vector<DeltaRow> rows;
    double min_ratio = 0;  // over rows with an alternative; 0 if none had one
    std::size_t no_path = 0;
};

namespace workload_detail {

constexpr std::size_t kAttemptFactor = 1000;  // attempt cap = factor * count

inline std::int64_t linf(const Coord& a, const Coord& b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

// bucket i (1-based) holds metric values in [span * 2^(i-11), span * 2^(i-10));
// scaled to integers so membership is exact
inline bool in_bucket(std::uint64_t metric_x1024, std::uint64_t span, unsigned i) {
    unsigned __int128 m = static_cast<unsigned __int128>(metric_x1024) << 1;
    unsigned __int128 lo = static_cast<unsigned __int128>(span) << i;
    return lo <= m && m < lo << 1;
}

// farthest settled vertex (first settled among equal distances)
inline std::pair<Vertex, Dist> farthest(const DijkstraWorkspace& ws) {
    Vertex best = kNoVertex;
    Dist best_d = 0;
    for (Vertex v : ws.settle_order)
        if (best == kNoVertex || ws.dist(v) > best_d) {
            best = v;
            best_d = ws.dist(v);
        }
    return {best, best_d};
}

}  // namespace workload_detail

// Estimated maximum network distance: repeated "jump to the farthest vertex"
// sweeps. Exact on paths and trees; a firm lower bound elsewhere.
inline Dist estimate_diameter(const RoadNetwork& net, std::uint64_t seed, unsigned sweeps = 4) {
    if (net.n() == 0) return 0;
    auto rng = substream(seed, 0);
    auto start = static_cast<Vertex>(rng.next_below(net.n()));
    DijkstraWorkspace ws;
    Dist best = 0;
    for (unsigned k = 0; k < sweeps; ++k) {
        run_sssp(net, start, ws);
        auto [v, d] = workload_detail::farthest(ws);
        best = std::max(best, d);
        if (v == kNoVertex || v == start) break;
        start = v;
    }
    return best;
}

// Ten query sets bucketed by the L-inf distance between endpoint coordinates,
// relative to the cell side of a 1024x1024 grid over the bounding box (the
// longer side of the box divided by 1024). Deterministic in (net, count,
// seed); a bucket that cannot be filled within the attempt cap stays partial.
inline std::array<QuerySet, 10> gen_linf_sets(const RoadNetwork& net, std::size_t count,
                                              std::uint64_t seed) {
    using namespace workload_detail;
    if (!net.has_coords()) throw data_error("straight-line query sets require coordinates");
    auto span = static_cast<std::uint64_t>(net.bbox().longer_span());

    std::array<QuerySet, 10> sets;
    for (unsigned i = 1; i <= 10; ++i) {
        QuerySet& qs = sets[i - 1];
        qs.label = "Q" + std::to_string(i);
        qs.seed = seed;
        qs.lo = std::ldexp(static_cast<double>(span), static_cast<int>(i) - 11);
        qs.hi = std::ldexp(static_cast<double>(span), static_cast<int>(i) - 10);
        qs.requested = count;
        if (span == 0) continue;

        auto rng = substream(seed, i);
        std::size_t cap = kAttemptFactor * count;
        for (std::size_t a = 0; a < cap && qs.pairs.size() < count; ++a) {
            auto s = static_cast<Vertex>(rng.next_below(net.n()));
            auto t = static_cast<Vertex>(rng.next_below(net.n()));
            if (s == t) continue;
            auto d = static_cast<std::uint64_t>(linf(net.coord(s), net.coord(t)));
            if (in_bucket(d * 1024, span, i)) qs.pairs.emplace_back(s, t);
        }
    }
    return sets;
}

// Ten query sets bucketed by exact network distance in [l_d * 2^(i-11),
// l_d * 2^(i-10)) where l_d is the diameter estimate. One search per sampled
// source serves all buckets; each source contributes at most one pair per
// bucket, chosen from its own substream, and sources are consumed in draw
// order, so output is byte-identical at any worker count.
inline std::array<QuerySet, 10> gen_network_sets(const RoadNetwork& net, std::size_t count,
                                                 std::uint64_t seed, unsigned threads = 1) {
    using namespace workload_detail;
    Dist ld = estimate_diameter(net, seed);

    std::array<QuerySet, 10> sets;
    for (unsigned i = 1; i <= 10; ++i) {
        sets[i - 1].label = "R" + std::to_string(i);
        sets[i - 1].seed = seed;
        sets[i - 1].lo = std::ldexp(static_cast<double>(ld), static_cast<int>(i) - 11);
        sets[i - 1].hi = std::ldexp(static_cast<double>(ld), static_cast<int>(i) - 10);
        sets[i - 1].requested = count;
    }
    if (ld == 0 || count == 0) return sets;

    auto unfilled = [&] {
        for (const QuerySet& qs : sets)
            if (qs.pairs.size() < count) return true;
        return false;
    };

    struct WorkerState {
        DijkstraWorkspace ws;
        std::vector<Vertex> bucket_scratch[10];
    };
    unsigned worker_count = std::max(1u, threads);
    std::vector<WorkerState> workers(worker_count);

    auto source_rng = substream(seed, 1);
    std::size_t cap = kAttemptFactor * count, drawn = 0;
    std::uint32_t chunk = std::max<std::uint32_t>(32, 8 * worker_count);
    std::vector<Vertex> sources;
    std::vector<std::array<Vertex, 10>> picks;
    while (drawn < cap && unfilled()) {
        auto m = static_cast<std::uint32_t>(std::min<std::size_t>(chunk, cap - drawn));
        drawn += m;
        sources.resize(m);
        for (auto& s : sources) s = static_cast<Vertex>(source_rng.next_below(net.n()));
        picks.assign(m, {});

        detail::parallel_for(m, threads, [&](std::uint32_t j, unsigned w) {
            WorkerState& st = workers[w];
            Vertex s = sources[j];
            run_sssp(net, s, st.ws);
            for (auto& b : st.bucket_scratch) b.clear();
            for (Vertex t : st.ws.settle_order) {
                if (t == s) continue;
                for (unsigned i = 1; i <= 10; ++i)
                    if (in_bucket(st.ws.dist(t) * 1024, ld, i)) {
                        st.bucket_scratch[i - 1].push_back(t);
                        break;
                    }
            }
            auto pick_rng = substream(seed, 2 + s);
            for (unsigned i = 0; i < 10; ++i) {
                const auto& c = st.bucket_scratch[i];
                picks[j][i] = c.empty() ? kNoVertex
                                        : c[pick_rng.next_below(c.size())];
            }
        });

        for (std::uint32_t j = 0; j < m; ++j)
            for (unsigned i = 0; i < 10; ++i)
                if (picks[j][i] != kNoVertex && sets[i].pairs.size() < count)
                    sets[i].pairs.emplace_back(sources[j], picks[j][i]);
    }
    return sets;
}

// Detour redundancy: for each pair, P is the canonical shortest path and P'
// the shortest path once P's interior vertices are removed (endpoints stay —
// every s-t route must use them). Ratios are >= 1 by optimality of P.
inline RedundancyReport measure_delta(const RoadNetwork& net,
                                      const std::vector<std::pair<Vertex, Vertex>>& pairs,
                                      unsigned threads = 1) {
    RedundancyReport rep;
    rep.rows.assign(pairs.size(), {});

    struct WorkerState {
        DijkstraWorkspace ws;
        std::vector<char> blocked;
    };
    unsigned worker_count = std::max(1u, threads);
    std::vector<WorkerState> workers(worker_count);

    detail::parallel_for(static_cast<std::uint32_t>(pairs.size()), threads,
                         [&](std::uint32_t idx, unsigned w) {
                             WorkerState& st = workers[w];
                             auto [s, t] = pairs[idx];
                             DeltaRow& row = rep.rows[idx];
                             row.s = s;
                             row.t = t;
                             auto at_t = [t](Vertex v, Dist) { return v == t; };
                             run_sssp(net, s, st.ws, at_t);
                             if (!st.ws.settled(t)) {
                                 row.len_p = kInfDist;  // pair itself unreachable
                                 return;
                             }
                             canonicalize_parents(net, s, st.ws);
                             Path p = canonical_path(st.ws, t);
                             row.len_p = p.length;

                             st.blocked.assign(net.n(), 0);
                             for (std::size_t k = 1; k + 1 < p.vertices.size(); ++k)
                                 st.blocked[p.vertices[k]] = 1;
                             auto allow = [&st](Vertex v) { return !st.blocked[v]; };
                             run_sssp(net, s, st.ws, at_t, allow);
                             row.len_pprime = st.ws.settled(t) ? st.ws.dist(t) : kInfDist;
                         });

    bool any = false;
    for (const DeltaRow& row : rep.rows) {
        if (row.len_p == kInfDist) continue;  // unreachable input pair
        if (!row.has_alternative()) {
            ++rep.no_path;
            continue;
        }
        if (!any || row.ratio() < rep.min_ratio) {
            rep.min_ratio = row.ratio();
            any = true;
        }
    }
    return rep;
}

// --- query-set file format -------------------------------------------------
// header line:  # queryset <label> <seed> <lo> <hi>
// then one `s t` per line, in the graph's original (input-file) vertex ids

inline std::string format_query_set(const QuerySet& qs, const RoadNetwork& net) {
    char head[160];
    std::snprintf(head, sizeof head, "# queryset %s %llu %.17g %.17g\n", qs.label.c_str(),
                  static_cast<unsigned long long>(qs.seed), qs.lo, qs.hi);
    std::string out = head;
    char line[64];
    for (auto [s, t] : qs.pairs) {
        std::snprintf(line, sizeof line, "%u %u\n", net.original_id(s), net.original_id(t));
        out += line;
    }
    return out;
}

inline QuerySet parse_query_set(std::istream& in, const RoadNetwork& net) {
    QuerySet qs;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            char label[64];
            unsigned long long seed = 0;
            double lo = 0, hi = 0;
            if (std::sscanf(line.c_str(), "# queryset %63s %llu %lg %lg", label, &seed, &lo,
                            &hi) != 4)
                throw parse_error(lineno, "malformed query-set header");
            qs.label = label;
            qs.seed = seed;
            qs.lo = lo;
            qs.hi = hi;
            have_header = true;
            continue;
        }
        unsigned long su = 0, tu = 0;
        if (std::sscanf(line.c_str(), "%lu %lu", &su, &tu) != 2)
            throw parse_error(lineno, "expected two vertex ids");
        Vertex s = net.dense_id(static_cast<std::uint32_t>(su));
        Vertex t = net.dense_id(static_cast<std::uint32_t>(tu));
        if (s == kNoVertex || t == kNoVertex)
            throw parse_error(lineno, "query vertex not present in the graph");
        qs.pairs.emplace_back(s, t);
    }
    if (!have_header) throw parse_error(lineno, "missing query-set header");
    qs.requested = qs.pairs.size();
    return qs;
}

}  // namespace roadbench
