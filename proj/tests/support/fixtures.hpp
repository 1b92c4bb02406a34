#pragma once

// Shared hand-verified fixtures and oracle helpers for the test suite.

#include <cmath>
#include <vector>

#include "roadbench/dijkstra.hpp"
#include "roadbench/graph.hpp"
#include "roadbench/rng.hpp"

namespace roadbench::test {

// Canonical 8-vertex fixture. Vertices v1..v8 map to dense ids 0..7.
// Hand-verified facts frozen in the test suite: dist(v3,v7)=6 via
// v3-v1-v8-v6-v5-v7, dist(v1,v7)=5, dist(v8,v3)=2, dist(v8,v7)=4,
// max degree 3; identity-order contraction yields exactly the three
// shortcuts (v3,v8,2|v1), (v7,v6,2|v5), (v7,v8,4|v6).
inline const std::vector<RawArc>& fig1_edges() {
    static const std::vector<RawArc> e = {
        {0, 2, 1},  // v1-v3
        {0, 7, 1},  // v1-v8
        {1, 2, 1},  // v2-v3
        {1, 7, 2},  // v2-v8
        {3, 4, 1},  // v4-v5
        {3, 5, 1},  // v4-v6
        {4, 5, 1},  // v5-v6
        {4, 6, 1},  // v5-v7
        {5, 7, 2},  // v6-v8
    };
    return e;
}

inline RoadNetwork fig1() { return make_network(8, fig1_edges()); }

// Coordinates engineered so a 16x16 grid over [0,160]^2 gives:
// cell(v1)=(6,6) ("C1"), cell(v7)=(0,0) ("C2"); access sets A(C1)={v3,v8},
// A(C2)={v5}; (v1,v7) is distance-answerable and the access-table minimum
// equals the true distance 5.
inline std::vector<Coord> fig1_grid_coords() {
    return {{65, 65}, {160, 160}, {95, 65}, {45, 5}, {35, 5}, {45, 35}, {0, 0}, {65, 95}};
}

inline RoadNetwork fig1_with_grid_coords() {
    return make_network_with_coords(8, fig1_edges(), fig1_grid_coords());
}

// Coordinates separating {v1,v2,v3} (SW), {v4,v5} (NW), {v6,v7} (NE) and v8
// (SE) at quadtree depth 1, so the candidate (SW-quadrant, NE-quadrant) is
// path-coherent with witness vertex v8 and must be stored with psi == v8.
inline std::vector<Coord> fig1_pcp_coords() {
    return {{1000, 1000},   {2000, 1000},   {1500, 2000},   {1000, 50000},
            {2000, 50000},  {50000, 50000}, {50000, 60000}, {50000, 1000}};
}

inline RoadNetwork fig1_with_pcp_coords() {
    return make_network_with_coords(8, fig1_edges(), fig1_pcp_coords());
}

// Shell counterexample fixture: on a 16x16 grid over [0,160]^2, the central
// cell C0=(8,8) holds only v1; v5 sits on the inner-shell ring (cell (8,11))
// with neighbors v1 (inside C0) and v6 (beyond the outer shell). A per-side
// scan that only keeps ring vertices lying on best paths toward that side's
// own outer endpoints drops v5, and then overestimates dist(v1,v6):
//   true dist(v1,v6) = 20 (v1-v5-v6); flawed table minimum = 40 (via v4).
// The corrected access computation keeps A(C0) = {v2,v4,v5}.
struct ShellCounterexample {
    RoadNetwork net;
    // dense ids: v1..v9 -> 0..8
    static constexpr Vertex v1 = 0, v2 = 1, v3 = 2, v4 = 3, v5 = 4, v6 = 5, v7 = 6, v8 = 7,
                            v9 = 8;
};

inline ShellCounterexample shell_counterexample() {
    std::vector<RawArc> edges = {
        {0, 4, 10},   // v1-v5
        {4, 5, 10},   // v5-v6
        {0, 1, 50},   // v1-v2
        {1, 2, 50},   // v2-v3
        {0, 3, 10},   // v1-v4
        {3, 6, 10},   // v4-v7
        {2, 7, 500},  // v3-v8
        {6, 8, 500},  // v7-v9
    };
    std::vector<Coord> coords = {{85, 85},  {55, 85},   {25, 85},  {95, 115}, {85, 115},
                                 {25, 115}, {95, 145},  {0, 0},    {160, 160}};
    return {make_network_with_coords(9, edges, coords)};
}

// Seeded random connected graph: spanning chain over a random permutation
// plus extra random edges; weights uniform in [1, 20]. Coordinates are
// random, with a small fraction duplicated to exercise quantization
// collision handling.
inline RoadNetwork random_graph(std::uint64_t seed, std::size_t n, double extra_edge_factor = 1.5) {
    Xorshift64Star rng(seed);
    std::vector<Vertex> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<Vertex>(i);
    for (std::size_t i = n; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.next_below(i)]);

    std::vector<RawArc> edges;
    for (std::size_t i = 1; i < n; ++i)
        edges.push_back({perm[i - 1], perm[i], static_cast<Weight>(1 + rng.next_below(20))});
    auto extras = static_cast<std::size_t>(static_cast<double>(n) * extra_edge_factor);
    for (std::size_t i = 0; i < extras; ++i) {
        auto u = static_cast<Vertex>(rng.next_below(n));
        auto v = static_cast<Vertex>(rng.next_below(n));
        if (u == v) continue;
        edges.push_back({u, v, static_cast<Weight>(1 + rng.next_below(20))});
    }

    std::vector<Coord> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && rng.next_below(20) == 0) {
            coords[i] = coords[rng.next_below(i)];  // deliberate duplicate
        } else {
            coords[i].x = static_cast<std::int64_t>(rng.next_below(100000));
            coords[i].y = static_cast<std::int64_t>(rng.next_below(100000));
        }
    }
    BuildOptions opt;
    opt.max_degree = 64;  // random extras can pile up
    return make_network_with_coords(n, edges, coords, opt);
}

// Seeded jittered-lattice graph: spatially coherent, unit-ish weights
// proportional to geometric length, some diagonals. Closer to road-network
// geometry than random_graph.
inline RoadNetwork geo_graph(std::uint64_t seed, std::size_t rows, std::size_t cols,
                             std::int64_t spacing = 100) {
    Xorshift64Star rng(seed);
    std::size_t n = rows * cols;
    std::vector<Coord> coords(n);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            std::int64_t jx = static_cast<std::int64_t>(rng.next_below(spacing / 2)) - spacing / 4;
            std::int64_t jy = static_cast<std::int64_t>(rng.next_below(spacing / 2)) - spacing / 4;
            coords[r * cols + c] = {static_cast<std::int64_t>(c) * spacing + jx,
                                    static_cast<std::int64_t>(r) * spacing + jy};
        }
    auto id = [cols](std::size_t r, std::size_t c) {
        return static_cast<Vertex>(r * cols + c);
    };
    auto dist_w = [&](Vertex a, Vertex b) {
        double dx = static_cast<double>(coords[a].x - coords[b].x);
        double dy = static_cast<double>(coords[a].y - coords[b].y);
        auto w = static_cast<Weight>(std::sqrt(dx * dx + dy * dy));
        return w == 0 ? 1 : w;
    };
    std::vector<RawArc> edges;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), dist_w(id(r, c), id(r, c + 1))});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), dist_w(id(r, c), id(r + 1, c))});
            if (r + 1 < rows && c + 1 < cols && rng.next_below(10) == 0)
                edges.push_back({id(r, c), id(r + 1, c + 1), dist_w(id(r, c), id(r + 1, c + 1))});
        }
    return make_network_with_coords(n, edges, coords);
}

// All-pairs oracle by repeated single-source search (small graphs only).
inline std::vector<std::vector<Dist>> oracle_distances(const RoadNetwork& net) {
    std::vector<std::vector<Dist>> d(net.n());
    DijkstraWorkspace ws;
    for (Vertex s = 0; s < net.n(); ++s) {
        run_sssp(net, s, ws);
        d[s].assign(net.n(), kInfDist);
        for (Vertex v : ws.settle_order) d[s][v] = ws.dist(v);
    }
    return d;
}

}  // namespace roadbench::test
