#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "roadbench/silc.hpp"
#include "support/fixtures.hpp"

using namespace roadbench;

namespace {

Weight edge_w(const RoadNetwork& net, Vertex u, Vertex v) {
    Weight best = 0;
    bool found = false;
    for (const Arc& a : net.neighbors(u))
        if (a.to == v && (!found || a.w < best)) {
            best = a.w;
            found = true;
        }
    REQUIRE(found);
    return best;
}

void check_structure(const SILCIndex& idx, const RoadNetwork& net) {
    for (Vertex s = 0; s < net.n(); ++s) {
        const auto& m = idx.maps[s];
        REQUIRE(m.source == s);
        for (std::size_t i = 1; i < m.intervals.size(); ++i) {
            REQUIRE(m.intervals[i - 1].hi < m.intervals[i].lo);  // sorted, disjoint
            // merging left nothing mergeable behind
            REQUIRE((m.intervals[i - 1].hi + 1 < m.intervals[i].lo ||
                     m.intervals[i - 1].color != m.intervals[i].color));
        }
        REQUIRE(std::is_sorted(m.exceptions.begin(), m.exceptions.end()));
    }
}

RoadNetwork two_cluster_net() {
    BuildOptions opt;
    opt.restrict_to_largest_component = false;
    std::vector<RawArc> arcs = {{0, 1, 2}, {1, 2, 2}, {2, 3, 2}, {3, 4, 2},
                                {5, 6, 2}, {6, 7, 2}, {7, 8, 2}, {8, 9, 2}};
    std::vector<Coord> coords = {{0, 0},       {10, 10},     {20, 5},      {30, 15},    {40, 8},
                                 {1460, 1460}, {1470, 1470}, {1480, 1465}, {1490, 1475}, {1500, 1500}};
    return RoadNetwork::build(10, arcs, coords, {}, opt, nullptr);
}

}  // namespace

TEST_CASE("first-hop partition splits targets into the worked classes") {
    auto net = test::fig1();
    auto hops = first_hop_partition(net, 7);
    CHECK(hops[0] == 0);
    CHECK(hops[2] == 0);
    CHECK(hops[1] == 1);
    CHECK(hops[3] == 5);
    CHECK(hops[4] == 5);
    CHECK(hops[5] == 5);
    CHECK(hops[6] == 5);
    CHECK(hops[7] == kNoVertex);

    // star: every leaf is its own first hop
    std::vector<RawArc> star;
    for (Vertex leaf = 1; leaf <= 5; ++leaf) star.push_back({0, leaf, 1});
    auto snet = make_network(6, star);
    auto shops = first_hop_partition(snet, 0);
    for (Vertex leaf = 1; leaf <= 5; ++leaf) CHECK(shops[leaf] == leaf);

    // chain a-b-c seen from a: both targets leave through b
    auto cnet = make_network(3, {{0, 1, 3}, {1, 2, 4}});
    auto chops = first_hop_partition(cnet, 0);
    CHECK(chops[1] == 1);
    CHECK(chops[2] == 1);
}

TEST_CASE("a uniform partition compresses to one full-range interval") {
    auto net = make_network_with_coords(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}},
                                        {{0, 0}, {30, 10}, {60, 40}, {90, 90}});
    auto idx = build_silc(net);
    const auto& m = idx.maps[0];
    REQUIRE(m.intervals.size() == 1);
    CHECK(m.intervals[0].lo == 0);
    CHECK(m.intervals[0].hi == 0xFFFFFFFFu);
    CHECK(m.intervals[0].color == 1);
    CHECK(m.exceptions.empty());
    for (Vertex t = 1; t < 4; ++t) CHECK(lookup_first_hop(idx, 0, t) == 1);
}

TEST_CASE("opposite-corner colors split into one interval per occupied quadrant") {
    auto net = make_network_with_coords(3, {{0, 1, 1}, {0, 2, 1}},
                                        {{5, 5}, {0, 0}, {10, 10}});
    auto idx = build_silc(net);
    const auto& m = idx.maps[0];
    REQUIRE(m.intervals.size() <= 4);  // split once, merge what's mergeable
    CHECK(m.intervals.size() == 2);
    CHECK(lookup_first_hop(idx, 0, 1) == 1);
    CHECK(lookup_first_hop(idx, 0, 2) == 2);
}

TEST_CASE("coincident vertices with different first hops become exceptions") {
    auto net = make_network_with_coords(3, {{0, 1, 1}, {0, 2, 5}},
                                        {{0, 0}, {7, 3}, {7, 3}});
    auto idx = build_silc(net);
    const auto& m = idx.maps[0];
    CHECK(m.intervals.empty());
    REQUIRE(m.exceptions.size() == 2);
    CHECK(m.exceptions[0] == std::pair<Vertex, Vertex>{1, 1});
    CHECK(m.exceptions[1] == std::pair<Vertex, Vertex>{2, 2});
    CHECK(lookup_first_hop(idx, 0, 1) == 1);
    CHECK(lookup_first_hop(idx, 0, 2) == 2);
}

TEST_CASE("worked-example maps round-trip every first hop") {
    auto net = test::fig1_with_grid_coords();
    auto idx = build_silc(net);
    check_structure(idx, net);

    CHECK(lookup_first_hop(idx, 7, 3) == 5);
    CHECK(lookup_first_hop(idx, 7, 2) == 0);

    for (Vertex s = 0; s < net.n(); ++s) {
        auto hops = first_hop_partition(net, s);
        for (Vertex t = 0; t < net.n(); ++t) {
            if (t == s) continue;
            CHECK(lookup_first_hop(idx, s, t) == hops[t]);
        }
    }
}

TEST_CASE("iterated traversal reproduces shortest paths exactly") {
    auto net = test::fig1_with_grid_coords();
    auto idx = build_silc(net);

    auto p = silc_path(idx, net, 7, 6);
    CHECK(p.vertices == std::vector<Vertex>{7, 5, 4, 6});
    CHECK(p.length == 4);

    auto one = silc_path(idx, net, 0, 2);  // neighbor: a single edge
    CHECK(one.vertices == std::vector<Vertex>{0, 2});
    CHECK(one.length == 1);
    CHECK(silc_path(idx, net, 3, 3).vertices == std::vector<Vertex>{3});
    CHECK(silc_distance(idx, net, 3, 3) == 0);

    auto oracle = test::oracle_distances(net);
    for (Vertex s = 0; s < net.n(); ++s)
        for (Vertex t = 0; t < net.n(); ++t)
            CHECK(silc_distance(idx, net, s, t) == oracle[s][t]);
}

TEST_CASE("every hop satisfies the first-hop identity and shrinks the distance") {
    auto net = test::geo_graph(101, 10, 13);
    auto idx = build_silc(net);
    check_structure(idx, net);
    auto oracle = test::oracle_distances(net);

    for (Vertex s = 0; s < net.n(); ++s) {
        auto hops = first_hop_partition(net, s);
        for (Vertex t = 0; t < net.n(); ++t) {
            if (t == s) continue;
            Vertex h = lookup_first_hop(idx, s, t);
            REQUIRE(h == hops[t]);  // round trip through the compressed map
            REQUIRE(edge_w(net, s, h) + oracle[h][t] == oracle[s][t]);
        }
    }

    for (Vertex s = 0; s < net.n(); s += 7)
        for (Vertex t = 0; t < net.n(); t += 5) {
            auto p = silc_path(idx, net, s, t);
            REQUIRE(p.length == oracle[s][t]);
            for (std::size_t i = 1; i < p.vertices.size(); ++i)
                REQUIRE(oracle[p.vertices[i]][t] < oracle[p.vertices[i - 1]][t]);
        }
}

TEST_CASE("sampled long-range queries on a 500-vertex grid match the oracle") {
    auto net = test::geo_graph(102, 20, 25);
    auto idx = build_silc(net, 16, 2);
    auto oracle = test::oracle_distances(net);
    Xorshift64Star rng(7);
    for (int i = 0; i < 1000; ++i) {
        auto s = static_cast<Vertex>(rng.next_below(net.n()));
        auto t = static_cast<Vertex>(rng.next_below(net.n()));
        auto p = silc_path(idx, net, s, t);
        REQUIRE(p.length == oracle[s][t]);
        if (s != t) {
            REQUIRE(p.front() == s);
            REQUIRE(p.back() == t);
            Dist sum = 0;
            for (std::size_t j = 1; j < p.vertices.size(); ++j)
                sum += edge_w(net, p.vertices[j - 1], p.vertices[j]);
            REQUIRE(sum == p.length);
        }
    }
}

TEST_CASE("coarser quantization still answers exactly via exceptions") {
    auto net = test::fig1_with_grid_coords();
    auto oracle = test::oracle_distances(net);
    for (std::uint32_t bits : {1u, 2u, 8u}) {
        auto idx = build_silc(net, bits);
        check_structure(idx, net);
        for (Vertex s = 0; s < net.n(); ++s)
            for (Vertex t = 0; t < net.n(); ++t)
                REQUIRE(silc_distance(idx, net, s, t) == oracle[s][t]);
    }
}

TEST_CASE("unreachable targets are reported, not fabricated") {
    auto net = two_cluster_net();
    auto idx = build_silc(net);
    CHECK(lookup_first_hop(idx, 0, 9) == kNoVertex);
    CHECK(silc_distance(idx, net, 0, 9) == kInfDist);
    CHECK(silc_path(idx, net, 0, 9).empty());
    CHECK(silc_distance(idx, net, 0, 4) == 8);
    CHECK(silc_distance(idx, net, 5, 9) == 8);
}

TEST_CASE("threaded construction is bit-identical to sequential") {
    auto net = test::geo_graph(95, 8, 10);
    auto seq = build_silc(net, 16, 1);
    auto par = build_silc(net, 16, 4);
    REQUIRE(seq.codes == par.codes);
    for (Vertex v = 0; v < net.n(); ++v) {
        REQUIRE(seq.maps[v].intervals == par.maps[v].intervals);
        REQUIRE(seq.maps[v].exceptions == par.maps[v].exceptions);
    }
}
