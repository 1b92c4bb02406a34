#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "roadbench/workload.hpp"
#include "support/fixtures.hpp"

using namespace roadbench;

namespace {

std::int64_t linf_dist(const RoadNetwork& net, Vertex s, Vertex t) {
    const Coord& a = net.coord(s);
    const Coord& b = net.coord(t);
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

RoadNetwork unit_path(std::size_t n) {
    std::vector<RawArc> arcs;
    for (Vertex v = 0; v + 1 < n; ++v) arcs.push_back({v, v + 1, 1});
    return make_network(n, arcs);
}

}  // namespace

TEST_CASE("bucketed straight-line sets recheck their bounds") {
    auto net = test::geo_graph(11, 12, 12);
    auto sets = gen_linf_sets(net, 50, 99);

    std::size_t complete = 0;
    for (unsigned i = 0; i < 10; ++i) {
        const QuerySet& qs = sets[i];
        CHECK(qs.label == "Q" + std::to_string(i + 1));
        CHECK(qs.requested == 50);
        CHECK(qs.hi == qs.lo * 2);
        REQUIRE(qs.pairs.size() <= 50);
        complete += qs.complete();
        for (auto [s, t] : qs.pairs) {
            REQUIRE(s != t);
            auto d = static_cast<double>(linf_dist(net, s, t));
            REQUIRE(d >= qs.lo);
            REQUIRE(d < qs.hi);
        }
    }
    CHECK(complete >= 3);  // mid buckets are easy on a lattice

    // same seed, same output
    auto again = gen_linf_sets(net, 50, 99);
    for (unsigned i = 0; i < 10; ++i) CHECK(again[i].pairs == sets[i].pairs);
    REQUIRE(!sets[8].pairs.empty());
    CHECK(gen_linf_sets(net, 50, 100)[8].pairs != sets[8].pairs);
}

TEST_CASE("tiny layouts leave some buckets unfillable") {
    auto net = test::fig1_with_grid_coords();
    auto sets = gen_linf_sets(net, 2, 5);

    // the shortest straight-line gap is 10 of a 160 span: the finest buckets
    // can never fill, while coarse ones do
    CHECK(sets[0].pairs.empty());
    bool any_full = false, any_partial = false;
    for (const QuerySet& qs : sets) {
        (qs.complete() ? any_full : any_partial) = true;
        for (auto [s, t] : qs.pairs) {
            auto d = static_cast<double>(linf_dist(net, s, t));
            REQUIRE(d >= qs.lo);
            REQUIRE(d < qs.hi);
        }
    }
    CHECK(any_full);
    CHECK(any_partial);

    CHECK_THROWS_AS(gen_linf_sets(test::fig1(), 2, 5), data_error);  // no coordinates

    auto empty = gen_linf_sets(net, 0, 5);
    for (const QuerySet& qs : empty) {
        CHECK(qs.pairs.empty());
        CHECK(qs.complete());
    }
}

TEST_CASE("network buckets on a long path recover the exact diameter") {
    auto net = unit_path(1024);  // 1023 unit edges end to end
    CHECK(estimate_diameter(net, 3) == 1023);

    auto sets = gen_network_sets(net, 20, 3);
    for (unsigned i = 0; i < 10; ++i) {
        const QuerySet& qs = sets[i];
        CHECK(qs.label == "R" + std::to_string(i + 1));
        CHECK(qs.complete());
        for (auto [s, t] : qs.pairs) {
            REQUIRE(s != t);
            // on a unit path the network distance is the id gap
            auto d = static_cast<double>(s > t ? s - t : t - s);
            REQUIRE(d >= qs.lo);
            REQUIRE(d < qs.hi);
        }
    }
    CHECK(sets[9].hi == 1023.0);
    CHECK(sets[9].lo == 511.5);
}

TEST_CASE("a star fills only the near-diameter bucket") {
    std::vector<RawArc> arcs;
    for (Vertex leaf = 1; leaf <= 5; ++leaf) arcs.push_back({0, leaf, 1});
    auto net = make_network(6, arcs);
    CHECK(estimate_diameter(net, 1) == 2);

    // distances are 1 (center-leaf) and 2 (the diameter itself, excluded by
    // the half-open bound), so only the top bucket [1, 2) can fill
    auto sets = gen_network_sets(net, 5, 1);
    for (unsigned i = 0; i < 9; ++i) CHECK(sets[i].pairs.empty());
    CHECK(sets[9].complete());
    for (auto [s, t] : sets[9].pairs) CHECK((s == 0 || t == 0));
}

TEST_CASE("generation is byte-identical across worker counts") {
    auto net = test::geo_graph(17, 9, 11);
    auto one = gen_network_sets(net, 15, 12, 1);
    auto four = gen_network_sets(net, 15, 12, 4);
    for (unsigned i = 0; i < 10; ++i) {
        CHECK(one[i].pairs == four[i].pairs);
        CHECK(format_query_set(one[i], net) == format_query_set(four[i], net));
    }
}

TEST_CASE("opposite corners of a square ring detour at equal length") {
    auto net = make_network(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}});
    auto rep = measure_delta(net, {{0, 2}, {1, 3}});

    REQUIRE(rep.rows.size() == 2);
    for (const DeltaRow& row : rep.rows) {
        CHECK(row.len_p == 2);
        CHECK(row.len_pprime == 2);
        CHECK(row.ratio() == 1.0);
    }
    CHECK(rep.min_ratio == 1.0);
    CHECK(rep.no_path == 0);
}

TEST_CASE("removing the only interior route disconnects a path graph") {
    auto net = unit_path(6);
    auto rep = measure_delta(net, {{0, 3}, {1, 5}, {0, 5}});
    CHECK(rep.no_path == 3);
    CHECK(rep.min_ratio == 0);  // nothing had an alternative
    for (const DeltaRow& row : rep.rows) CHECK(!row.has_alternative());

    // an adjacent pair has no interior to remove: the edge itself survives
    auto adj = measure_delta(net, {{2, 3}});
    CHECK(adj.rows[0].len_pprime == 1);
    CHECK(adj.min_ratio == 1.0);
}

TEST_CASE("ratios never drop below one and match the direct search") {
    auto net = test::geo_graph(55, 8, 9);
    auto oracle = test::oracle_distances(net);

    std::vector<std::pair<Vertex, Vertex>> pairs;
    Xorshift64Star rng(21);
    while (pairs.size() < 100) {
        auto s = static_cast<Vertex>(rng.next_below(net.n()));
        auto t = static_cast<Vertex>(rng.next_below(net.n()));
        if (s != t) pairs.emplace_back(s, t);
    }

    auto rep = measure_delta(net, pairs, 2);
    REQUIRE(rep.rows.size() == pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const DeltaRow& row = rep.rows[i];
        CHECK(row.s == pairs[i].first);
        CHECK(row.t == pairs[i].second);
        CHECK(row.len_p == oracle[row.s][row.t]);
        if (row.has_alternative()) {
            CHECK(row.len_pprime >= row.len_p);
            CHECK(row.ratio() >= 1.0);
        }
    }
    CHECK(rep.min_ratio >= 1.0);

    auto rep1 = measure_delta(net, pairs, 1);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        CHECK(rep1.rows[i].len_pprime == rep.rows[i].len_pprime);
}

TEST_CASE("query files round-trip byte-identically") {
    auto net = test::geo_graph(29, 7, 8);
    auto sets = gen_linf_sets(net, 10, 42);

    for (const QuerySet& qs : sets) {
        std::string text = format_query_set(qs, net);
        std::istringstream in(text);
        QuerySet back = parse_query_set(in, net);
        CHECK(back.label == qs.label);
        CHECK(back.seed == qs.seed);
        CHECK(back.lo == qs.lo);
        CHECK(back.hi == qs.hi);
        CHECK(back.pairs == qs.pairs);
        CHECK(format_query_set(back, net) == text);
    }

    std::istringstream no_header("1 2\n");
    CHECK_THROWS_AS(parse_query_set(no_header, net), parse_error);
    std::istringstream bad_vertex("# queryset Q1 0 0 1\n999999 1\n");
    CHECK_THROWS_AS(parse_query_set(bad_vertex, net), parse_error);
}
