#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "roadbench/container.hpp"
#include "roadbench/engine.hpp"
#include "support/fixtures.hpp"

using namespace roadbench;

namespace {

template <class Index>
std::string to_bytes(const RoadNetwork& net, const Index& idx) {
    std::ostringstream out(std::ios::binary);
    store_index(out, net, idx);
    return out.str();
}

std::vector<std::pair<Vertex, Vertex>> sample_pairs(const RoadNetwork& net, std::size_t count,
                                                    std::uint64_t seed) {
    Xorshift64Star rng(seed);
    std::vector<std::pair<Vertex, Vertex>> out;
    while (out.size() < count) {
        auto s = static_cast<Vertex>(rng.next_below(net.n()));
        auto t = static_cast<Vertex>(rng.next_below(net.n()));
        if (s != t) out.emplace_back(s, t);
    }
    return out;
}

}  // namespace

TEST_CASE("a stored hierarchy reloads with identical structure and answers") {
    auto net = test::geo_graph(41, 8, 9);
    CHIndex idx = build_ch(net);
    std::string bytes = to_bytes(net, idx);

    std::istringstream in(bytes, std::ios::binary);
    CHIndex back = load_ch_index(in, net);
    CHECK(back.rank == idx.rank);
    CHECK(back.shortcut_count == idx.shortcut_count);
    auto a = idx.serial_arcs(), b = back.serial_arcs();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].u == b[i].u);
        CHECK(a[i].v == b[i].v);
        CHECK(a[i].w == b[i].w);
        CHECK(a[i].middle == b[i].middle);
    }
    for (auto [s, t] : sample_pairs(net, 50, 7))
        CHECK(ch_distance(back, s, t) == ch_distance(idx, s, t));

    // reserializing the loaded copy reproduces the bytes exactly
    CHECK(to_bytes(net, back) == bytes);
}

TEST_CASE("a stored table index reloads with its embedded fallback intact") {
    auto net = test::geo_graph(42, 10, 10);
    Grid grid = build_grid(net, 16);
    TNRIndex idx = build_tnr(net, grid);
    std::string bytes = to_bytes(net, idx);

    std::istringstream in(bytes, std::ios::binary);
    TNRIndex back = load_tnr_index(in, net);
    CHECK(back.grid.g == idx.grid.g);
    CHECK(back.grid.cell == idx.grid.cell);
    CHECK(back.access_union == idx.access_union);
    CHECK(back.access_table == idx.access_table);
    CHECK(back.cell_offsets == idx.cell_offsets);
    CHECK(back.cell_access == idx.cell_access);
    CHECK(back.vertex_offsets == idx.vertex_offsets);
    CHECK(back.vertex_dists == idx.vertex_dists);
    REQUIRE(back.fallback_kind == FallbackKind::ch);
    REQUIRE(back.fallback_ch != nullptr);
    CHECK(back.fallback_ch->rank == idx.fallback_ch->rank);
    CHECK(back.net == &net);
    for (auto [s, t] : sample_pairs(net, 50, 8))
        CHECK(tnr_distance(back, s, t) == tnr_distance(idx, s, t));
    CHECK(to_bytes(net, back) == bytes);
}

TEST_CASE("a stored first-hop index reloads byte-identically") {
    auto net = test::geo_graph(43, 7, 8);
    SILCIndex idx = build_silc(net);
    std::string bytes = to_bytes(net, idx);

    std::istringstream in(bytes, std::ios::binary);
    SILCIndex back = load_silc_index(in, net);
    CHECK(back.quant.bits == idx.quant.bits);
    CHECK(back.codes == idx.codes);
    REQUIRE(back.maps.size() == idx.maps.size());
    for (std::size_t i = 0; i < idx.maps.size(); ++i) {
        CHECK(back.maps[i].source == idx.maps[i].source);
        CHECK(back.maps[i].intervals == idx.maps[i].intervals);
        CHECK(back.maps[i].exceptions == idx.maps[i].exceptions);
    }
    for (auto [s, t] : sample_pairs(net, 50, 9))
        CHECK(silc_distance(back, net, s, t) == silc_distance(idx, net, s, t));
    CHECK(to_bytes(net, back) == bytes);
}

TEST_CASE("a stored pair decomposition reloads byte-identically") {
    auto net = test::geo_graph(44, 7, 8);
    PCPSet set = build_pcp_set(net);
    std::string bytes = to_bytes(net, set);

    std::istringstream in(bytes, std::ios::binary);
    PCPSet back = load_pcpd_index(in, net);
    CHECK(back.quant.bits == set.quant.bits);
    CHECK(back.codes == set.codes);
    CHECK(back.pair_count() == set.pair_count());
    CHECK(back.exception_count() == set.exception_count());
    for (auto [s, t] : sample_pairs(net, 50, 10))
        CHECK(pcpd_distance(back, net, s, t) == pcpd_distance(set, net, s, t));
    CHECK(to_bytes(net, back) == bytes);
}

TEST_CASE("indexes built at different worker counts serialize to the same bytes") {
    auto net = test::geo_graph(45, 9, 9);
    CHECK(to_bytes(net, build_silc(net, 16, 1)) == to_bytes(net, build_silc(net, 16, 4)));
    CHECK(to_bytes(net, build_pcp_set(net, 16, 1)) == to_bytes(net, build_pcp_set(net, 16, 4)));
    Grid grid = build_grid(net, 16);
    CHECK(to_bytes(net, build_tnr(net, grid, FallbackKind::ch, 1)) ==
          to_bytes(net, build_tnr(net, grid, FallbackKind::ch, 3)));
}

TEST_CASE("a container refuses to load against a different graph") {
    auto net = test::geo_graph(46, 6, 7);
    CHIndex idx = build_ch(net);
    std::string bytes = to_bytes(net, idx);

    // same topology, one weight nudged
    std::vector<RawArc> arcs = net.canonical_edges();
    arcs.front().w += 1;
    std::vector<Coord> coords(net.coords().begin(), net.coords().end());
    auto other = RoadNetwork::build(net.n(), arcs, std::move(coords), {}, {}, nullptr);

    std::istringstream in(bytes, std::ios::binary);
    CHECK_THROWS_AS(load_ch_index(in, other), data_error);

    std::istringstream ok(bytes, std::ios::binary);
    CHECK_NOTHROW(load_ch_index(ok, net));
}

TEST_CASE("corrupt headers and truncated payloads are rejected") {
    auto net = test::geo_graph(47, 6, 6);
    std::string bytes = to_bytes(net, build_ch(net));

    SECTION("bad magic") {
        std::string bad = bytes;
        bad[0] = 'X';
        std::istringstream in(bad, std::ios::binary);
        CHECK_THROWS_AS(load_index(in, net), data_error);
    }
    SECTION("unsupported version") {
        std::string bad = bytes;
        bad[6] = 99;
        std::istringstream in(bad, std::ios::binary);
        CHECK_THROWS_AS(load_index(in, net), data_error);
    }
    SECTION("unknown method tag") {
        std::string bad = bytes;
        bad[8] = 17;
        std::istringstream in(bad, std::ios::binary);
        CHECK_THROWS_AS(load_index(in, net), data_error);
    }
    SECTION("truncated payload") {
        std::istringstream in(bytes.substr(0, bytes.size() / 2), std::ios::binary);
        CHECK_THROWS_AS(load_index(in, net), data_error);
    }
    SECTION("trailing bytes") {
        std::istringstream in(bytes + "x", std::ios::binary);
        CHECK_THROWS_AS(load_index(in, net), data_error);
    }
}

TEST_CASE("typed loaders reject containers of another method") {
    auto net = test::geo_graph(48, 6, 6);
    std::string bytes = to_bytes(net, build_silc(net));
    std::istringstream in(bytes, std::ios::binary);
    CHECK_THROWS_AS(load_ch_index(in, net), data_error);
}

TEST_CASE("a loaded container of any method answers through the common facade") {
    auto net = test::geo_graph(49, 7, 7);
    auto oracle = test::oracle_distances(net);
    Grid grid = build_grid(net, 16);

    std::vector<std::string> containers = {
        to_bytes(net, build_ch(net)),
        to_bytes(net, build_tnr(net, grid)),
        to_bytes(net, build_silc(net)),
        to_bytes(net, build_pcp_set(net)),
    };
    std::vector<MethodTag> expect = {MethodTag::ch, MethodTag::tnr, MethodTag::silc,
                                     MethodTag::pcpd};
    auto pairs = sample_pairs(net, 100, 11);
    for (std::size_t i = 0; i < containers.size(); ++i) {
        std::istringstream in(containers[i], std::ios::binary);
        LoadedIndex li = load_index(in, net);
        REQUIRE(li.method == expect[i]);
        auto eng = make_engine(li, net);
        for (auto [s, t] : pairs) {
            CHECK(eng->distance(s, t) == oracle[s][t]);
            Path p = eng->path(s, t);
            CHECK(p.length == oracle[s][t]);
        }
    }
    auto base = make_baseline_engine(net);
    for (auto [s, t] : pairs) CHECK(base->distance(s, t) == oracle[s][t]);
}

TEST_CASE("the graph digest tracks weights and edges, not labels") {
    auto net = test::geo_graph(50, 5, 6);
    std::uint64_t fp = graph_fingerprint(net);
    CHECK(fp == graph_fingerprint(net));  // stable

    auto arcs = net.canonical_edges();
    std::vector<Coord> coords(net.coords().begin(), net.coords().end());
    auto same = RoadNetwork::build(net.n(), arcs, std::move(coords), {}, {}, nullptr);
    CHECK(graph_fingerprint(same) == fp);

    auto tweaked_arcs = arcs;
    tweaked_arcs.back().w += 3;
    auto tweaked = RoadNetwork::build(net.n(), tweaked_arcs, {}, {}, {}, nullptr);
    CHECK(graph_fingerprint(tweaked) != fp);

    auto fewer = arcs;
    RawArc dropped = fewer.back();
    fewer.pop_back();
    auto smaller = RoadNetwork::build(net.n(), fewer, {}, {}, {}, nullptr);
    if (smaller.n() == net.n())  // unless the drop disconnected the graph
        CHECK(graph_fingerprint(smaller) != fp);
    (void)dropped;
}
