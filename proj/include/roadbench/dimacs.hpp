#pragma once

#include <cctype>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "roadbench/core.hpp"
#include "roadbench/graph.hpp"

namespace roadbench {

struct LoadReport {
    BuildReport build;
    std::size_t declared_arcs = 0;   // m from the `p sp n m` line
    std::size_t declared_vertices = 0;
    bool arc_count_mismatch = false;
};

struct LoadResult {
    RoadNetwork net;
    LoadReport report;
};

namespace detail {

// Splits a line into whitespace-separated tokens.
inline std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::int64_t parse_int(const std::string& tok, std::size_t line_no) {
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw parse_error(line_no, "expected integer, got '" + tok + "'");
    }
    if (pos != tok.size()) throw parse_error(line_no, "trailing junk in '" + tok + "'");
    return v;
}

}  // namespace detail

// DIMACS `.gr` arc file: `c` comments, one `p sp <n> <m>` line, `a <u> <v> <w>`
// arc lines with 1-based endpoints.
inline void parse_gr(std::istream& gr, std::size_t& n_out, std::vector<RawArc>& arcs_out,
                     LoadReport& rep) {
    std::string line;
    std::size_t line_no = 0;
    bool have_p = false;
    std::size_t& n = n_out;
    n = 0;
    while (std::getline(gr, line)) {
        ++line_no;
        auto t = detail::tokens(line);
        if (t.empty() || t[0] == "c") continue;
        if (t[0] == "p") {
            if (have_p) throw parse_error(line_no, "duplicate problem line");
            if (t.size() != 4 || t[1] != "sp") throw parse_error(line_no, "expected 'p sp n m'");
            std::int64_t pn = detail::parse_int(t[2], line_no);
            std::int64_t pm = detail::parse_int(t[3], line_no);
            if (pn < 0 || pm < 0) throw parse_error(line_no, "negative size in problem line");
            n = static_cast<std::size_t>(pn);
            rep.declared_vertices = n;
            rep.declared_arcs = static_cast<std::size_t>(pm);
            have_p = true;
            continue;
        }
        if (t[0] == "a") {
            if (!have_p) throw parse_error(line_no, "arc before problem line");
            if (t.size() != 4) throw parse_error(line_no, "expected 'a u v w'");
            std::int64_t u = detail::parse_int(t[1], line_no);
            std::int64_t v = detail::parse_int(t[2], line_no);
            std::int64_t w = detail::parse_int(t[3], line_no);
            if (u < 1 || v < 1 || static_cast<std::size_t>(u) > n ||
                static_cast<std::size_t>(v) > n)
                throw parse_error(line_no, "arc endpoint out of range [1," + std::to_string(n) +
                                               "]");
            if (w < 0 || w > std::numeric_limits<Weight>::max())
                throw parse_error(line_no, "arc weight out of 32-bit range");
            arcs_out.push_back({static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1),
                                static_cast<Weight>(w)});
            continue;
        }
        throw parse_error(line_no, "unknown record '" + t[0] + "'");
    }
    if (!have_p) throw parse_error(line_no ? line_no : 1, "missing 'p sp n m' line");
    rep.arc_count_mismatch = arcs_out.size() != rep.declared_arcs;
}

// DIMACS `.co` coordinate file: `c` comments, `p aux sp co <n>`, `v <id> <x> <y>`.
inline std::vector<Coord> parse_co(std::istream& co, std::size_t n,
                                   std::vector<char>& have_coord) {
    std::vector<Coord> coords(n);
    have_coord.assign(n, 0);
    std::string line;
    std::size_t line_no = 0;
    bool have_p = false;
    while (std::getline(co, line)) {
        ++line_no;
        auto t = detail::tokens(line);
        if (t.empty() || t[0] == "c") continue;
        if (t[0] == "p") {
            if (t.size() != 5 || t[1] != "aux" || t[2] != "sp" || t[3] != "co")
                throw parse_error(line_no, "expected 'p aux sp co n'");
            std::int64_t pn = detail::parse_int(t[4], line_no);
            if (pn < 0 || static_cast<std::size_t>(pn) != n)
                throw parse_error(line_no, "coordinate count disagrees with graph");
            have_p = true;
            continue;
        }
        if (t[0] == "v") {
            if (!have_p) throw parse_error(line_no, "vertex before problem line");
            if (t.size() != 4) throw parse_error(line_no, "expected 'v id x y'");
            std::int64_t id = detail::parse_int(t[1], line_no);
            if (id < 1 || static_cast<std::size_t>(id) > n)
                throw parse_error(line_no, "vertex id out of range");
            coords[id - 1].x = detail::parse_int(t[2], line_no);
            coords[id - 1].y = detail::parse_int(t[3], line_no);
            have_coord[id - 1] = 1;
            continue;
        }
        throw parse_error(line_no, "unknown record '" + t[0] + "'");
    }
    if (!have_p) throw parse_error(line_no ? line_no : 1, "missing 'p aux sp co n' line");
    return coords;
}

// Loads graph + coordinates. The result is symmetrized, min-weight
// deduplicated, self-loop free, and restricted to the largest connected
// component; surviving vertices keep their original 1-based ids in a table.
inline LoadResult load_dimacs(std::istream& gr, std::istream& co, const BuildOptions& opt = {}) {
    LoadResult res;
    std::size_t n = 0;
    std::vector<RawArc> arcs;
    parse_gr(gr, n, arcs, res.report);
    std::vector<char> have_coord;
    std::vector<Coord> coords = parse_co(co, n, have_coord);

    std::vector<std::uint32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint32_t>(i + 1);
    res.net = RoadNetwork::build(n, arcs, std::move(coords), std::move(labels), opt,
                                 &res.report.build);
    for (Vertex v = 0; v < res.net.n(); ++v)
        if (!have_coord[res.net.original_id(v) - 1])
            throw data_error("missing coordinates for vertex " +
                             std::to_string(res.net.original_id(v)));
    return res;
}

// Coordinate-free load for commands that only need adjacency (query/verify).
inline LoadResult load_dimacs(std::istream& gr, const BuildOptions& opt = {}) {
    LoadResult res;
    std::size_t n = 0;
    std::vector<RawArc> arcs;
    parse_gr(gr, n, arcs, res.report);
    std::vector<std::uint32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint32_t>(i + 1);
    res.net = RoadNetwork::build(n, arcs, {}, std::move(labels), opt, &res.report.build);
    return res;
}

// Writes the network back out with dense 1-based ids, both arc directions
// listed. load(serialize(net)) reproduces the adjacency exactly.
inline void serialize_gr(const RoadNetwork& net, std::ostream& out) {
    out << "p sp " << net.n() << ' ' << 2 * net.undirected_edge_count() << '\n';
    for (Vertex u = 0; u < net.n(); ++u)
        for (const Arc& a : net.neighbors(u))
            out << "a " << u + 1 << ' ' << a.to + 1 << ' ' << a.w << '\n';
}

inline void serialize_co(const RoadNetwork& net, std::ostream& out) {
    out << "p aux sp co " << net.n() << '\n';
    for (Vertex v = 0; v < net.n(); ++v)
        out << "v " << v + 1 << ' ' << net.coord(v).x << ' ' << net.coord(v).y << '\n';
}

}  // namespace roadbench
