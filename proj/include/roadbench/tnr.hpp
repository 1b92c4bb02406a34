#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <vector>

#include "roadbench/ch.hpp"
#include "roadbench/core.hpp"
#include "roadbench/dijkstra.hpp"
#include "roadbench/graph.hpp"
#include "roadbench/parallel.hpp"

namespace roadbench {

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

struct Grid {
    std::uint32_t g = 128;
    BoundingBox box;
    std::vector<std::uint32_t> cell;  // per dense vertex: cy * g + cx

    std::uint32_t cx(std::uint32_t c) const { return c % g; }
    std::uint32_t cy(std::uint32_t c) const { return c / g; }
    std::uint32_t cell_count() const { return g * g; }

    std::uint32_t axis_cell(std::int64_t v, std::int64_t lo, std::int64_t span) const {
        std::int64_t c = (v - lo) * static_cast<std::int64_t>(g) / span;
        if (c >= g) c = g - 1;  // max-coordinate vertices clamp into the last cell
        if (c < 0) c = 0;
        return static_cast<std::uint32_t>(c);
    }
    std::uint32_t cell_of(Coord p) const {
        return axis_cell(p.y, box.min_y, box.span_y()) * g + axis_cell(p.x, box.min_x, box.span_x());
    }
};

inline Grid build_grid(const RoadNetwork& net, std::uint32_t g = 128) {
    if (g < 16) throw data_error("grid must have at least 16 cells per side");
    if (!net.has_coords()) throw data_error("grid construction requires vertex coordinates");
    Grid grid;
    grid.g = g;
    grid.box = net.bbox();
    if (grid.box.span_x() == 0 || grid.box.span_y() == 0)
        throw data_error(
            "degenerate bounding box (all vertices share one axis); "
            "grid-based indexing is not applicable to this input");
    grid.cell.resize(net.n());
    for (Vertex v = 0; v < net.n(); ++v) grid.cell[v] = grid.cell_of(net.coord(v));
    return grid;
}

// How a query pair relates to the 5x5 / 9x9 cell blocks around the sources.
enum class Locality : std::uint8_t { local = 0, distance_answerable = 1, path_answerable = 2 };

namespace tnr_detail {

inline std::uint32_t cell_gap(const Grid& grid, std::uint32_t ca, std::uint32_t cb) {
    auto d = [](std::uint32_t a, std::uint32_t b) { return a > b ? a - b : b - a; };
    return std::max(d(grid.cx(ca), grid.cx(cb)), d(grid.cy(ca), grid.cy(cb)));
}

// Membership in the (2r+1)x(2r+1) block of cells centered at `center`.
inline bool in_block(const Grid& grid, std::uint32_t center, std::uint32_t c, std::uint32_t r) {
    return cell_gap(grid, center, c) <= r;
}

inline bool block_covers_grid(const Grid& grid, std::uint32_t center, std::uint32_t r) {
    std::uint32_t cx = grid.cx(center), cy = grid.cy(center);
    return cx <= r && cx + r >= grid.g - 1 && cy <= r && cy + r >= grid.g - 1;
}

constexpr std::uint32_t kInnerRadius = 2;  // 5x5 block
constexpr std::uint32_t kOuterRadius = 4;  // 9x9 block

}  // namespace tnr_detail

inline Locality locality(const Grid& grid, Vertex s, Vertex t) {
    std::uint32_t gap = tnr_detail::cell_gap(grid, grid.cell[s], grid.cell[t]);
    if (gap > 2 * tnr_detail::kOuterRadius) return Locality::path_answerable;  // blocks disjoint
    if (gap > tnr_detail::kOuterRadius) return Locality::distance_answerable;  // t beyond block
    return Locality::local;
}

// ---------------------------------------------------------------------------
// Exact point-to-point engines used during preprocessing and as fallback
// ---------------------------------------------------------------------------

class ShortestPathEngine {
  public:
    virtual ~ShortestPathEngine() = default;
    virtual Dist distance(Vertex s, Vertex t) = 0;
    virtual Path path(Vertex s, Vertex t) = 0;
};

class CHEngine final : public ShortestPathEngine {
  public:
    explicit CHEngine(const CHIndex& idx) : idx_(&idx) {}
    Dist distance(Vertex s, Vertex t) override { return ch_distance(*idx_, s, t, &ws_); }
    Path path(Vertex s, Vertex t) override { return ch_path(*idx_, s, t, &ws_); }

  private:
    const CHIndex* idx_;
    CHWorkspace ws_;
};

class DijkstraEngine final : public ShortestPathEngine {
  public:
    explicit DijkstraEngine(const RoadNetwork& net) : net_(&net) {}
    Dist distance(Vertex s, Vertex t) override { return bidi_query(*net_, s, t, &ws_).dist; }
    Path path(Vertex s, Vertex t) override { return bidi_query(*net_, s, t, &ws_).path; }

  private:
    const RoadNetwork* net_;
    BidiWorkspace ws_;
};

// ---------------------------------------------------------------------------
// Access nodes
// ---------------------------------------------------------------------------

struct AccessNodeSet {
    std::uint32_t cell = 0;
    std::vector<Vertex> nodes;    // sorted ascending
    std::vector<Vertex> members;  // in-cell vertices, ascending
    std::vector<Dist> dists;      // members.size() x nodes.size(), row-major

    Dist dist(std::size_t member_idx, std::size_t node_idx) const {
        return dists[member_idx * nodes.size() + node_idx];
    }
};

namespace tnr_detail {

inline std::vector<std::vector<Vertex>> cell_buckets(const Grid& grid) {
    std::vector<std::vector<Vertex>> buckets(grid.cell_count());
    for (Vertex v = 0; v < grid.cell.size(); ++v) buckets[grid.cell[v]].push_back(v);
    return buckets;
}

// Both endpoints of every edge with exactly one endpoint inside the block.
inline std::vector<Vertex> boundary_crossing_endpoints(const RoadNetwork& net, const Grid& grid,
                                                       std::uint32_t center, std::uint32_t radius,
                                                       const std::vector<std::vector<Vertex>>& buckets) {
    std::vector<Vertex> out;
    std::uint32_t cx = grid.cx(center), cy = grid.cy(center);
    std::uint32_t x0 = cx > radius ? cx - radius : 0;
    std::uint32_t y0 = cy > radius ? cy - radius : 0;
    std::uint32_t x1 = std::min(grid.g - 1, cx + radius);
    std::uint32_t y1 = std::min(grid.g - 1, cy + radius);
    for (std::uint32_t y = y0; y <= y1; ++y)
        for (std::uint32_t x = x0; x <= x1; ++x)
            for (Vertex u : buckets[y * grid.g + x])
                for (const Arc& a : net.neighbors(u))
                    if (!in_block(grid, center, grid.cell[a.to], radius)) {
                        out.push_back(u);
                        out.push_back(a.to);
                    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace tnr_detail

// For each in-cell vertex and each endpoint of an edge leaving the 9x9
// block, walk an exact shortest path and keep the far endpoint of its first
// edge that steps out of the 5x5 block. Every shortest path from the cell to
// beyond the 9x9 block then runs through at least one kept vertex.
inline AccessNodeSet compute_access_nodes(const RoadNetwork& net, const Grid& grid,
                                          std::uint32_t cell, ShortestPathEngine& engine,
                                          const std::vector<std::vector<Vertex>>* buckets_in = nullptr) {
    using namespace tnr_detail;
    std::vector<std::vector<Vertex>> own_buckets;
    if (!buckets_in) {
        own_buckets = cell_buckets(grid);
        buckets_in = &own_buckets;
    }
    AccessNodeSet out;
    out.cell = cell;
    out.members = (*buckets_in)[cell];
    if (out.members.empty()) return out;
    if (block_covers_grid(grid, cell, kOuterRadius)) return out;  // every query is local

    std::vector<Vertex> v_out =
        boundary_crossing_endpoints(net, grid, cell, kOuterRadius, *buckets_in);
    for (Vertex v : out.members) {
        for (Vertex u : v_out) {
            if (u == v) continue;
            Path p = engine.path(v, u);
            bool prev_inside = true;  // v's cell sits inside its own inner block
            for (std::size_t i = 1; i < p.vertices.size(); ++i) {
                bool inside = in_block(grid, cell, grid.cell[p.vertices[i]], kInnerRadius);
                if (prev_inside && !inside) {
                    out.nodes.push_back(p.vertices[i]);
                    break;
                }
                prev_inside = inside;
            }
        }
    }
    std::sort(out.nodes.begin(), out.nodes.end());
    out.nodes.erase(std::unique(out.nodes.begin(), out.nodes.end()), out.nodes.end());

    out.dists.resize(out.members.size() * out.nodes.size());
    for (std::size_t mi = 0; mi < out.members.size(); ++mi)
        for (std::size_t ni = 0; ni < out.nodes.size(); ++ni)
            out.dists[mi * out.nodes.size() + ni] = engine.distance(out.members[mi], out.nodes[ni]);
    return out;
}

// ---------------------------------------------------------------------------
// Index
// ---------------------------------------------------------------------------

enum class FallbackKind : std::uint8_t { ch = 0, bidijkstra = 1 };

struct TNRIndex {
    Grid grid;
    std::vector<Vertex> access_union;          // deduplicated, ascending
    std::vector<Dist> access_table;            // |union|^2 pairwise distances
    std::vector<std::uint32_t> cell_offsets;   // per cell -> slice of cell_access
    std::vector<std::uint32_t> cell_access;    // indices into access_union
    std::vector<std::uint64_t> vertex_offsets; // per vertex -> slice of vertex_dists
    std::vector<Dist> vertex_dists;            // aligned with the vertex's cell slice

    FallbackKind fallback_kind = FallbackKind::ch;
    std::shared_ptr<const CHIndex> fallback_ch;  // present iff fallback_kind == ch
    const RoadNetwork* net = nullptr;            // bound at build/load time

    std::span<const std::uint32_t> cell_access_slice(std::uint32_t c) const {
        return {cell_access.data() + cell_offsets[c], cell_access.data() + cell_offsets[c + 1]};
    }
    std::span<const Dist> vertex_dist_slice(Vertex v) const {
        return {vertex_dists.data() + vertex_offsets[v], vertex_dists.data() + vertex_offsets[v + 1]};
    }
    Dist table(std::size_t i, std::size_t j) const {
        return access_table[i * access_union.size() + j];
    }
    std::vector<Vertex> access_nodes_of_cell(std::uint32_t c) const {
        std::vector<Vertex> out;
        for (std::uint32_t t : cell_access_slice(c)) out.push_back(access_union[t]);
        return out;
    }
};

struct TNRBuildStats {
    std::size_t nonempty_cells = 0;
    std::size_t union_size = 0;
    double mean_access_nodes = 0.0;  // over non-empty cells
};

namespace tnr_detail {

// Assembles the index from per-cell access sets; the pairwise table is
// recomputed from the engine factory so entries are exact by construction.
//
// With augment_local_transit each cell's stored list additionally receives
// every global transit node whose cell lies within this cell's outer block.
// A far source's tight access node can sit that close to the target; once the
// target side holds a distance row for it, the two-table minimum picks it up
// through the table's zero diagonal, which keeps far queries exact even when
// neither side's own scan reaches across the overlap.
template <class EngineFactory>
TNRIndex assemble_tnr(const RoadNetwork& net, const Grid& grid, FallbackKind fallback,
                      std::shared_ptr<const CHIndex> fallback_ch,
                      const std::vector<AccessNodeSet>& sets, EngineFactory make_engine,
                      unsigned threads, TNRBuildStats* stats,
                      bool augment_local_transit = true) {
    TNRIndex idx;
    idx.grid = grid;
    idx.fallback_kind = fallback;
    idx.fallback_ch = fallback == FallbackKind::ch ? std::move(fallback_ch) : nullptr;
    idx.net = &net;

    for (const auto& s : sets)
        idx.access_union.insert(idx.access_union.end(), s.nodes.begin(), s.nodes.end());
    std::sort(idx.access_union.begin(), idx.access_union.end());
    idx.access_union.erase(std::unique(idx.access_union.begin(), idx.access_union.end()),
                           idx.access_union.end());
    auto union_idx = [&idx](Vertex v) {
        return static_cast<std::uint32_t>(
            std::lower_bound(idx.access_union.begin(), idx.access_union.end(), v) -
            idx.access_union.begin());
    };

    std::vector<const AccessNodeSet*> by_cell(grid.cell_count(), nullptr);
    std::vector<std::uint32_t> nonempty;
    for (const auto& s : sets)
        if (!s.members.empty()) {
            by_cell[s.cell] = &s;
            nonempty.push_back(s.cell);
        }
    std::sort(nonempty.begin(), nonempty.end());

    std::vector<std::vector<Vertex>> cell_nodes(grid.cell_count());
    for (std::uint32_t c : nonempty) {
        auto& nodes = cell_nodes[c];
        nodes = by_cell[c]->nodes;
        if (augment_local_transit && !block_covers_grid(grid, c, kOuterRadius)) {
            for (Vertex a : idx.access_union)
                if (cell_gap(grid, grid.cell[a], c) <= kOuterRadius) nodes.push_back(a);
            std::sort(nodes.begin(), nodes.end());
            nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        }
    }

    idx.cell_offsets.assign(grid.cell_count() + 1, 0);
    for (std::uint32_t c = 0; c < grid.cell_count(); ++c) {
        idx.cell_offsets[c + 1] = idx.cell_offsets[c];
        for (Vertex a : cell_nodes[c]) idx.cell_access.push_back(union_idx(a));
        idx.cell_offsets[c + 1] += static_cast<std::uint32_t>(cell_nodes[c].size());
    }

    idx.vertex_offsets.assign(net.n() + 1, 0);
    for (Vertex v = 0; v < net.n(); ++v)
        idx.vertex_offsets[v + 1] = idx.vertex_offsets[v] + cell_nodes[grid.cell[v]].size();
    idx.vertex_dists.resize(idx.vertex_offsets[net.n()]);

    std::vector<std::unique_ptr<ShortestPathEngine>> engines(std::max(1u, threads));
    detail::parallel_for(static_cast<std::uint32_t>(nonempty.size()), threads,
                 [&](std::uint32_t ci, unsigned w) {
                     std::uint32_t c = nonempty[ci];
                     const AccessNodeSet& s = *by_cell[c];
                     const auto& nodes = cell_nodes[c];
                     for (std::size_t mi = 0; mi < s.members.size(); ++mi) {
                         Vertex v = s.members[mi];
                         Dist* row = idx.vertex_dists.data() + idx.vertex_offsets[v];
                         for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
                             auto it = std::lower_bound(s.nodes.begin(), s.nodes.end(), nodes[ni]);
                             if (it != s.nodes.end() && *it == nodes[ni]) {
                                 row[ni] = s.dists[mi * s.nodes.size() +
                                                   static_cast<std::size_t>(it - s.nodes.begin())];
                             } else {
                                 if (!engines[w]) engines[w] = make_engine();
                                 row[ni] = engines[w]->distance(v, nodes[ni]);
                             }
                         }
                     }
                 });

    std::size_t u = idx.access_union.size();
    idx.access_table.assign(u * u, 0);
    detail::parallel_for(static_cast<std::uint32_t>(u), threads, [&](std::uint32_t i, unsigned w) {
        if (!engines[w]) engines[w] = make_engine();
        for (std::size_t j = i + 1; j < u; ++j) {
            Dist d = engines[w]->distance(idx.access_union[i], idx.access_union[j]);
            idx.access_table[i * u + j] = d;
            idx.access_table[j * u + i] = d;
        }
    });

    if (stats) {
        stats->union_size = u;
        stats->nonempty_cells = nonempty.size();
        std::size_t total_nodes = 0;
        for (std::uint32_t c : nonempty) total_nodes += cell_nodes[c].size();
        stats->mean_access_nodes =
            nonempty.empty() ? 0.0 : static_cast<double>(total_nodes) / nonempty.size();
    }
    return idx;
}

}  // namespace tnr_detail

inline TNRIndex build_tnr(const RoadNetwork& net, const Grid& grid,
                          FallbackKind fallback = FallbackKind::ch, unsigned threads = 1,
                          const CHParams& ch_params = {}, TNRBuildStats* stats = nullptr) {
    auto chi = std::make_shared<const CHIndex>(build_ch(net, ch_params));
    auto buckets = tnr_detail::cell_buckets(grid);

    std::vector<std::uint32_t> nonempty;
    for (std::uint32_t c = 0; c < grid.cell_count(); ++c)
        if (!buckets[c].empty()) nonempty.push_back(c);

    std::vector<AccessNodeSet> sets(nonempty.size());
    std::vector<std::unique_ptr<CHEngine>> engines(std::max(1u, threads));
    detail::parallel_for(static_cast<std::uint32_t>(nonempty.size()), threads,
                             [&](std::uint32_t i, unsigned w) {
                                 if (!engines[w]) engines[w] = std::make_unique<CHEngine>(*chi);
                                 sets[i] = compute_access_nodes(net, grid, nonempty[i], *engines[w],
                                                                &buckets);
                             });
    auto factory = [chi] { return std::make_unique<CHEngine>(*chi); };
    return tnr_detail::assemble_tnr(net, grid, fallback, chi, sets, factory, threads, stats);
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

struct TNRWorkspace {
    CHWorkspace ch;
    BidiWorkspace bidi;
};

namespace tnr_detail {

inline Dist fallback_distance(const TNRIndex& idx, Vertex s, Vertex t, TNRWorkspace* ws) {
    if (idx.fallback_kind == FallbackKind::ch) {
        if (!idx.fallback_ch) throw data_error("index is missing its embedded fallback");
        return ch_distance(*idx.fallback_ch, s, t, ws ? &ws->ch : nullptr);
    }
    if (!idx.net) throw data_error("index is not bound to a road network");
    return bidi_query(*idx.net, s, t, ws ? &ws->bidi : nullptr).dist;
}

inline Path fallback_path(const TNRIndex& idx, const RoadNetwork& net, Vertex s, Vertex t,
                          TNRWorkspace* ws) {
    if (idx.fallback_kind == FallbackKind::ch) {
        if (!idx.fallback_ch) throw data_error("index is missing its embedded fallback");
        return ch_path(*idx.fallback_ch, s, t, ws ? &ws->ch : nullptr);
    }
    return bidi_query(net, s, t, ws ? &ws->bidi : nullptr).path;
}

}  // namespace tnr_detail

inline Dist tnr_distance(const TNRIndex& idx, Vertex s, Vertex t, TNRWorkspace* ws = nullptr) {
    if (s == t) return 0;
    if (locality(idx.grid, s, t) == Locality::local)
        return tnr_detail::fallback_distance(idx, s, t, ws);

    auto as = idx.cell_access_slice(idx.grid.cell[s]);
    auto at = idx.cell_access_slice(idx.grid.cell[t]);
    auto ds = idx.vertex_dist_slice(s);
    auto dt = idx.vertex_dist_slice(t);
    std::size_t u = idx.access_union.size();
    Dist best = kInfDist;
    for (std::size_t i = 0; i < as.size(); ++i)
        for (std::size_t j = 0; j < at.size(); ++j) {
            Dist cand = ds[i] + idx.access_table[as[i] * u + at[j]] + dt[j];
            if (cand < best) best = cand;
        }
    return best >= kInfDist ? kInfDist : best;
}

// Greedy first-hop traversal while the pair stays far apart, then the
// remaining stretch comes from the fallback engine.
inline Path tnr_path(const TNRIndex& idx, const RoadNetwork& net, Vertex s, Vertex t,
                     TNRWorkspace* ws = nullptr) {
    if (s == t) return {{s}, 0};
    Path head;
    head.vertices.push_back(s);
    head.length = 0;
    Vertex c = s;
    while (locality(idx.grid, c, t) == Locality::path_answerable) {
        Vertex best_v = kNoVertex;
        Dist best_d = kInfDist;
        Weight best_w = 0;
        for (const Arc& a : net.neighbors(c)) {  // ascending ids; strict < keeps the smallest
            Dist d = a.w + tnr_distance(idx, a.to, t, ws);
            if (d < best_d) {
                best_d = d;
                best_v = a.to;
                best_w = a.w;
            }
        }
        if (best_v == kNoVertex) break;  // unreachable; delegate to report it
        head.vertices.push_back(best_v);
        head.length += best_w;
        c = best_v;
        if (head.vertices.size() > net.n())
            throw data_error("greedy traversal revisited a vertex; index distances are inconsistent");
    }
    Path tail = tnr_detail::fallback_path(idx, net, c, t, ws);
    if (tail.vertices.empty()) return tail;  // unreachable pair
    return path_concat(head, tail);
}

}  // namespace roadbench
