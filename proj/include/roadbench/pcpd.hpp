#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <iterator>
#include <unordered_map>
#include <vector>

#include "roadbench/core.hpp"
#include "roadbench/dijkstra.hpp"
#include "roadbench/graph.hpp"
#include "roadbench/morton.hpp"
#include "roadbench/parallel.hpp"
#include "roadbench/rng.hpp"

namespace roadbench {

// ---------------------------------------------------------------------------
// Path-coherent pairs: two disjoint quadtree squares (X, Y) plus an element
// psi (vertex or edge) lying on every canonical shortest path from X to Y.
// Recursively subdividing every non-coherent candidate 16-way yields a set
// where each ordered vertex pair is covered exactly once; a query splits the
// path at psi and recurses.
// ---------------------------------------------------------------------------

enum class PsiKind : std::uint8_t { vertex = 0, edge = 1, unreachable = 2 };

struct Psi {
    PsiKind kind = PsiKind::unreachable;
    Vertex a = kNoVertex;  // the vertex, or the edge endpoint on the X side
    Vertex b = kNoVertex;  // the other edge endpoint

    bool operator==(const Psi&) const = default;
};

// Quadtree square: the top 2*depth bits of a Morton code.
struct SquareRegion {
    std::uint32_t depth = 0;
    std::uint32_t prefix = 0;

    bool operator==(const SquareRegion&) const = default;
};

struct PathCoherentPair {
    SquareRegion x, y;
    Psi psi;
};

struct PCPSet {
    Quantization quant;
    std::vector<MortonCode> codes;  // per vertex
    // pairs stored per depth, keyed by (x_prefix << 32) | y_prefix
    std::vector<std::unordered_map<std::uint64_t, Psi>> by_depth;
    // ordered (s << 32) | t pairs the quadtree could not separate
    std::unordered_map<std::uint64_t, Psi> exceptions;

    // open-addressing mirror of by_depth for query-time probing; derived
    // from the maps after construction or load and never serialized
    struct ProbeSlot {
        std::uint64_t key = 0;
        Psi psi;
        std::uint32_t depth = kEmptyDepth;
    };
    static constexpr std::uint32_t kEmptyDepth = 0xFFFFFFFFu;
    std::vector<ProbeSlot> probe_slots;

    std::size_t pair_count() const {
        std::size_t n = 0;
        for (const auto& m : by_depth) n += m.size();
        return n;
    }
    std::size_t exception_count() const { return exceptions.size(); }

    std::uint32_t prefix_at(MortonCode code, std::uint32_t depth) const {
        return depth == 0 ? 0u : static_cast<std::uint32_t>(code >> (2 * (quant.bits - depth)));
    }

    void rebuild_probe_table() {
        std::size_t cap = 16;
        while (cap < 2 * pair_count()) cap <<= 1;
        probe_slots.assign(cap, {});
        for (std::uint32_t d = 0; d < by_depth.size(); ++d)
            for (const auto& [key, psi] : by_depth[d]) {
                std::size_t i = splitmix64(key + (std::uint64_t{d} << 56)) & (cap - 1);
                while (probe_slots[i].depth != kEmptyDepth) i = (i + 1) & (cap - 1);
                probe_slots[i] = {key, psi, d};
            }
    }

    bool probe(std::uint32_t depth, std::uint64_t key, Psi& out) const {
        std::size_t mask = probe_slots.size() - 1;
        std::size_t i = splitmix64(key + (std::uint64_t{depth} << 56)) & mask;
        for (;; i = (i + 1) & mask) {
            const ProbeSlot& slot = probe_slots[i];
            if (slot.depth == kEmptyDepth) return false;
            if (slot.depth == depth && slot.key == key) {
                out = slot.psi;
                return true;
            }
        }
    }
};

struct PCPBuildStats {
    std::size_t pairs = 0;
    std::size_t exceptions = 0;
    std::size_t trees_built = 0;
};

namespace pcpd_detail {

inline std::uint64_t vertex_key(Vertex v) { return (std::uint64_t{1} << 63) | v; }
inline std::uint64_t edge_key(Vertex u, Vertex v) {
    Vertex lo = u < v ? u : v, hi = u < v ? v : u;
    return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

// Canonical shortest-path trees from recently used sources, capped FIFO.
// Parents are canonical (smallest-id predecessor), so every walk below is
// deterministic regardless of build order or thread count.
class TreeCache {
  public:
    TreeCache(const RoadNetwork& net, std::size_t cap) : net_(net), cap_(cap) {}

    const std::vector<Vertex>& get(Vertex s) {
        auto it = trees_.find(s);
        if (it != trees_.end()) return it->second;
        run_sssp(net_, s, ws_);
        canonicalize_parents(net_, s, ws_);
        ++built_;
        std::vector<Vertex> parent(net_.n(), kNoVertex);
        for (Vertex v : ws_.settle_order) parent[v] = ws_.parent(v);
        if (trees_.size() >= cap_) {
            trees_.erase(fifo_.front());
            fifo_.pop_front();
        }
        fifo_.push_back(s);
        return trees_.emplace(s, std::move(parent)).first->second;
    }
    std::size_t built() const { return built_; }

  private:
    const RoadNetwork& net_;
    std::size_t cap_;
    std::unordered_map<Vertex, std::vector<Vertex>> trees_;
    std::deque<Vertex> fifo_;
    DijkstraWorkspace ws_;
    std::size_t built_ = 0;
};

// Forward path s..t out of s's canonical parent tree; false if unreachable.
inline bool chain_path(const std::vector<Vertex>& parent, Vertex s, Vertex t,
                       std::vector<Vertex>& out) {
    out.clear();
    Vertex v = t;
    while (v != s) {
        out.push_back(v);
        v = parent[v];
        if (v == kNoVertex || out.size() > parent.size()) return false;
    }
    out.push_back(s);
    std::reverse(out.begin(), out.end());
    return true;
}

// Elements a path contributes to the shared-set intersection: interior
// vertices and all edges; endpoints only count through the single-edge case.
inline void path_elements(const std::vector<Vertex>& path, std::vector<std::uint64_t>& out) {
    out.clear();
    for (std::size_t i = 1; i + 1 < path.size(); ++i) out.push_back(vertex_key(path[i]));
    for (std::size_t i = 1; i < path.size(); ++i) out.push_back(edge_key(path[i - 1], path[i]));
}

// Deterministic psi choice: prefer a shared vertex, picked so its position on
// the witness path is as central as possible; otherwise the most central
// shared edge, oriented as the witness traverses it. `shared` is sorted.
inline Psi choose_psi(const std::vector<std::uint64_t>& shared,
                      const std::vector<Vertex>& witness) {
    auto has = [&](std::uint64_t key) {
        return std::binary_search(shared.begin(), shared.end(), key);
    };
    std::size_t k = witness.size() - 1;  // hop count
    Psi best;
    std::size_t best_metric = 0;
    for (std::size_t i = 1; i + 1 < witness.size(); ++i) {
        if (!has(vertex_key(witness[i]))) continue;
        std::size_t metric = 2 * i > k ? 2 * i - k : k - 2 * i;
        if (best.kind != PsiKind::vertex || metric < best_metric) {
            best = {PsiKind::vertex, witness[i], kNoVertex};
            best_metric = metric;
        }
    }
    if (best.kind == PsiKind::vertex) return best;
    for (std::size_t i = 1; i < witness.size(); ++i) {
        if (!has(edge_key(witness[i - 1], witness[i]))) continue;
        std::size_t pos = 2 * i - 1;
        std::size_t metric = pos > k ? pos - k : k - pos;
        if (best.kind != PsiKind::edge || metric < best_metric) {
            best = {PsiKind::edge, witness[i - 1], witness[i]};
            best_metric = metric;
        }
    }
    return best;
}

// psi for a lone path, where every element is trivially shared: the most
// central interior vertex, or a single edge itself. Exactly what choose_psi
// picks when the shared set is the path's full element set.
inline Psi central_psi(const std::vector<Vertex>& path) {
    if (path.size() == 2) return {PsiKind::edge, path[0], path[1]};
    std::size_t k = path.size() - 1;
    std::size_t best_i = 1, best_metric = SIZE_MAX;
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        std::size_t metric = 2 * i > k ? 2 * i - k : k - 2 * i;
        if (metric < best_metric) {
            best_metric = metric;
            best_i = i;
        }
    }
    return {PsiKind::vertex, path[best_i], kNoVertex};
}

// psi for a single ordered pair, used for quantization-collision exceptions
inline Psi pair_psi(TreeCache& cache, Vertex x, Vertex y) {
    std::vector<Vertex> path;
    if (!chain_path(cache.get(x), x, y, path)) return {PsiKind::unreachable, kNoVertex, kNoVertex};
    return central_psi(path);
}

struct Candidate {
    std::uint32_t depth = 0;
    std::uint64_t xbase = 0, ybase = 0, size = 0;  // code ranges [base, base+size)
    std::uint32_t xfirst = 0, xlast = 0, yfirst = 0, ylast = 0;  // slices of `order`
};

struct StoredPair {
    std::uint32_t depth;
    std::uint32_t xprefix, yprefix;
    Psi psi;
};

// One worker's processing state plus its share of the output. Outcomes
// depend only on the candidate, so any scheduling yields the same set.
class Worker {
  public:
    Worker(const RoadNetwork& net, const std::vector<Vertex>& order, std::size_t cache_cap)
        : order_(order), cache_(net, cache_cap) {}

    // true if all canonical X->Y paths share an element; psi receives the pick
    bool coherent(const Candidate& c, Psi& psi) {
        if (c.xlast - c.xfirst == 1 && c.ylast - c.yfirst == 1) {
            // a lone reachable pair always succeeds; skip the set machinery
            const auto& tree = cache_.get(order_[c.xfirst]);
            if (!chain_path(tree, order_[c.xfirst], order_[c.yfirst], path_)) return false;
            psi = central_psi(path_);
            return true;
        }
        bool first = true;
        shared_.clear();
        for (std::uint32_t xi = c.xfirst; xi < c.xlast; ++xi) {
            const auto& tree = cache_.get(order_[xi]);
            for (std::uint32_t yi = c.yfirst; yi < c.ylast; ++yi) {
                if (!chain_path(tree, order_[xi], order_[yi], path_)) return false;
                path_elements(path_, elements_);
                std::sort(elements_.begin(), elements_.end());
                if (first) {
                    shared_ = elements_;
                    witness_ = path_;
                    first = false;
                } else {
                    keep_.clear();
                    std::set_intersection(shared_.begin(), shared_.end(), elements_.begin(),
                                          elements_.end(), std::back_inserter(keep_));
                    shared_.swap(keep_);
                }
                if (shared_.empty()) return false;
            }
        }
        psi = choose_psi(shared_, witness_);
        return true;
    }

    void spill_exceptions(const Candidate& c, std::vector<std::pair<std::uint64_t, Psi>>& out) {
        for (std::uint32_t xi = c.xfirst; xi < c.xlast; ++xi)
            for (std::uint32_t yi = c.yfirst; yi < c.ylast; ++yi) {
                Vertex x = order_[xi], y = order_[yi];
                if (x == y) continue;
                out.emplace_back((static_cast<std::uint64_t>(x) << 32) | y,
                                 pair_psi(cache_, x, y));
            }
    }

    std::size_t trees_built() const { return cache_.built(); }

  private:
    const std::vector<Vertex>& order_;
    TreeCache cache_;
    std::vector<Vertex> path_, witness_;
    std::vector<std::uint64_t> elements_, shared_, keep_;
};

}  // namespace pcpd_detail

inline PCPSet build_pcp_set(const RoadNetwork& net, std::uint32_t bits = 16, unsigned threads = 1,
                            PCPBuildStats* stats = nullptr) {
    using namespace pcpd_detail;
    PCPSet set;
    set.quant = make_quantization(net, bits);
    set.codes.resize(net.n());
    for (Vertex v = 0; v < net.n(); ++v) set.codes[v] = set.quant.code_of(net.coord(v));
    set.by_depth.assign(bits + 1, {});

    std::vector<Vertex> order(net.n());
    for (Vertex v = 0; v < net.n(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
        return set.codes[a] != set.codes[b] ? set.codes[a] < set.codes[b] : a < b;
    });

    unsigned worker_count = std::max(1u, threads);
    // Cap each worker's tree cache by a shared memory budget; below the cap
    // every source tree is built at most once per worker, which matters: the
    // candidate sweep revisits sources constantly and FIFO eviction degrades
    // badly once capacity drops under the source count.
    std::size_t tree_bytes = std::max<std::size_t>(net.n(), 1) * sizeof(Vertex);
    std::size_t budget_trees = (std::size_t{512} << 20) / (worker_count * tree_bytes);
    std::size_t cache_cap =
        std::clamp<std::size_t>(budget_trees, 64, std::max<std::size_t>(net.n(), 64));
    std::vector<Worker> workers;
    workers.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) workers.emplace_back(net, order, cache_cap);

    // Level-synchronous processing of the candidate tree: outcomes are
    // computed in parallel, then collected in candidate order, so the stored
    // set is identical at any thread count.
    enum class Outcome : std::uint8_t { store, subdivide, spill };
    std::vector<Candidate> level{{0, 0, 0, set.quant.code_count(), 0,
                                  static_cast<std::uint32_t>(order.size()), 0,
                                  static_cast<std::uint32_t>(order.size())}};
    std::vector<StoredPair> stored;
    std::vector<std::pair<std::uint64_t, Psi>> excepts;
    while (!level.empty()) {
        std::vector<Outcome> outcome(level.size());
        std::vector<Psi> psi(level.size());
        std::vector<std::vector<std::pair<std::uint64_t, Psi>>> spilled(level.size());
        detail::parallel_for(
            static_cast<std::uint32_t>(level.size()), threads, [&](std::uint32_t i, unsigned w) {
                const Candidate& c = level[i];
                bool single = c.xlast - c.xfirst == 1 && c.ylast - c.yfirst == 1;
                if (c.xbase != c.ybase && workers[w].coherent(c, psi[i])) {
                    outcome[i] = Outcome::store;
                } else if (c.size == 1 || single) {
                    // quantization collisions at full depth, or a vertex pair
                    // that can never become coherent (unreachable / identical)
                    outcome[i] = Outcome::spill;
                    workers[w].spill_exceptions(c, spilled[i]);
                } else {
                    outcome[i] = Outcome::subdivide;
                }
            });

        std::vector<Candidate> next;
        for (std::size_t i = 0; i < level.size(); ++i) {
            const Candidate& c = level[i];
            if (outcome[i] == Outcome::store) {
                std::uint32_t shift = 2 * (bits - c.depth);
                stored.push_back({c.depth, static_cast<std::uint32_t>(c.xbase >> shift),
                                  static_cast<std::uint32_t>(c.ybase >> shift), psi[i]});
                continue;
            }
            if (outcome[i] == Outcome::spill) {
                excepts.insert(excepts.end(), spilled[i].begin(), spilled[i].end());
                continue;
            }
            std::uint64_t quarter = c.size / 4;
            // slice both axes once, then cross the non-empty quadrants
            std::uint32_t xcut[5], ycut[5];
            xcut[0] = c.xfirst;
            ycut[0] = c.yfirst;
            for (int q = 1; q <= 4; ++q) {
                std::uint32_t p = xcut[q - 1];
                while (p < c.xlast && set.codes[order[p]] < c.xbase + quarter * q) ++p;
                xcut[q] = p;
                p = ycut[q - 1];
                while (p < c.ylast && set.codes[order[p]] < c.ybase + quarter * q) ++p;
                ycut[q] = p;
            }
            for (int xq = 0; xq < 4; ++xq)
                for (int yq = 0; yq < 4; ++yq) {
                    if (xcut[xq] == xcut[xq + 1] || ycut[yq] == ycut[yq + 1]) continue;
                    next.push_back({c.depth + 1, c.xbase + quarter * xq, c.ybase + quarter * yq,
                                    quarter, xcut[xq], xcut[xq + 1], ycut[yq], ycut[yq + 1]});
                }
        }
        level.swap(next);
    }

    for (const StoredPair& p : stored)
        set.by_depth[p.depth].emplace((static_cast<std::uint64_t>(p.xprefix) << 32) | p.yprefix,
                                      p.psi);
    for (const auto& [key, value] : excepts) set.exceptions.emplace(key, value);
    set.rebuild_probe_table();

    if (stats) {
        stats->pairs = set.pair_count();
        stats->exceptions = set.exception_count();
        stats->trees_built = 0;
        for (const auto& w : workers) stats->trees_built += w.trees_built();
    }
    return set;
}

// The unique stored pair covering (s, t), found by descending the depths.
// Probing starts where the two quadtree squares first separate: same-square
// (diagonal) candidates are always subdivided during construction, so no
// shallower depth can hold the key. Identical codes skip straight to the
// collision exceptions.
inline PathCoherentPair lookup_pair(const PCPSet& set, Vertex s, Vertex t,
                                    std::size_t* probes = nullptr) {
    if (probes) *probes = 0;
    MortonCode diff = set.codes[s] ^ set.codes[t];
    std::uint32_t first =
        diff ? (static_cast<std::uint32_t>(std::countl_zero(diff)) - (32 - 2 * set.quant.bits)) / 2 + 1
             : set.quant.bits + 1;
    if (!set.probe_slots.empty()) {
        for (std::uint32_t d = first; d <= set.quant.bits; ++d) {
            std::uint32_t xp = set.prefix_at(set.codes[s], d);
            std::uint32_t yp = set.prefix_at(set.codes[t], d);
            if (probes) ++*probes;
            Psi psi;
            if (set.probe(d, (static_cast<std::uint64_t>(xp) << 32) | yp, psi))
                return {{d, xp}, {d, yp}, psi};
        }
    } else {  // sets assembled by hand stay queryable without the mirror
        for (std::uint32_t d = first; d <= set.quant.bits; ++d) {
            std::uint32_t xp = set.prefix_at(set.codes[s], d);
            std::uint32_t yp = set.prefix_at(set.codes[t], d);
            if (probes) ++*probes;
            auto it = set.by_depth[d].find((static_cast<std::uint64_t>(xp) << 32) | yp);
            if (it != set.by_depth[d].end()) return {{d, xp}, {d, yp}, it->second};
        }
    }
    auto ex = set.exceptions.find((static_cast<std::uint64_t>(s) << 32) | t);
    if (ex != set.exceptions.end())
        return {{set.quant.bits, set.prefix_at(set.codes[s], set.quant.bits)},
                {set.quant.bits, set.prefix_at(set.codes[t], set.quant.bits)},
                ex->second};
    throw data_error("no path-coherent pair covers the queried vertices");
}

namespace pcpd_detail {

inline Weight min_edge_weight(const RoadNetwork& net, Vertex u, Vertex v) {
    Weight best = 0;
    bool found = false;
    for (const Arc& a : net.neighbors(u))
        if (a.to == v && (!found || a.w < best)) {
            best = a.w;
            found = true;
        }
    if (!found) throw data_error("stored psi edge is not present in the network");
    return best;
}

inline Path decompose(const PCPSet& set, const RoadNetwork& net, Vertex s, Vertex t,
                      std::size_t depth);

// Split at m, which the stored pair guarantees is strictly between s and t.
inline Path split_at(const PCPSet& set, const RoadNetwork& net, Vertex s, Vertex m, Vertex t,
                     std::size_t depth) {
    Path left = decompose(set, net, s, m, depth + 1);
    Path right = decompose(set, net, m, t, depth + 1);
    if (left.empty() || right.empty())
        throw data_error("split vertex unreachable from an endpoint; index is inconsistent");
    return path_concat(left, right);
}

inline Path decompose(const PCPSet& set, const RoadNetwork& net, Vertex s, Vertex t,
                      std::size_t depth) {
    if (depth > net.n()) throw data_error("path decomposition failed to shrink; index is inconsistent");
    if (s == t) return {{s}, 0};
    PathCoherentPair pair = lookup_pair(set, s, t);
    switch (pair.psi.kind) {
        case PsiKind::unreachable:
            return {};
        case PsiKind::vertex:
            return split_at(set, net, s, pair.psi.a, t, depth);
        case PsiKind::edge: {
            // stored orientation: a is on s's side of every covered path
            Vertex u = pair.psi.a, v = pair.psi.b;
            Path left = decompose(set, net, s, u, depth + 1);
            Path right = decompose(set, net, v, t, depth + 1);
            if (left.empty() || right.empty())
                throw data_error("split edge unreachable from an endpoint; index is inconsistent");
            return path_concat(path_concat(left, Path{{u, v}, min_edge_weight(net, u, v)}), right);
        }
    }
    throw data_error("unrecognized psi kind");  // unreachable
}

// Same recursion as decompose, but only the length survives: no vertex
// vectors are materialized, which answers distance queries with the O(k)
// lookups alone. Sums the identical terms, so it equals pcpd_path().length.
inline Dist decompose_length(const PCPSet& set, const RoadNetwork& net, Vertex s, Vertex t,
                             std::size_t depth) {
    if (depth > net.n()) throw data_error("path decomposition failed to shrink; index is inconsistent");
    if (s == t) return 0;
    PathCoherentPair pair = lookup_pair(set, s, t);
    switch (pair.psi.kind) {
        case PsiKind::unreachable:
            return kInfDist;
        case PsiKind::vertex: {
            Dist left = decompose_length(set, net, s, pair.psi.a, depth + 1);
            Dist right = decompose_length(set, net, pair.psi.a, t, depth + 1);
            if (left == kInfDist || right == kInfDist)
                throw data_error("split vertex unreachable from an endpoint; index is inconsistent");
            return left + right;
        }
        case PsiKind::edge: {
            Dist left = decompose_length(set, net, s, pair.psi.a, depth + 1);
            Dist right = decompose_length(set, net, pair.psi.b, t, depth + 1);
            if (left == kInfDist || right == kInfDist)
                throw data_error("split edge unreachable from an endpoint; index is inconsistent");
            return left + min_edge_weight(net, pair.psi.a, pair.psi.b) + right;
        }
    }
    throw data_error("unrecognized psi kind");  // unreachable
}

}  // namespace pcpd_detail

inline Path pcpd_path(const PCPSet& set, const RoadNetwork& net, Vertex s, Vertex t) {
    return pcpd_detail::decompose(set, net, s, t, 0);
}

inline Dist pcpd_distance(const PCPSet& set, const RoadNetwork& net, Vertex s, Vertex t) {
    return pcpd_detail::decompose_length(set, net, s, t, 0);
}

}  // namespace roadbench
