#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <vector>

#include "roadbench/core.hpp"
#include "roadbench/dijkstra.hpp"
#include "roadbench/graph.hpp"

namespace roadbench {

// rank[v]: position of v in the contraction order (0 = contracted first).
struct NodeOrder {
    std::vector<Vertex> rank;

    bool is_permutation() const {
        std::vector<char> seen(rank.size(), 0);
        for (Vertex r : rank) {
            if (r >= rank.size() || seen[r]) return false;
            seen[r] = 1;
        }
        return true;
    }
};

struct CHParams {
    // 0 = exact witness search (unbounded); otherwise each witness search
    // settles at most this many vertices. The cap trades the
    // shortcut-weight-equals-distance guarantee for speed; query results
    // stay exact either way.
    std::uint32_t witness_settle_cap = 0;
    // Optional explicit order (tests / reproducing worked examples).
    std::vector<Vertex> forced_rank;
};

// One arc of the augmented graph. middle == kNoVertex marks an original
// edge; otherwise the arc is a shortcut bypassing that contracted vertex.
struct CHArc {
    Vertex to = kNoVertex;
    Dist w = 0;
    Vertex middle = kNoVertex;
};

// Canonical serialized arc record, endpoints normalized u < v.
struct CHSerialArc {
    Vertex u, v;
    Dist w;
    Vertex middle;
};

class CHIndex {
  public:
    std::vector<Vertex> rank;
    std::vector<std::uint32_t> offsets;  // symmetric CSR over augmented arcs
    std::vector<CHArc> arcs;             // per row: upward arcs first
    std::vector<std::uint32_t> up_ends;  // row position where upward arcs end
    std::size_t shortcut_count = 0;

    std::size_t n() const { return rank.size(); }
    std::span<const CHArc> neighbors(Vertex v) const {
        return {arcs.data() + offsets[v], arcs.data() + offsets[v + 1]};
    }
    // arcs leading to strictly higher-ranked vertices; all a query relaxes
    std::span<const CHArc> upward(Vertex v) const {
        return {arcs.data() + offsets[v], arcs.data() + up_ends[v]};
    }
    const CHArc* find_arc(Vertex u, Vertex v) const {
        for (const CHArc& a : neighbors(u))
            if (a.to == v) return &a;
        return nullptr;
    }

    // Deterministic canonical arc list (u < v, sorted), used for
    // serialization and fixture assertions.
    std::vector<CHSerialArc> serial_arcs() const {
        std::vector<CHSerialArc> out;
        for (Vertex u = 0; u < n(); ++u)
            for (const CHArc& a : neighbors(u))
                if (u < a.to) out.push_back({u, a.to, a.w, a.middle});
        std::sort(out.begin(), out.end(), [](const CHSerialArc& a, const CHSerialArc& b) {
            return a.u != b.u ? a.u < b.u : a.v < b.v;
        });
        return out;
    }

    static CHIndex from_serial(std::size_t n, std::vector<Vertex> rank_in,
                               const std::vector<CHSerialArc>& list) {
        CHIndex idx;
        idx.rank = std::move(rank_in);
        idx.offsets.assign(n + 1, 0);
        for (const auto& e : list) {
            ++idx.offsets[e.u + 1];
            ++idx.offsets[e.v + 1];
            if (e.middle != kNoVertex) ++idx.shortcut_count;
        }
        for (std::size_t i = 1; i <= n; ++i) idx.offsets[i] += idx.offsets[i - 1];
        idx.arcs.resize(idx.offsets[n]);
        std::vector<std::uint32_t> cursor(idx.offsets.begin(), idx.offsets.end() - 1);
        for (const auto& e : list) {
            idx.arcs[cursor[e.u]++] = {e.v, e.w, e.middle};
            idx.arcs[cursor[e.v]++] = {e.u, e.w, e.middle};
        }
        idx.up_ends.resize(n);
        for (Vertex v = 0; v < n; ++v) {
            auto row_begin = idx.arcs.begin() + idx.offsets[v];
            auto row_end = idx.arcs.begin() + idx.offsets[v + 1];
            std::sort(row_begin, row_end,
                      [](const CHArc& a, const CHArc& b) { return a.to < b.to; });
            auto mid = std::stable_partition(row_begin, row_end, [&](const CHArc& a) {
                return idx.rank[a.to] > idx.rank[v];
            });
            idx.up_ends[v] = static_cast<std::uint32_t>(mid - idx.arcs.begin());
        }
        return idx;
    }
};

namespace ch_detail {

// Mutable remaining graph driven through the contraction sequence; shared by
// the ordering heuristic (simulation) and the real contraction pass.
class RemainingGraph {
  public:
    explicit RemainingGraph(const RoadNetwork& net, std::uint32_t settle_cap)
        : n_(net.n()), adj_(net.n()), contracted_(net.n(), 0), deleted_neighbors_(net.n(), 0),
          settle_cap_(settle_cap) {
        for (Vertex u = 0; u < net.n(); ++u)
            for (const Arc& a : net.neighbors(u)) adj_[u].push_back({a.to, a.w, kNoVertex});
    }

    std::size_t n() const { return n_; }
    bool contracted(Vertex v) const { return contracted_[v] != 0; }
    std::uint32_t deleted_neighbors(Vertex v) const { return deleted_neighbors_[v]; }
    std::uint32_t degree(Vertex v) const { return static_cast<std::uint32_t>(adj_[v].size()); }

    struct PlannedShortcut {
        Vertex a, b;
        Dist w;
    };

    // Shortcuts required to preserve distances among m's remaining
    // neighbors once m is removed. A pair (a,b) with potential
    // pot = w(a,m) + w(m,b) needs one iff no strictly better connection
    // exists at all and no path avoiding m is as good. Under unbounded
    // searches the added weight always equals the true remaining-graph
    // distance between a and b.
    void plan(Vertex m, std::vector<PlannedShortcut>& out) {
        out.clear();
        const auto& nbrs = adj_[m];
        for (std::size_t i = 0; i + 1 < nbrs.size(); ++i) {
            Vertex a = nbrs[i].to;
            Dist wa = nbrs[i].w;
            Dist threshold = 0;
            for (std::size_t j = i + 1; j < nbrs.size(); ++j)
                threshold = std::max(threshold, wa + nbrs[j].w);
            search(a, kNoVertex, threshold, ws_with_);
            search(a, m, threshold, ws_without_);
            for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
                Vertex b = nbrs[j].to;
                Dist pot = wa + nbrs[j].w;
                if (ws_with_.seen(b) && ws_with_.dist(b) < pot) continue;   // better route exists
                if (ws_without_.seen(b) && ws_without_.dist(b) <= pot) continue;  // witness
                out.push_back({a, b, pot});
            }
        }
    }

    std::size_t shortcut_count(Vertex m) {
        plan(m, scratch_plan_);
        return scratch_plan_.size();
    }

    // emit(a, b, w, replaced_existing_arc) is called for every inserted
    // shortcut arc.
    template <class Emit>
    void contract(Vertex m, const std::vector<PlannedShortcut>& planned, Emit emit) {
        for (const auto& sc : planned) {
            CHArc* existing = find(sc.a, sc.b);
            if (existing) {
                // A heavier parallel arc (e.g. a non-optimal original edge)
                // is superseded by the exact shortcut.
                if (existing->w <= sc.w) continue;
                existing->w = sc.w;
                existing->middle = m;
                CHArc* back = find(sc.b, sc.a);
                back->w = sc.w;
                back->middle = m;
                emit(sc.a, sc.b, sc.w, true);
            } else {
                adj_[sc.a].push_back({sc.b, sc.w, m});
                adj_[sc.b].push_back({sc.a, sc.w, m});
                emit(sc.a, sc.b, sc.w, false);
            }
        }
        for (const CHArc& a : adj_[m]) {
            auto& lst = adj_[a.to];
            for (std::size_t i = 0; i < lst.size(); ++i)
                if (lst[i].to == m) {
                    lst[i] = lst.back();
                    lst.pop_back();
                    break;
                }
            ++deleted_neighbors_[a.to];
        }
        adj_[m].clear();
        contracted_[m] = 1;
    }

  private:
    CHArc* find(Vertex u, Vertex v) {
        for (CHArc& a : adj_[u])
            if (a.to == v) return &a;
        return nullptr;
    }

    // Bounded Dijkstra over the remaining graph, optionally excluding one
    // vertex. Tentative labels are valid path lengths and are all the
    // planner reads, so hitting the settle cap only makes the plan more
    // conservative (never incorrect).
    void search(Vertex source, Vertex exclude, Dist threshold, DijkstraWorkspace& ws) {
        ws.begin(n_);
        MinHeap heap;
        ws.reach(source, 0, kNoVertex);
        heap.push({0, source});
        std::uint32_t settles = 0;
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (ws.settled(v)) continue;
            if (d > threshold) break;
            ws.settle(v);
            if (settle_cap_ && ++settles >= settle_cap_) break;
            for (const CHArc& a : adj_[v]) {
                if (a.to == exclude || contracted_[a.to]) continue;
                Dist nd = d + a.w;
                if (nd <= threshold && (!ws.seen(a.to) || nd < ws.dist(a.to))) {
                    ws.reach(a.to, nd, v);
                    heap.push({nd, a.to});
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::vector<CHArc>> adj_;
    std::vector<char> contracted_;
    std::vector<std::uint32_t> deleted_neighbors_;
    std::uint32_t settle_cap_;
    DijkstraWorkspace ws_with_, ws_without_;
    std::vector<PlannedShortcut> scratch_plan_;
};

}  // namespace ch_detail

// Contraction order: lazy min-heap on 2*edge_difference + deleted_neighbors,
// re-evaluated on pop; smaller vertex id wins ties.
inline NodeOrder compute_order(const RoadNetwork& net, const CHParams& params = {}) {
    if (!params.forced_rank.empty()) {
        NodeOrder o{params.forced_rank};
        if (o.rank.size() != net.n() || !o.is_permutation())
            throw data_error("forced rank is not a permutation of the vertex set");
        return o;
    }
    ch_detail::RemainingGraph G(net, params.witness_settle_cap);
    auto priority = [&G](Vertex v) {
        auto needed = static_cast<std::int64_t>(G.shortcut_count(v));
        auto deg = static_cast<std::int64_t>(G.degree(v));
        return 2 * (needed - deg) + static_cast<std::int64_t>(G.deleted_neighbors(v));
    };

    struct Entry {
        std::int64_t prio;
        Vertex v;
        bool operator>(const Entry& o) const {
            return prio != o.prio ? prio > o.prio : v > o.v;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    for (Vertex v = 0; v < net.n(); ++v) heap.push({priority(v), v});

    NodeOrder order;
    order.rank.assign(net.n(), 0);
    Vertex next_rank = 0;
    std::vector<ch_detail::RemainingGraph::PlannedShortcut> plan;
    while (!heap.empty()) {
        auto [prio, v] = heap.top();
        heap.pop();
        if (G.contracted(v)) continue;
        std::int64_t fresh = priority(v);
        if (!heap.empty() && fresh > heap.top().prio) {
            heap.push({fresh, v});
            continue;
        }
        G.plan(v, plan);
        G.contract(v, plan, [](Vertex, Vertex, Dist, bool) {});
        order.rank[v] = next_rank++;
    }
    return order;
}

// Contracts in ascending rank, recording every arc of the augmented graph.
inline CHIndex contract_all(const RoadNetwork& net, const NodeOrder& order,
                            const CHParams& params = {}) {
    if (order.rank.size() != net.n() || !order.is_permutation())
        throw data_error("contraction order is not a permutation");

    std::vector<CHSerialArc> master;
    std::unordered_map<std::uint64_t, std::size_t> live;  // unordered pair -> master slot
    auto key = [](Vertex a, Vertex b) {
        Vertex lo = a < b ? a : b, hi = a < b ? b : a;
        return (static_cast<std::uint64_t>(lo) << 32) | hi;
    };
    for (Vertex u = 0; u < net.n(); ++u)
        for (const Arc& a : net.neighbors(u))
            if (u < a.to) {
                live[key(u, a.to)] = master.size();
                master.push_back({u, a.to, a.w, kNoVertex});
            }

    ch_detail::RemainingGraph G(net, params.witness_settle_cap);
    std::vector<Vertex> by_rank(net.n());
    for (Vertex v = 0; v < net.n(); ++v) by_rank[order.rank[v]] = v;

    std::vector<ch_detail::RemainingGraph::PlannedShortcut> plan;
    for (Vertex m : by_rank) {
        G.plan(m, plan);
        G.contract(m, plan, [&](Vertex a, Vertex b, Dist w, bool replaced) {
            Vertex lo = a < b ? a : b, hi = a < b ? b : a;
            if (replaced) {
                master[live.at(key(a, b))] = {lo, hi, w, m};
            } else {
                live[key(a, b)] = master.size();
                master.push_back({lo, hi, w, m});
            }
        });
    }
    return CHIndex::from_serial(net.n(), order.rank, master);
}

struct CHWorkspace {
    DijkstraWorkspace fwd, bwd;
};

namespace ch_detail {

// Upward search result: best meeting vertex and distance.
inline void ch_search(const CHIndex& idx, Vertex s, Vertex t, CHWorkspace& cw, Dist& best,
                      Vertex& meet) {
    DijkstraWorkspace& F = cw.fwd;
    DijkstraWorkspace& B = cw.bwd;
    F.begin(idx.n());
    B.begin(idx.n());
    MinHeap fq, bq;
    F.reach(s, 0, kNoVertex);
    fq.push({0, s});
    B.reach(t, 0, kNoVertex);
    bq.push({0, t});
    best = kInfDist;
    meet = kNoVertex;

    auto cleanup = [](MinHeap& q, DijkstraWorkspace& ws) {
        while (!q.empty() && ws.settled(q.top().v)) q.pop();
    };
    while (true) {
        cleanup(fq, F);
        cleanup(bq, B);
        // A side stops once its minimum cannot beat the best candidate.
        Dist fmin = fq.empty() ? kInfDist : fq.top().d;
        Dist bmin = bq.empty() ? kInfDist : bq.top().d;
        bool f_live = fmin < best;
        bool b_live = bmin < best;
        if (!f_live && !b_live) break;

        bool forward = f_live && (!b_live || fmin <= bmin);
        MinHeap& q = forward ? fq : bq;
        DijkstraWorkspace& me = forward ? F : B;
        DijkstraWorkspace& other = forward ? B : F;

        auto [d, v] = q.top();
        q.pop();
        me.settle(v);
        if (other.seen(v) && d + other.dist(v) < best) {
            best = d + other.dist(v);
            meet = v;
        }
        // stall-on-demand: a higher-ranked neighbor that reaches v more
        // cheaply proves this label lies on no shortest upward path, so the
        // relaxation below it can be skipped without losing exactness
        bool stalled = false;
        for (const CHArc& a : idx.upward(v)) {
            if (me.seen(a.to) && me.dist(a.to) + a.w < d) {
                stalled = true;
                break;
            }
        }
        if (stalled) continue;
        for (const CHArc& a : idx.upward(v)) {
            Dist nd = d + a.w;
            if (!me.seen(a.to) || nd < me.dist(a.to)) {
                me.reach(a.to, nd, v);
                q.push({nd, a.to});
            }
        }
    }
}

// Expands arc (u,v) into original edges, appending vertices after u and
// accumulating original-edge weight.
inline void unpack_arc(const CHIndex& idx, Vertex u, Vertex v, std::vector<Vertex>& out,
                       Dist& length, std::size_t depth = 0) {
    if (depth > idx.n()) throw data_error("shortcut expansion does not terminate (index corrupt)");
    const CHArc* arc = idx.find_arc(u, v);
    if (!arc) throw data_error("missing arc during shortcut expansion (index corrupt)");
    if (arc->middle == kNoVertex) {
        out.push_back(v);
        length += arc->w;
        return;
    }
    unpack_arc(idx, u, arc->middle, out, length, depth + 1);
    unpack_arc(idx, arc->middle, v, out, length, depth + 1);
}

}  // namespace ch_detail

inline Dist ch_distance(const CHIndex& idx, Vertex s, Vertex t, CHWorkspace* ext = nullptr) {
    if (s == t) return 0;
    CHWorkspace own;
    CHWorkspace& cw = ext ? *ext : own;
    Dist best;
    Vertex meet;
    ch_detail::ch_search(idx, s, t, cw, best, meet);
    return best;
}

inline Path ch_path(const CHIndex& idx, Vertex s, Vertex t, CHWorkspace* ext = nullptr) {
    if (s == t) return {{s}, 0};
    CHWorkspace own;
    CHWorkspace& cw = ext ? *ext : own;
    Dist best;
    Vertex meet;
    ch_detail::ch_search(idx, s, t, cw, best, meet);
    if (meet == kNoVertex) return {};  // disconnected input

    std::vector<Vertex> up;  // s .. meet over augmented arcs
    for (Vertex v = meet; v != kNoVertex; v = cw.fwd.parent(v)) up.push_back(v);
    std::reverse(up.begin(), up.end());
    std::vector<Vertex> down;  // meet .. t
    for (Vertex v = meet; v != kNoVertex; v = cw.bwd.parent(v)) down.push_back(v);

    Path p;
    p.vertices.push_back(s);
    p.length = 0;
    for (std::size_t i = 1; i < up.size(); ++i)
        ch_detail::unpack_arc(idx, up[i - 1], up[i], p.vertices, p.length);
    for (std::size_t i = 1; i < down.size(); ++i)
        ch_detail::unpack_arc(idx, down[i - 1], down[i], p.vertices, p.length);
    return p;
}

// Convenience: order + contract with one call.
inline CHIndex build_ch(const RoadNetwork& net, const CHParams& params = {}) {
    return contract_all(net, compute_order(net, params), params);
}

}  // namespace roadbench
