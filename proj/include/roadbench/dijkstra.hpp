#pragma once

#include <algorithm>
#include <functional>
#include <queue>
#include <vector>

#include "roadbench/core.hpp"
#include "roadbench/graph.hpp"

namespace roadbench {

struct HeapEntry {
    Dist d;
    Vertex v;
    // Min-heap order with vertex-id tie-break, so settle order is
    // deterministic even among equal keys.
    bool operator>(const HeapEntry& o) const { return d != o.d ? d > o.d : v > o.v; }
};

using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>>;

// Reusable per-worker search arrays with O(1) reset via stamping. Never share
// one workspace between concurrent queries.
class DijkstraWorkspace {
  public:
    void begin(std::size_t n) {
        if (dist_.size() < n) {
            dist_.resize(n);
            parent_.resize(n);
            seen_.resize(n, 0);
            settled_.resize(n, 0);
        }
        if (++stamp_ == 0) {  // stamp wrapped: wipe and restart
            std::fill(seen_.begin(), seen_.end(), 0);
            std::fill(settled_.begin(), settled_.end(), 0);
            stamp_ = 1;
        }
        settle_order.clear();
    }

    bool seen(Vertex v) const { return seen_[v] == stamp_; }
    bool settled(Vertex v) const { return settled_[v] == stamp_; }
    Dist dist(Vertex v) const { return seen(v) ? dist_[v] : kInfDist; }
    Vertex parent(Vertex v) const { return seen(v) ? parent_[v] : kNoVertex; }

    void reach(Vertex v, Dist d, Vertex p) {
        dist_[v] = d;
        parent_[v] = p;
        seen_[v] = stamp_;
    }
    void settle(Vertex v) {
        settled_[v] = stamp_;
        settle_order.push_back(v);
    }
    void set_parent(Vertex v, Vertex p) { parent_[v] = p; }

    std::vector<Vertex> settle_order;  // ascending final distance

  private:
    std::vector<Dist> dist_;
    std::vector<Vertex> parent_;
    std::vector<std::uint32_t> seen_;
    std::vector<std::uint32_t> settled_;
    std::uint32_t stamp_ = 0;
};

struct NeverStop {
    bool operator()(Vertex, Dist) const { return false; }
};
struct AllowAll {
    bool operator()(Vertex) const { return true; }
};

// Single-source search; distances of settled vertices are final. `stop` is
// evaluated after each settle; `allow` filters which vertices may be entered
// (used for detour computations that block a path's interior).
template <class StopFn = NeverStop, class AllowFn = AllowAll>
void run_sssp(const RoadNetwork& net, Vertex source, DijkstraWorkspace& ws,
              StopFn stop = StopFn{}, AllowFn allow = AllowFn{}) {
    ws.begin(net.n());
    if (!allow(source)) return;
    MinHeap heap;
    ws.reach(source, 0, kNoVertex);
    heap.push({0, source});
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (ws.settled(v)) continue;
        ws.settle(v);
        if (stop(v, d)) return;
        for (const Arc& a : net.neighbors(v)) {
            if (!allow(a.to)) continue;
            Dist nd = d + a.w;
            if (!ws.seen(a.to) || nd < ws.dist(a.to)) {
                ws.reach(a.to, nd, v);
                heap.push({nd, a.to});
            }
        }
    }
}

// Rewrites parents of settled vertices to the canonical choice: the
// smallest-id neighbor u with dist(u) + w(u,v) == dist(v). With positive
// weights every such u settled strictly earlier, so the canonical parent
// chain strictly decreases in distance and the tree is reproducible no
// matter how heap ties were broken.
inline void canonicalize_parents(const RoadNetwork& net, Vertex source, DijkstraWorkspace& ws) {
    for (Vertex v : ws.settle_order) {
        if (v == source) continue;
        for (const Arc& a : net.neighbors(v)) {  // ascending id: first hit is minimal
            if (ws.settled(a.to) && ws.dist(a.to) + a.w == ws.dist(v)) {
                ws.set_parent(v, a.to);
                break;
            }
        }
    }
}

// Snapshot of a finished search: distances, canonical parents, settled flags.
struct SearchState {
    std::vector<Dist> dist;      // kInfDist where not settled
    std::vector<Vertex> parent;  // canonical; kNoVertex at source / unsettled
    std::vector<char> settled;
};

template <class StopFn = NeverStop>
SearchState sssp(const RoadNetwork& net, Vertex source, StopFn stop = StopFn{}) {
    DijkstraWorkspace ws;
    run_sssp(net, source, ws, stop);
    canonicalize_parents(net, source, ws);
    SearchState st;
    st.dist.assign(net.n(), kInfDist);
    st.parent.assign(net.n(), kNoVertex);
    st.settled.assign(net.n(), 0);
    for (Vertex v : ws.settle_order) {
        st.dist[v] = ws.dist(v);
        st.parent[v] = ws.parent(v);
        st.settled[v] = 1;
    }
    return st;
}

// Path source..t read off a canonical parent tree; empty if t unreached.
inline Path canonical_path(const SearchState& st, Vertex t) {
    if (!st.settled[t]) return {};
    Path p;
    for (Vertex v = t; v != kNoVertex; v = st.parent[v]) p.vertices.push_back(v);
    std::reverse(p.vertices.begin(), p.vertices.end());
    p.length = st.dist[t];
    return p;
}

inline Path canonical_path(const DijkstraWorkspace& ws, Vertex t) {
    if (!ws.settled(t)) return {};
    Path p;
    for (Vertex v = t; v != kNoVertex; v = ws.parent(v)) p.vertices.push_back(v);
    std::reverse(p.vertices.begin(), p.vertices.end());
    p.length = ws.dist(t);
    return p;
}

// First hop of the canonical path source->v, for every reachable v
// (kNoVertex at the source itself). One search plus a propagation pass in
// settle order.
inline void compute_first_hops(const RoadNetwork& net, Vertex source, DijkstraWorkspace& ws,
                               std::vector<Vertex>& out) {
    out.assign(net.n(), kNoVertex);
    run_sssp(net, source, ws);
    canonicalize_parents(net, source, ws);
    for (Vertex v : ws.settle_order) {
        if (v == source) continue;
        Vertex p = ws.parent(v);
        out[v] = p == source ? v : out[p];
    }
}

struct BidiWorkspace {
    DijkstraWorkspace fwd, bwd;
};

struct BidiResult {
    Dist dist = kInfDist;
    Path path;
};

// Two simultaneous searches from s and t over the undirected network. The
// best candidate is tracked over meeting vertices and bridging edges with
// one endpoint settled on each side; the search alternates to the side with
// the smaller queue minimum and stops once the two minima sum to at least
// the best candidate.
inline BidiResult bidi_query(const RoadNetwork& net, Vertex s, Vertex t,
                             BidiWorkspace* ext = nullptr) {
    if (s == t) return {0, {{s}, 0}};
    BidiWorkspace own;
    BidiWorkspace& bw = ext ? *ext : own;
    DijkstraWorkspace& F = bw.fwd;
    DijkstraWorkspace& B = bw.bwd;
    F.begin(net.n());
    B.begin(net.n());

    MinHeap fq, bq;
    F.reach(s, 0, kNoVertex);
    fq.push({0, s});
    B.reach(t, 0, kNoVertex);
    bq.push({0, t});

    Dist mu = kInfDist;
    Vertex bridge_f = kNoVertex, bridge_b = kNoVertex;

    auto cleanup = [](MinHeap& q, DijkstraWorkspace& ws) {
        while (!q.empty() && ws.settled(q.top().v)) q.pop();
    };
    while (true) {
        cleanup(fq, F);
        cleanup(bq, B);
        Dist fmin = fq.empty() ? kInfDist : fq.top().d;
        Dist bmin = bq.empty() ? kInfDist : bq.top().d;
        if (fmin >= kInfDist && bmin >= kInfDist) break;
        if (fmin + bmin >= mu) break;

        bool forward = fmin <= bmin;
        MinHeap& q = forward ? fq : bq;
        DijkstraWorkspace& me = forward ? F : B;
        DijkstraWorkspace& other = forward ? B : F;

        auto [d, v] = q.top();
        q.pop();
        me.settle(v);
        if (other.settled(v) && d + other.dist(v) < mu) {
            mu = d + other.dist(v);
            bridge_f = bridge_b = v;
        }
        for (const Arc& a : net.neighbors(v)) {
            Dist nd = d + a.w;
            if (!me.seen(a.to) || nd < me.dist(a.to)) {
                me.reach(a.to, nd, v);
                q.push({nd, a.to});
            }
            // Bridging edge: v on this side, a.to reached by the other side.
            if (other.seen(a.to)) {
                Dist cand = d + a.w + other.dist(a.to);
                if (cand < mu) {
                    mu = cand;
                    bridge_f = forward ? v : a.to;
                    bridge_b = forward ? a.to : v;
                }
            }
        }
    }

    BidiResult res;
    res.dist = mu;
    if (mu >= kInfDist) return res;  // disconnected inputs: no path

    std::vector<Vertex> left;  // s .. bridge_f
    for (Vertex v = bridge_f; v != kNoVertex; v = F.parent(v)) left.push_back(v);
    std::reverse(left.begin(), left.end());
    res.path.vertices = std::move(left);
    Vertex start = bridge_b == bridge_f ? B.parent(bridge_b) : bridge_b;
    for (Vertex v = start; v != kNoVertex; v = B.parent(v)) res.path.vertices.push_back(v);
    res.path.length = mu;
    return res;
}

}  // namespace roadbench
