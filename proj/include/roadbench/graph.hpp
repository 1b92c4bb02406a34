#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roadbench/core.hpp"

namespace roadbench {

struct Arc {
    Vertex to = kNoVertex;
    Weight w = 0;
};

// A raw directed arc as it appears in the input, already 0-based.
struct RawArc {
    Vertex u = 0;
    Vertex v = 0;
    Weight w = 0;
};

struct BuildOptions {
    // Road networks have small degrees; anything larger is almost certainly a
    // broken input. Several indexes also pack neighbor slots into one byte.
    std::uint32_t max_degree = 16;
    bool restrict_to_largest_component = true;
};

struct BuildReport {
    std::size_t raw_arcs = 0;
    std::size_t self_loops_dropped = 0;
    std::size_t undirected_edges = 0;
    // Unordered pairs whose two directions (or duplicate listings) disagreed
    // on weight; the minimum was kept.
    std::size_t asymmetric_pairs = 0;
    // Arcs listed in one direction only before symmetrization.
    std::size_t oneway_arcs = 0;
    std::size_t input_vertices = 0;
    std::size_t final_vertices = 0;
    std::size_t dropped_component_vertices = 0;
};

// Immutable undirected road network in CSR form. Adjacency lists are sorted
// by neighbor id; there is at most one edge per unordered pair, no self
// loops, and (if requested at build time) the graph is connected.
class RoadNetwork {
  public:
    RoadNetwork() = default;

    std::size_t n() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t undirected_edge_count() const { return arcs_.size() / 2; }

    std::span<const Arc> neighbors(Vertex v) const {
        return {arcs_.data() + offsets_[v], arcs_.data() + offsets_[v + 1]};
    }
    std::uint32_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

    bool has_coords() const { return has_coords_; }
    const Coord& coord(Vertex v) const { return coords_[v]; }
    const std::vector<Coord>& coords() const { return coords_; }
    const BoundingBox& bbox() const { return bbox_; }

    // Label the vertex carried in the input files (DIMACS ids are 1-based).
    std::uint32_t original_id(Vertex v) const { return original_ids_[v]; }
    const std::vector<std::uint32_t>& original_ids() const { return original_ids_; }
    // Maps an original label back to the dense id, or kNoVertex if the vertex
    // did not survive loading.
    Vertex dense_id(std::uint32_t original) const {
        auto it = std::lower_bound(by_original_.begin(), by_original_.end(), original,
                                   [](const auto& p, std::uint32_t key) { return p.first < key; });
        if (it == by_original_.end() || it->first != original) return kNoVertex;
        return it->second;
    }

    std::optional<Weight> edge_weight(Vertex u, Vertex v) const {
        for (const Arc& a : neighbors(u))
            if (a.to == v) return a.w;
        return std::nullopt;
    }

    Weight max_weight() const { return max_weight_; }

    // Canonical edge list (u < v, ascending), the basis of the graph
    // fingerprint used by index containers.
    std::vector<RawArc> canonical_edges() const {
        std::vector<RawArc> out;
        out.reserve(undirected_edge_count());
        for (Vertex u = 0; u < n(); ++u)
            for (const Arc& a : neighbors(u))
                if (u < a.to) out.push_back({u, a.to, a.w});
        return out;
    }

    static RoadNetwork build(std::size_t n_input, const std::vector<RawArc>& arcs,
                             std::vector<Coord> coords, std::vector<std::uint32_t> original_labels,
                             const BuildOptions& opt = {}, BuildReport* report = nullptr);

  private:
    std::vector<std::uint32_t> offsets_;
    std::vector<Arc> arcs_;
    std::vector<Coord> coords_;
    std::vector<std::uint32_t> original_ids_;
    std::vector<std::pair<std::uint32_t, Vertex>> by_original_;
    BoundingBox bbox_;
    Weight max_weight_ = 0;
    bool has_coords_ = false;
};

inline RoadNetwork RoadNetwork::build(std::size_t n_input, const std::vector<RawArc>& arcs,
                                      std::vector<Coord> coords,
                                      std::vector<std::uint32_t> original_labels,
                                      const BuildOptions& opt, BuildReport* report) {
    BuildReport rep;
    rep.raw_arcs = arcs.size();
    rep.input_vertices = n_input;

    // Symmetrize and deduplicate: minimum weight per unordered pair.
    struct PairInfo {
        Weight min_w = 0;
        Weight min_fwd = 0;  // u < v direction
        Weight min_bwd = 0;
        bool saw_fwd = false;
        bool saw_bwd = false;
    };
    std::map<std::pair<Vertex, Vertex>, PairInfo> pairs;
    for (const RawArc& a : arcs) {
        if (a.u >= n_input || a.v >= n_input) throw data_error("arc endpoint out of range");
        if (a.w == 0)
            throw data_error("zero-weight arc (" + std::to_string(a.u) + "," +
                             std::to_string(a.v) +
                             "): weights must be positive travel-time units");
        if (a.u == a.v) {
            ++rep.self_loops_dropped;
            continue;
        }
        bool fwd = a.u < a.v;
        auto key = fwd ? std::make_pair(a.u, a.v) : std::make_pair(a.v, a.u);
        auto [it, inserted] = pairs.try_emplace(key);
        PairInfo& p = it->second;
        if (inserted) p.min_w = a.w;
        p.min_w = std::min(p.min_w, a.w);
        if (fwd) {
            p.min_fwd = p.saw_fwd ? std::min(p.min_fwd, a.w) : a.w;
            p.saw_fwd = true;
        } else {
            p.min_bwd = p.saw_bwd ? std::min(p.min_bwd, a.w) : a.w;
            p.saw_bwd = true;
        }
    }
    for (const auto& [key, p] : pairs) {
        if (!p.saw_fwd || !p.saw_bwd)
            ++rep.oneway_arcs;
        else if (p.min_fwd != p.min_bwd)
            ++rep.asymmetric_pairs;
    }

    // Union-find for the largest connected component.
    std::vector<Vertex> uf(n_input);
    for (std::size_t i = 0; i < n_input; ++i) uf[i] = static_cast<Vertex>(i);
    auto find = [&uf](Vertex x) {
        while (uf[x] != x) {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        return x;
    };
    for (const auto& [key, p] : pairs) {
        Vertex a = find(key.first), b = find(key.second);
        if (a != b) uf[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::uint32_t> comp_size(n_input, 0);
    for (std::size_t i = 0; i < n_input; ++i) ++comp_size[find(static_cast<Vertex>(i))];
    Vertex best_root = 0;
    for (std::size_t i = 0; i < n_input; ++i)
        if (comp_size[i] > comp_size[best_root]) best_root = static_cast<Vertex>(i);

    // Dense remap, ascending original order (deterministic).
    std::vector<Vertex> remap(n_input, kNoVertex);
    RoadNetwork net;
    for (std::size_t i = 0; i < n_input; ++i) {
        bool keep = !opt.restrict_to_largest_component || find(static_cast<Vertex>(i)) == best_root;
        if (!keep) continue;
        remap[i] = static_cast<Vertex>(net.original_ids_.size());
        net.original_ids_.push_back(original_labels.empty() ? static_cast<std::uint32_t>(i + 1)
                                                            : original_labels[i]);
    }
    std::size_t n = net.original_ids_.size();
    rep.final_vertices = n;
    rep.dropped_component_vertices = n_input - n;

    std::vector<std::vector<Arc>> adj(n);
    for (const auto& [key, p] : pairs) {
        Vertex u = remap[key.first], v = remap[key.second];
        if (u == kNoVertex || v == kNoVertex) continue;
        adj[u].push_back({v, p.min_w});
        adj[v].push_back({u, p.min_w});
        ++rep.undirected_edges;
        net.max_weight_ = std::max(net.max_weight_, p.min_w);
    }

    net.offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(adj[v].begin(), adj[v].end(),
                  [](const Arc& a, const Arc& b) { return a.to < b.to; });
        if (adj[v].size() > opt.max_degree)
            throw data_error("vertex " + std::to_string(net.original_ids_[v]) + " has degree " +
                             std::to_string(adj[v].size()) + " > bound " +
                             std::to_string(opt.max_degree));
        net.offsets_[v + 1] = net.offsets_[v] + static_cast<std::uint32_t>(adj[v].size());
    }
    net.arcs_.reserve(net.offsets_[n]);
    for (std::size_t v = 0; v < n; ++v)
        net.arcs_.insert(net.arcs_.end(), adj[v].begin(), adj[v].end());

    net.has_coords_ = !coords.empty();
    net.coords_.resize(n);
    if (net.has_coords_) {
        if (coords.size() != n_input) throw data_error("coordinate table size mismatch");
        for (std::size_t i = 0; i < n_input; ++i)
            if (remap[i] != kNoVertex) net.coords_[remap[i]] = coords[i];
        for (std::size_t v = 0; v < n; ++v) net.bbox_.expand(net.coords_[v]);
    }

    net.by_original_.reserve(n);
    for (std::size_t v = 0; v < n; ++v)
        net.by_original_.emplace_back(net.original_ids_[v], static_cast<Vertex>(v));
    std::sort(net.by_original_.begin(), net.by_original_.end());

    if (report) *report = rep;
    return net;
}

// Test/generator convenience: dense 0-based vertices with optional coords.
inline RoadNetwork make_network_with_coords(std::size_t n, const std::vector<RawArc>& edges,
                                            std::vector<Coord> coords,
                                            const BuildOptions& opt = {}) {
    return RoadNetwork::build(n, edges, std::move(coords), {}, opt);
}

inline RoadNetwork make_network(std::size_t n, const std::vector<RawArc>& edges,
                                const BuildOptions& opt = {}) {
    return RoadNetwork::build(n, edges, {}, {}, opt);
}

struct ValidationReport {
    bool symmetric = false;
    bool connected = false;
    std::uint32_t max_degree = 0;
    std::size_t duplicate_coordinate_count = 0;
    std::vector<std::string> issues;

    bool ok() const { return issues.empty(); }
};

// Independent re-check of the structural invariants (does not trust the
// builder): symmetry, connectivity, degree bound, self loops, duplicates.
inline ValidationReport validate(const RoadNetwork& net, std::uint32_t degree_bound = 16) {
    ValidationReport r;
    std::size_t n = net.n();
    r.symmetric = true;
    for (Vertex u = 0; u < n; ++u) {
        r.max_degree = std::max(r.max_degree, net.degree(u));
        Vertex prev = kNoVertex;
        for (const Arc& a : net.neighbors(u)) {
            if (a.to == u) r.issues.push_back("self loop at " + std::to_string(u));
            if (prev != kNoVertex && a.to <= prev)
                r.issues.push_back("unsorted/duplicate adjacency at " + std::to_string(u));
            prev = a.to;
            auto back = net.edge_weight(a.to, u);
            if (!back || *back != a.w) {
                r.symmetric = false;
                r.issues.push_back("asymmetric arc " + std::to_string(u) + "->" +
                                   std::to_string(a.to));
            }
        }
    }
    if (r.max_degree > degree_bound)
        r.issues.push_back("max degree " + std::to_string(r.max_degree) + " exceeds bound");

    // BFS connectivity.
    r.connected = true;
    if (n > 0) {
        std::vector<char> seen(n, 0);
        std::vector<Vertex> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            Vertex u = stack.back();
            stack.pop_back();
            for (const Arc& a : net.neighbors(u))
                if (!seen[a.to]) {
                    seen[a.to] = 1;
                    ++reached;
                    stack.push_back(a.to);
                }
        }
        if (reached != n) {
            r.connected = false;
            r.issues.push_back("not connected: reached " + std::to_string(reached) + " of " +
                               std::to_string(n));
        }
    }

    if (net.has_coords()) {
        std::vector<Coord> cs = net.coords();
        std::sort(cs.begin(), cs.end(), [](const Coord& a, const Coord& b) {
            return a.x != b.x ? a.x < b.x : a.y < b.y;
        });
        for (std::size_t i = 1; i < cs.size(); ++i)
            if (cs[i] == cs[i - 1]) ++r.duplicate_coordinate_count;
    }
    return r;
}

// True iff every consecutive pair is an edge and length matches the sum.
inline bool path_well_formed(const RoadNetwork& net, const Path& p) {
    if (p.vertices.empty()) return p.length == 0;
    Dist sum = 0;
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
        auto w = net.edge_weight(p.vertices[i], p.vertices[i + 1]);
        if (!w) return false;
        sum += *w;
    }
    return sum == p.length;
}

}  // namespace roadbench
