#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <istream>
#include <memory>
#include <ostream>
#include <string_view>
#include <vector>

#include "roadbench/ch.hpp"
#include "roadbench/core.hpp"
#include "roadbench/graph.hpp"
#include "roadbench/pcpd.hpp"
#include "roadbench/silc.hpp"
#include "roadbench/tnr.hpp"

namespace roadbench {

// ---------------------------------------------------------------------------
// On-disk index container. Layout: magic "RBIDX1", format version (u16),
// method tag (u8), graph fingerprint (u64), then the method payload. All
// integers little-endian fixed-width; map-backed payloads are written in
// sorted key order, so equal indexes serialize to identical bytes.
// ---------------------------------------------------------------------------

enum class MethodTag : std::uint8_t { ch = 0, tnr = 1, silc = 2, pcpd = 3 };

inline const char* method_name(MethodTag m) {
    switch (m) {
        case MethodTag::ch: return "ch";
        case MethodTag::tnr: return "tnr";
        case MethodTag::silc: return "silc";
        case MethodTag::pcpd: return "pcpd";
    }
    return "?";
}

inline bool parse_method(std::string_view name, MethodTag& out) {
    for (MethodTag m : {MethodTag::ch, MethodTag::tnr, MethodTag::silc, MethodTag::pcpd})
        if (name == method_name(m)) {
            out = m;
            return true;
        }
    return false;
}

namespace container_detail {

inline constexpr char kMagic[6] = {'R', 'B', 'I', 'D', 'X', '1'};
inline constexpr std::uint16_t kVersion = 1;

// FNV-1a over the little-endian byte stream of the hashed fields.
struct Fnv64 {
    std::uint64_t h = 1469598103934665603ull;
    void byte(std::uint8_t b) {
        h ^= b;
        h *= 1099511628211ull;
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
    }
};

inline void put_bytes(std::ostream& out, const void* p, std::size_t k) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(k));
}
inline void put_u8(std::ostream& out, std::uint8_t v) { put_bytes(out, &v, 1); }
inline void put_u16(std::ostream& out, std::uint16_t v) {
    std::uint8_t b[2] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8)};
    put_bytes(out, b, 2);
}
inline void put_u32(std::ostream& out, std::uint32_t v) {
    std::uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    put_bytes(out, b, 4);
}
inline void put_u64(std::ostream& out, std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    put_bytes(out, b, 8);
}
inline void put_i64(std::ostream& out, std::int64_t v) {
    put_u64(out, static_cast<std::uint64_t>(v));
}

inline void get_bytes(std::istream& in, void* p, std::size_t k) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(k));
    if (static_cast<std::size_t>(in.gcount()) != k)
        throw data_error("index container is truncated");
}
inline std::uint8_t get_u8(std::istream& in) {
    std::uint8_t v;
    get_bytes(in, &v, 1);
    return v;
}
inline std::uint16_t get_u16(std::istream& in) {
    std::uint8_t b[2];
    get_bytes(in, b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}
inline std::uint32_t get_u32(std::istream& in) {
    std::uint8_t b[4];
    get_bytes(in, b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}
inline std::uint64_t get_u64(std::istream& in) {
    std::uint8_t b[8];
    get_bytes(in, b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
inline std::int64_t get_i64(std::istream& in) { return static_cast<std::int64_t>(get_u64(in)); }

// Guards against hostile or corrupt length fields before any allocation.
inline std::size_t get_count(std::istream& in, std::size_t limit, const char* what) {
    std::uint64_t v = get_u64(in);
    if (v > limit) throw data_error(std::string("implausible ") + what + " count in container");
    return static_cast<std::size_t>(v);
}

}  // namespace container_detail

// 64-bit digest of the canonical adjacency: vertex count, then every
// undirected edge as its sorted (u, v, w) triple. Containers written for one
// graph refuse to load against another.
inline std::uint64_t graph_fingerprint(const RoadNetwork& net) {
    container_detail::Fnv64 f;
    f.u64(net.n());
    for (const RawArc& e : net.canonical_edges()) {
        f.u32(e.u);
        f.u32(e.v);
        f.u32(e.w);
    }
    return f.h;
}

namespace container_detail {

inline void write_header(std::ostream& out, MethodTag tag, std::uint64_t fingerprint) {
    put_bytes(out, kMagic, sizeof kMagic);
    put_u16(out, kVersion);
    put_u8(out, static_cast<std::uint8_t>(tag));
    put_u64(out, fingerprint);
}

inline MethodTag read_header(std::istream& in, const RoadNetwork& net) {
    char magic[sizeof kMagic];
    get_bytes(in, magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw data_error("not an index container (bad magic)");
    std::uint16_t version = get_u16(in);
    if (version != kVersion)
        throw data_error("unsupported container version " + std::to_string(version));
    std::uint8_t tag = get_u8(in);
    if (tag > static_cast<std::uint8_t>(MethodTag::pcpd))
        throw data_error("unknown method tag in container");
    std::uint64_t fp = get_u64(in);
    if (fp != graph_fingerprint(net))
        throw data_error("container fingerprint does not match the supplied graph");
    return static_cast<MethodTag>(tag);
}

// --- method payloads -------------------------------------------------------

inline void write_ch_payload(std::ostream& out, const CHIndex& idx) {
    put_u64(out, idx.n());
    for (Vertex r : idx.rank) put_u32(out, r);
    std::vector<CHSerialArc> arcs = idx.serial_arcs();
    put_u64(out, arcs.size());
    for (const CHSerialArc& a : arcs) {
        put_u32(out, a.u);
        put_u32(out, a.v);
        put_u64(out, a.w);
        put_u32(out, a.middle);
    }
}

inline CHIndex read_ch_payload(std::istream& in, std::size_t graph_n) {
    std::size_t n = get_count(in, graph_n, "vertex");
    if (n != graph_n) throw data_error("container vertex count disagrees with the graph");
    std::vector<Vertex> rank(n);
    for (Vertex& r : rank) r = get_u32(in);
    if (!NodeOrder{rank}.is_permutation())
        throw data_error("container rank list is not a permutation");
    std::size_t m = get_count(in, n * n, "arc");
    std::vector<CHSerialArc> arcs(m);
    for (CHSerialArc& a : arcs) {
        a.u = get_u32(in);
        a.v = get_u32(in);
        a.w = get_u64(in);
        a.middle = get_u32(in);
        if (a.u >= a.v || a.v >= n || (a.middle != kNoVertex && a.middle >= n))
            throw data_error("arc endpoint out of range in container");
    }
    return CHIndex::from_serial(n, std::move(rank), arcs);
}

inline void write_box(std::ostream& out, const BoundingBox& b) {
    put_i64(out, b.min_x);
    put_i64(out, b.min_y);
    put_i64(out, b.max_x);
    put_i64(out, b.max_y);
}

inline BoundingBox read_box(std::istream& in) {
    BoundingBox b;
    b.min_x = get_i64(in);
    b.min_y = get_i64(in);
    b.max_x = get_i64(in);
    b.max_y = get_i64(in);
    if (!b.valid()) throw data_error("invalid bounding box in container");
    return b;
}

inline void write_quant(std::ostream& out, const Quantization& q) {
    write_box(out, q.box);
    put_u32(out, q.bits);
}

inline Quantization read_quant(std::istream& in) {
    Quantization q;
    q.box = read_box(in);
    q.bits = get_u32(in);
    if (q.bits < 1 || q.bits > 16) throw data_error("quantization bits out of range in container");
    return q;
}

inline void write_tnr_payload(std::ostream& out, const TNRIndex& idx) {
    put_u32(out, idx.grid.g);
    write_box(out, idx.grid.box);
    put_u64(out, idx.grid.cell.size());
    for (std::uint32_t c : idx.grid.cell) put_u32(out, c);
    put_u64(out, idx.access_union.size());
    for (Vertex v : idx.access_union) put_u32(out, v);
    for (Dist d : idx.access_table) put_u64(out, d);
    for (std::uint32_t o : idx.cell_offsets) put_u32(out, o);
    for (std::uint32_t a : idx.cell_access) put_u32(out, a);
    for (std::uint64_t o : idx.vertex_offsets) put_u64(out, o);
    for (Dist d : idx.vertex_dists) put_u64(out, d);
    put_u8(out, static_cast<std::uint8_t>(idx.fallback_kind));
    if (idx.fallback_kind == FallbackKind::ch) {
        if (!idx.fallback_ch) throw data_error("index is missing its embedded fallback");
        write_ch_payload(out, *idx.fallback_ch);
    }
}

inline TNRIndex read_tnr_payload(std::istream& in, const RoadNetwork& net) {
    TNRIndex idx;
    idx.grid.g = get_u32(in);
    if (idx.grid.g < 16) throw data_error("grid side out of range in container");
    idx.grid.box = read_box(in);
    std::size_t n = get_count(in, net.n(), "vertex");
    if (n != net.n()) throw data_error("container vertex count disagrees with the graph");
    idx.grid.cell.resize(n);
    for (std::uint32_t& c : idx.grid.cell) {
        c = get_u32(in);
        if (c >= idx.grid.cell_count()) throw data_error("cell id out of range in container");
    }
    std::size_t u = get_count(in, n, "access node");
    idx.access_union.resize(u);
    for (Vertex& v : idx.access_union) {
        v = get_u32(in);
        if (v >= n) throw data_error("access node out of range in container");
    }
    idx.access_table.resize(u * u);
    for (Dist& d : idx.access_table) d = get_u64(in);
    idx.cell_offsets.resize(idx.grid.cell_count() + 1);
    for (std::uint32_t& o : idx.cell_offsets) o = get_u32(in);
    for (std::size_t i = 1; i < idx.cell_offsets.size(); ++i)
        if (idx.cell_offsets[i] < idx.cell_offsets[i - 1])
            throw data_error("cell offsets not monotone in container");
    idx.cell_access.resize(idx.cell_offsets.back());
    for (std::uint32_t& a : idx.cell_access) {
        a = get_u32(in);
        if (a >= u) throw data_error("access index out of range in container");
    }
    idx.vertex_offsets.resize(n + 1);
    for (std::uint64_t& o : idx.vertex_offsets) o = get_u64(in);
    for (std::size_t i = 1; i < idx.vertex_offsets.size(); ++i)
        if (idx.vertex_offsets[i] < idx.vertex_offsets[i - 1])
            throw data_error("vertex offsets not monotone in container");
    idx.vertex_dists.resize(idx.vertex_offsets.back());
    for (Dist& d : idx.vertex_dists) d = get_u64(in);
    std::uint8_t fk = get_u8(in);
    if (fk > static_cast<std::uint8_t>(FallbackKind::bidijkstra))
        throw data_error("unknown fallback kind in container");
    idx.fallback_kind = static_cast<FallbackKind>(fk);
    if (idx.fallback_kind == FallbackKind::ch)
        idx.fallback_ch = std::make_shared<const CHIndex>(read_ch_payload(in, net.n()));
    idx.net = &net;
    return idx;
}

inline void write_silc_payload(std::ostream& out, const SILCIndex& idx) {
    write_quant(out, idx.quant);
    put_u64(out, idx.codes.size());
    for (MortonCode c : idx.codes) put_u32(out, c);
    put_u64(out, idx.maps.size());
    for (const ColoredIntervalMap& m : idx.maps) {
        put_u32(out, m.source);
        put_u64(out, m.intervals.size());
        for (const Interval& iv : m.intervals) {
            put_u32(out, iv.lo);
            put_u32(out, iv.hi);
            put_u32(out, iv.color);
        }
        put_u64(out, m.exceptions.size());
        for (const auto& [v, hop] : m.exceptions) {
            put_u32(out, v);
            put_u32(out, hop);
        }
    }
}

inline SILCIndex read_silc_payload(std::istream& in, std::size_t graph_n) {
    SILCIndex idx;
    idx.quant = read_quant(in);
    std::size_t n = get_count(in, graph_n, "vertex");
    if (n != graph_n) throw data_error("container vertex count disagrees with the graph");
    idx.codes.resize(n);
    for (MortonCode& c : idx.codes) c = get_u32(in);
    std::size_t maps = get_count(in, n, "source map");
    if (maps != n) throw data_error("container map count disagrees with the graph");
    idx.maps.resize(maps);
    for (ColoredIntervalMap& m : idx.maps) {
        m.source = get_u32(in);
        if (m.source >= n) throw data_error("map source out of range in container");
        std::size_t k = get_count(in, idx.quant.code_count(), "interval");
        m.intervals.resize(k);
        for (Interval& iv : m.intervals) {
            iv.lo = get_u32(in);
            iv.hi = get_u32(in);
            iv.color = get_u32(in);
            if (iv.hi < iv.lo) throw data_error("inverted interval in container");
            if (iv.color != kNoVertex && iv.color >= n)
                throw data_error("interval color out of range in container");
        }
        std::size_t e = get_count(in, n, "exception");
        m.exceptions.resize(e);
        for (auto& [v, hop] : m.exceptions) {
            v = get_u32(in);
            hop = get_u32(in);
            if (v >= n || (hop != kNoVertex && hop >= n))
                throw data_error("exception vertex out of range in container");
        }
    }
    return idx;
}

inline void write_psi(std::ostream& out, const Psi& p) {
    put_u8(out, static_cast<std::uint8_t>(p.kind));
    put_u32(out, p.a);
    put_u32(out, p.b);
}

inline Psi read_psi(std::istream& in, std::size_t n) {
    Psi p;
    std::uint8_t kind = get_u8(in);
    if (kind > static_cast<std::uint8_t>(PsiKind::unreachable))
        throw data_error("unknown split-element kind in container");
    p.kind = static_cast<PsiKind>(kind);
    p.a = get_u32(in);
    p.b = get_u32(in);
    if ((p.a != kNoVertex && p.a >= n) || (p.b != kNoVertex && p.b >= n))
        throw data_error("split element out of range in container");
    return p;
}

// unordered_map contents flattened in ascending key order
inline std::vector<std::pair<std::uint64_t, Psi>> sorted_entries(
    const std::unordered_map<std::uint64_t, Psi>& m) {
    std::vector<std::pair<std::uint64_t, Psi>> out(m.begin(), m.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

inline void write_pcpd_payload(std::ostream& out, const PCPSet& set) {
    write_quant(out, set.quant);
    put_u64(out, set.codes.size());
    for (MortonCode c : set.codes) put_u32(out, c);
    put_u64(out, set.by_depth.size());
    for (const auto& level : set.by_depth) {
        auto entries = sorted_entries(level);
        put_u64(out, entries.size());
        for (const auto& [key, psi] : entries) {
            put_u64(out, key);
            write_psi(out, psi);
        }
    }
    auto entries = sorted_entries(set.exceptions);
    put_u64(out, entries.size());
    for (const auto& [key, psi] : entries) {
        put_u64(out, key);
        write_psi(out, psi);
    }
}

inline PCPSet read_pcpd_payload(std::istream& in, std::size_t graph_n) {
    PCPSet set;
    set.quant = read_quant(in);
    std::size_t n = get_count(in, graph_n, "vertex");
    if (n != graph_n) throw data_error("container vertex count disagrees with the graph");
    set.codes.resize(n);
    for (MortonCode& c : set.codes) c = get_u32(in);
    std::size_t depths = get_count(in, set.quant.bits + 1, "depth level");
    if (depths != set.quant.bits + 1)
        throw data_error("container depth count disagrees with its quantization");
    set.by_depth.resize(depths);
    for (auto& level : set.by_depth) {
        std::size_t k = get_count(in, n * n, "stored pair");
        level.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            std::uint64_t key = get_u64(in);
            level.emplace(key, read_psi(in, n));
        }
    }
    std::size_t e = get_count(in, n * n, "exception pair");
    set.exceptions.reserve(e);
    for (std::size_t i = 0; i < e; ++i) {
        std::uint64_t key = get_u64(in);
        set.exceptions.emplace(key, read_psi(in, n));
    }
    set.rebuild_probe_table();
    return set;
}

inline void check_no_trailing(std::istream& in) {
    if (in.peek() != std::char_traits<char>::eof())
        throw data_error("trailing bytes after container payload");
}

}  // namespace container_detail

inline void store_index(std::ostream& out, const RoadNetwork& net, const CHIndex& idx) {
    container_detail::write_header(out, MethodTag::ch, graph_fingerprint(net));
    container_detail::write_ch_payload(out, idx);
}

inline void store_index(std::ostream& out, const RoadNetwork& net, const TNRIndex& idx) {
    container_detail::write_header(out, MethodTag::tnr, graph_fingerprint(net));
    container_detail::write_tnr_payload(out, idx);
}

inline void store_index(std::ostream& out, const RoadNetwork& net, const SILCIndex& idx) {
    container_detail::write_header(out, MethodTag::silc, graph_fingerprint(net));
    container_detail::write_silc_payload(out, idx);
}

inline void store_index(std::ostream& out, const RoadNetwork& net, const PCPSet& set) {
    container_detail::write_header(out, MethodTag::pcpd, graph_fingerprint(net));
    container_detail::write_pcpd_payload(out, set);
}

// One loaded index of whichever method the container holds. The pointer for
// the stored method is set; the rest stay null. TNR and baseline queries keep
// referring to `net`, so it must outlive the result.
struct LoadedIndex {
    MethodTag method = MethodTag::ch;
    std::shared_ptr<const CHIndex> ch;
    std::shared_ptr<const TNRIndex> tnr;
    std::shared_ptr<const SILCIndex> silc;
    std::shared_ptr<const PCPSet> pcpd;
};

inline LoadedIndex load_index(std::istream& in, const RoadNetwork& net) {
    using namespace container_detail;
    LoadedIndex li;
    li.method = read_header(in, net);
    switch (li.method) {
        case MethodTag::ch:
            li.ch = std::make_shared<const CHIndex>(read_ch_payload(in, net.n()));
            break;
        case MethodTag::tnr:
            li.tnr = std::make_shared<const TNRIndex>(read_tnr_payload(in, net));
            break;
        case MethodTag::silc:
            li.silc = std::make_shared<const SILCIndex>(read_silc_payload(in, net.n()));
            break;
        case MethodTag::pcpd:
            li.pcpd = std::make_shared<const PCPSet>(read_pcpd_payload(in, net.n()));
            break;
    }
    check_no_trailing(in);
    return li;
}

// Typed loaders for callers that know what they expect.
inline CHIndex load_ch_index(std::istream& in, const RoadNetwork& net) {
    if (container_detail::read_header(in, net) != MethodTag::ch)
        throw data_error("container does not hold the expected index type");
    CHIndex idx = container_detail::read_ch_payload(in, net.n());
    container_detail::check_no_trailing(in);
    return idx;
}

inline TNRIndex load_tnr_index(std::istream& in, const RoadNetwork& net) {
    if (container_detail::read_header(in, net) != MethodTag::tnr)
        throw data_error("container does not hold the expected index type");
    TNRIndex idx = container_detail::read_tnr_payload(in, net);
    container_detail::check_no_trailing(in);
    return idx;
}

inline SILCIndex load_silc_index(std::istream& in, const RoadNetwork& net) {
    if (container_detail::read_header(in, net) != MethodTag::silc)
        throw data_error("container does not hold the expected index type");
    SILCIndex idx = container_detail::read_silc_payload(in, net.n());
    container_detail::check_no_trailing(in);
    return idx;
}

inline PCPSet load_pcpd_index(std::istream& in, const RoadNetwork& net) {
    if (container_detail::read_header(in, net) != MethodTag::pcpd)
        throw data_error("container does not hold the expected index type");
    PCPSet set = container_detail::read_pcpd_payload(in, net.n());
    container_detail::check_no_trailing(in);
    return set;
}

}  // namespace roadbench
