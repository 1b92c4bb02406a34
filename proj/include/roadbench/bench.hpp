#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "roadbench/core.hpp"
#include "roadbench/engine.hpp"
#include "roadbench/parallel.hpp"

namespace roadbench {

// ---------------------------------------------------------------------------
// Query timing and the CSV rows the harness emits. Latency is monotonic wall
// time per query, averaged over the set, after an untimed warm-up pass over
// the set's first kWarmupQueries entries.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kWarmupQueries = 10;

struct BuildRow {
    std::string dataset, method;
    double seconds = 0;        // preprocessing wall time, I/O excluded
    std::uint64_t bytes = 0;   // serialized container size
};

struct QueryRow {
    std::string dataset, method, queryset, mode;
    std::size_t queries = 0;
    double mean_us = 0;  // meaningless when queries == 0 (latency column left blank)
};

struct TimingResult {
    std::size_t count = 0;
    double mean_us = 0;
    // order-sensitive digest of every answer (distance, or path length and
    // hop count); identical runs must produce identical digests
    std::uint64_t digest = 1469598103934665603ull;
};

namespace bench_detail {

inline void digest_u64(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= static_cast<std::uint8_t>(v >> (8 * i));
        h *= 1099511628211ull;
    }
}

inline std::uint64_t answer_digest(ShortestPathEngine& eng, Vertex s, Vertex t, bool path_mode) {
    std::uint64_t h = 0;
    if (path_mode) {
        Path p = eng.path(s, t);
        h = p.length;
        digest_u64(h, p.vertices.size());
    } else {
        h = eng.distance(s, t);
    }
    return h;
}

}  // namespace bench_detail

// Times one engine over one query set. The digest folds in every answer, so
// two runs agree on results iff their digests agree.
inline TimingResult time_query_batch(ShortestPathEngine& eng,
                                     const std::vector<std::pair<Vertex, Vertex>>& pairs,
                                     bool path_mode, std::size_t warmup = kWarmupQueries) {
    TimingResult res;
    res.count = pairs.size();
    if (pairs.empty()) return res;

    for (std::size_t i = 0; i < warmup && i < pairs.size(); ++i)
        bench_detail::answer_digest(eng, pairs[i].first, pairs[i].second, path_mode);

    using clock = std::chrono::steady_clock;
    std::uint64_t total_ns = 0;
    for (auto [s, t] : pairs) {
        auto t0 = clock::now();
        std::uint64_t h = bench_detail::answer_digest(eng, s, t, path_mode);
        auto t1 = clock::now();
        total_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
        bench_detail::digest_u64(res.digest, h);
    }
    res.mean_us = static_cast<double>(total_ns) / 1000.0 / static_cast<double>(pairs.size());
    return res;
}

struct ThroughputResult {
    std::size_t count = 0;
    double wall_seconds = 0;
    double queries_per_second = 0;
    std::uint64_t digest = 1469598103934665603ull;
};

// Optional throughput mode: the set is shared across a worker pool, one
// engine per worker. Per-query answers are collected and folded in query
// order, so the digest matches the single-threaded one.
inline ThroughputResult time_query_throughput(
    const std::function<std::unique_ptr<ShortestPathEngine>()>& make,
    const std::vector<std::pair<Vertex, Vertex>>& pairs, bool path_mode, unsigned threads) {
    ThroughputResult res;
    res.count = pairs.size();
    if (pairs.empty()) return res;

    unsigned worker_count = std::max(1u, threads);
    std::vector<std::unique_ptr<ShortestPathEngine>> engines(worker_count);
    std::vector<std::uint64_t> answers(pairs.size());

    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    detail::parallel_for(static_cast<std::uint32_t>(pairs.size()), threads,
                         [&](std::uint32_t i, unsigned w) {
                             if (!engines[w]) engines[w] = make();
                             answers[i] = bench_detail::answer_digest(
                                 *engines[w], pairs[i].first, pairs[i].second, path_mode);
                         });
    auto t1 = clock::now();
    res.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    if (res.wall_seconds > 0)
        res.queries_per_second = static_cast<double>(pairs.size()) / res.wall_seconds;
    for (std::uint64_t h : answers) bench_detail::digest_u64(res.digest, h);
    return res;
}

// --- CSV emission ----------------------------------------------------------
// build CSV:  dataset,method,build_seconds,index_bytes
// query CSV:  dataset,method,queryset,mode,queries,mean_us
// The latency cell is blank for an empty set.

inline void write_build_csv_header(std::ostream& out) {
    out << "# build stats; wall time excludes container I/O\n";
    out << "dataset,method,build_seconds,index_bytes\n";
}

inline void write_build_row(std::ostream& out, const BuildRow& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", r.seconds);
    out << r.dataset << ',' << r.method << ',' << buf << ',' << r.bytes << '\n';
}

inline void write_query_csv_header(std::ostream& out, std::size_t warmup = kWarmupQueries) {
    out << "# mean wall latency per query; warmup=" << warmup
        << " untimed queries per set; timing excludes deserialization\n";
    out << "dataset,method,queryset,mode,queries,mean_us\n";
}

inline void write_query_row(std::ostream& out, const QueryRow& r) {
    out << r.dataset << ',' << r.method << ',' << r.queryset << ',' << r.mode << ','
        << r.queries << ',';
    if (r.queries > 0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", r.mean_us);
        out << buf;
    }
    out << '\n';
}

// Minimal CSV line splitter for the report command and tests (no quoting in
// any schema this tool emits).
inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace roadbench
