// Road-network index benchmark CLI.
//
//   roadbench build        construct an index and persist it as a container
//   roadbench query        time a persisted index over query-set files
//   roadbench verify       compare every index's answers against the baseline
//   roadbench gen-queries  emit bucketed query-set files from a seed
//   roadbench redundancy   measure core-disjoint detour ratios
//   roadbench report       merge stats CSVs into per-dataset tables
//
// Exit codes: 0 ok, 1 usage, 2 verification failure, 3 data error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "roadbench/bench.hpp"
#include "roadbench/container.hpp"
#include "roadbench/dimacs.hpp"
#include "roadbench/engine.hpp"
#include "roadbench/rng.hpp"
#include "roadbench/workload.hpp"

namespace fs = std::filesystem;
using namespace roadbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitDataError = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

LoadResult load_graph(const std::string& gr_path, const std::string& co_path) {
    std::ifstream gr(gr_path);
    if (!gr) throw data_error("cannot open graph file " + gr_path);
    if (co_path.empty()) return load_dimacs(gr);
    std::ifstream co(co_path);
    if (!co) throw data_error("cannot open coordinate file " + co_path);
    return load_dimacs(gr, co);
}

std::string default_dataset(const std::string& gr_path) {
    return fs::path(gr_path).stem().string();
}

// Streams rows into `path` (header added only when the file is new/empty),
// or to stdout when no path was given.
class CsvSink {
  public:
    explicit CsvSink(const std::string& path) {
        if (path.empty()) return;
        std::error_code ec;
        auto size = fs::file_size(path, ec);
        fresh_ = ec || size == 0;
        file_.open(path, std::ios::app);
        if (!file_) throw data_error("cannot open csv file " + path);
    }
    std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    bool needs_header() const { return !file_.is_open() || fresh_; }

  private:
    std::ofstream file_;
    bool fresh_ = true;
};

QuerySet load_query_file(const std::string& path, const RoadNetwork& net) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open query file " + path);
    return parse_query_set(in, net);
}

std::string dist_str(Dist d) {
    return d >= kInfDist ? "inf" : std::to_string(d);
}

// Structural path check: endpoints match, every hop is an edge, the recorded
// length is the sum of edge weights and equals `want`.
bool valid_path(const RoadNetwork& net, const Path& p, Vertex s, Vertex t, Dist want) {
    if (want >= kInfDist) return p.empty();
    if (p.empty() || p.front() != s || p.back() != t) return false;
    Dist sum = 0;
    for (std::size_t i = 1; i < p.vertices.size(); ++i) {
        auto w = net.edge_weight(p.vertices[i - 1], p.vertices[i]);
        if (!w) return false;
        sum += *w;
    }
    return sum == p.length && p.length == want;
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

struct BuildArgs {
    std::string method, graph, coords, out, dataset, stats_csv;
    std::uint32_t grid = 128;
    std::string fallback = "ch";
    std::uint32_t bits = 16;
    unsigned threads = 1;
};

int cmd_build(const BuildArgs& a) {
    MethodTag tag;
    if (!parse_method(a.method, tag)) throw UsageError("unknown method '" + a.method + "'");
    bool needs_coords = tag != MethodTag::ch;
    if (needs_coords && a.coords.empty())
        throw UsageError("--coords is required for method '" + a.method + "'");

    LoadResult loaded = load_graph(a.graph, a.coords);
    const RoadNetwork& net = loaded.net;
    std::cerr << "graph: " << net.n() << " vertices, " << net.undirected_edge_count()
              << " edges";
    if (loaded.report.build.dropped_component_vertices > 0)
        std::cerr << " (" << loaded.report.build.dropped_component_vertices
                  << " outside the largest component dropped)";
    std::cerr << '\n';

    if (tag == MethodTag::silc && net.n() > 1000000)
        std::cerr << "warning: per-source interval maps on " << net.n()
                  << " vertices will need far more memory than typical machines have\n";

    using clock = std::chrono::steady_clock;
    std::ostringstream bytes(std::ios::binary);
    double seconds = 0;
    switch (tag) {
        case MethodTag::ch: {
            auto t0 = clock::now();
            CHIndex idx = build_ch(net);
            seconds = std::chrono::duration<double>(clock::now() - t0).count();
            store_index(bytes, net, idx);
            std::cerr << "ch: " << idx.shortcut_count << " shortcuts\n";
            break;
        }
        case MethodTag::tnr: {
            FallbackKind fk;
            if (a.fallback == "ch") fk = FallbackKind::ch;
            else if (a.fallback == "bidijkstra") fk = FallbackKind::bidijkstra;
            else throw UsageError("unknown fallback '" + a.fallback + "'");
            TNRBuildStats stats;
            auto t0 = clock::now();
            Grid grid = build_grid(net, a.grid);
            TNRIndex idx = build_tnr(net, grid, fk, a.threads, {}, &stats);
            seconds = std::chrono::duration<double>(clock::now() - t0).count();
            store_index(bytes, net, idx);
            std::cerr << "tnr: " << stats.union_size << " transit nodes over "
                      << stats.nonempty_cells << " cells, mean " << stats.mean_access_nodes
                      << " access nodes/cell\n";
            break;
        }
        case MethodTag::silc: {
            SILCBuildStats stats;
            auto t0 = clock::now();
            SILCIndex idx = build_silc(net, a.bits, a.threads, &stats);
            seconds = std::chrono::duration<double>(clock::now() - t0).count();
            store_index(bytes, net, idx);
            std::cerr << "silc: " << stats.intervals << " intervals, " << stats.exceptions
                      << " exceptions\n";
            break;
        }
        case MethodTag::pcpd: {
            PCPBuildStats stats;
            auto t0 = clock::now();
            PCPSet set = build_pcp_set(net, a.bits, a.threads, &stats);
            seconds = std::chrono::duration<double>(clock::now() - t0).count();
            store_index(bytes, net, set);
            std::cerr << "pcpd: " << stats.pairs << " stored pairs, " << stats.exceptions
                      << " exceptions\n";
            break;
        }
    }

    std::string blob = bytes.str();
    {
        std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot open output file " + a.out);
        out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
        if (!out) throw data_error("failed writing container " + a.out);
    }

    BuildRow row{a.dataset.empty() ? default_dataset(a.graph) : a.dataset, a.method, seconds,
                 blob.size()};
    CsvSink sink(a.stats_csv);
    if (sink.needs_header()) write_build_csv_header(sink.out());
    write_build_row(sink.out(), row);
    std::cerr << "build: " << a.method << " in " << seconds << " s, " << blob.size()
              << " bytes -> " << a.out << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// query
// ---------------------------------------------------------------------------

struct QueryArgs {
    std::string index, graph, coords, mode = "distance", csv, dataset;
    std::vector<std::string> queries;
    bool verify_paths = false;
    bool force = false;
    std::uint64_t ram_budget_mb = 24576;
    unsigned throughput_threads = 0;
};

int cmd_query(const QueryArgs& a) {
    std::error_code ec;
    auto container_size = fs::file_size(a.index, ec);
    if (ec) throw data_error("cannot stat index file " + a.index);
    if (container_size > a.ram_budget_mb * 1024 * 1024 && !a.force)
        throw UsageError("container is " + std::to_string(container_size >> 20) +
                         " MiB, over the " + std::to_string(a.ram_budget_mb) +
                         " MiB RAM budget; pass --force to benchmark anyway");

    LoadResult loaded = load_graph(a.graph, a.coords);
    const RoadNetwork& net = loaded.net;

    std::ifstream in(a.index, std::ios::binary);
    if (!in) throw data_error("cannot open index file " + a.index);
    LoadedIndex li = load_index(in, net);
    std::string method = method_name(li.method);
    bool path_mode = a.mode == "path";

    CsvSink sink(a.csv);
    if (sink.needs_header()) write_query_csv_header(sink.out());
    std::string dataset = a.dataset.empty() ? default_dataset(a.graph) : a.dataset;

    int exit_code = kExitOk;
    auto engine = make_engine(li, net);
    for (const std::string& qfile : a.queries) {
        QuerySet qs = load_query_file(qfile, net);
        if (a.throughput_threads > 1) {
            auto factory = [&li, &net] { return make_engine(li, net); };
            ThroughputResult r =
                time_query_throughput(factory, qs.pairs, path_mode, a.throughput_threads);
            std::cerr << "throughput " << qs.label << ": " << r.count << " queries in "
                      << r.wall_seconds << " s (" << r.queries_per_second << "/s, "
                      << a.throughput_threads << " workers)\n";
            continue;  // pooled runs measure throughput, not per-query latency
        }
        TimingResult r = time_query_batch(*engine, qs.pairs, path_mode);
        write_query_row(sink.out(),
                        {dataset, method, qs.label, a.mode, r.count, r.mean_us});
        std::cerr << qs.label << ": " << r.count << " queries, mean " << r.mean_us << " us\n";

        if (path_mode && a.verify_paths) {
            for (auto [s, t] : qs.pairs) {
                Path p = engine->path(s, t);
                Dist want = engine->distance(s, t);
                if (!valid_path(net, p, s, t, want)) {
                    std::cout << "FAIL method=" << method << " s=" << net.original_id(s)
                              << " t=" << net.original_id(t) << " malformed path (length "
                              << dist_str(p.length) << ", want " << dist_str(want) << ")\n";
                    exit_code = kExitVerifyFailed;
                }
            }
        }
    }
    return exit_code;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string graph, coords;
    std::vector<std::string> indexes;
    std::uint64_t pairs = 1000;
    std::uint64_t seed = 1;
};

int cmd_verify(const VerifyArgs& a) {
    LoadResult loaded = load_graph(a.graph, a.coords);
    const RoadNetwork& net = loaded.net;

    std::vector<LoadedIndex> indexes;
    std::vector<std::unique_ptr<ShortestPathEngine>> engines;
    for (const std::string& path : a.indexes) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw data_error("cannot open index file " + path);
        indexes.push_back(load_index(in, net));
        engines.push_back(make_engine(indexes.back(), net));
    }

    auto rng = substream(a.seed, 0);
    auto baseline = make_baseline_engine(net);
    std::size_t failures = 0;
    for (std::uint64_t i = 0; i < a.pairs; ++i) {
        auto s = static_cast<Vertex>(rng.next_below(net.n()));
        auto t = static_cast<Vertex>(rng.next_below(net.n()));
        Dist want = baseline->distance(s, t);
        for (std::size_t m = 0; m < engines.size(); ++m) {
            const char* name = method_name(indexes[m].method);
            std::string got;
            // a query that throws on a broken index is a finding, not a crash
            try {
                Dist d = engines[m]->distance(s, t);
                if (d == want) {
                    Path p = engines[m]->path(s, t);
                    if (valid_path(net, p, s, t, want) || (s == t && p.length == 0)) continue;
                    got = "malformed-path";
                } else {
                    got = dist_str(d);
                }
            } catch (const data_error&) {
                got = "query-error";
            }
            std::cout << "FAIL method=" << name << " s=" << net.original_id(s)
                      << " t=" << net.original_id(t) << " got=" << got
                      << " want=" << dist_str(want) << '\n';
            ++failures;
        }
    }
    if (failures > 0) {
        std::cout << "verify: " << failures << " failures over " << a.pairs << " pairs\n";
        return kExitVerifyFailed;
    }
    std::cout << "verify: " << a.indexes.size() << " indexes, " << a.pairs
              << " pairs, all answers exact\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// gen-queries
// ---------------------------------------------------------------------------

struct GenArgs {
    std::string graph, coords, kind = "linf", out_dir = ".";
    std::uint64_t count = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

int cmd_gen_queries(const GenArgs& a) {
    LoadResult loaded = load_graph(a.graph, a.coords);
    const RoadNetwork& net = loaded.net;

    std::array<QuerySet, 10> sets = a.kind == "linf"
                                        ? gen_linf_sets(net, a.count, a.seed)
                                        : gen_network_sets(net, a.count, a.seed, a.threads);
    fs::create_directories(a.out_dir);
    for (const QuerySet& qs : sets) {
        fs::path file = fs::path(a.out_dir) / (qs.label + ".txt");
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot open output file " + file.string());
        std::string text = format_query_set(qs, net);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        std::cerr << qs.label << ": " << qs.pairs.size() << '/' << qs.requested << " pairs"
                  << (qs.complete() ? "" : " (bucket unfillable at this extent)") << " -> "
                  << file.string() << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// redundancy
// ---------------------------------------------------------------------------

struct RedundancyArgs {
    std::string graph, coords, csv;
    std::vector<std::string> queries;
    unsigned threads = 1;
};

int cmd_redundancy(const RedundancyArgs& a) {
    LoadResult loaded = load_graph(a.graph, a.coords);
    const RoadNetwork& net = loaded.net;

    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (const std::string& qfile : a.queries) {
        QuerySet qs = load_query_file(qfile, net);
        pairs.insert(pairs.end(), qs.pairs.begin(), qs.pairs.end());
    }
    RedundancyReport rep = measure_delta(net, pairs, a.threads);

    std::size_t unreachable = 0;
    for (const DeltaRow& r : rep.rows)
        if (r.len_p == kInfDist) ++unreachable;

    CsvSink sink(a.csv);
    std::ostream& out = sink.out();
    char head[160];
    std::snprintf(head, sizeof head,
                  "# core-disjoint detours; min_ratio=%.6f no_core_disjoint=%zu unreachable=%zu\n",
                  rep.min_ratio, rep.no_path, unreachable);
    out << head << "s,t,len_p,len_pprime,ratio\n";
    for (const DeltaRow& r : rep.rows) {
        out << net.original_id(r.s) << ',' << net.original_id(r.t) << ',';
        if (r.len_p == kInfDist) {
            out << ",,\n";  // the pair itself is disconnected
            continue;
        }
        out << r.len_p << ',';
        if (!r.has_alternative()) {
            out << ",\n";  // no route survives removing the interior
            continue;
        }
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.6f", r.ratio());
        out << r.len_pprime << ',' << buf << '\n';
    }
    std::cerr << "redundancy: " << pairs.size() << " pairs, min ratio " << rep.min_ratio << ", "
              << rep.no_path << " without a core-disjoint alternative, " << unreachable
              << " disconnected\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> csvs;
    std::string out;
};

struct LabelOrder {
    bool operator()(const std::string& a, const std::string& b) const {
        auto split = [](const std::string& s) {
            std::size_t i = 0;
            while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            long num = -1;
            if (i < s.size()) num = std::strtol(s.c_str() + i, nullptr, 10);
            return std::make_pair(s.substr(0, i), num);
        };
        auto [ap, an] = split(a);
        auto [bp, bn] = split(b);
        if (ap != bp) return ap < bp;
        if (an != bn) return an < bn;
        return a < b;
    }
};

int cmd_report(const ReportArgs& a) {
    static const std::vector<std::string> kBuildHeader = {"dataset", "method", "build_seconds",
                                                         "index_bytes"};
    static const std::vector<std::string> kQueryHeader = {"dataset", "method",  "queryset",
                                                          "mode",    "queries", "mean_us"};

    std::vector<std::vector<std::string>> build_rows, query_rows;
    for (const std::string& path : a.csvs) {
        std::ifstream in(path);
        if (!in) throw data_error("cannot open csv file " + path);
        std::string line;
        std::size_t lineno = 0;
        enum class Schema { none, build, query } schema = Schema::none;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            auto cells = split_csv(line);
            if (cells == kBuildHeader) {
                schema = Schema::build;
                continue;
            }
            if (cells == kQueryHeader) {
                schema = Schema::query;
                continue;
            }
            if (schema == Schema::build && cells.size() == kBuildHeader.size())
                build_rows.push_back(std::move(cells));
            else if (schema == Schema::query && cells.size() == kQueryHeader.size())
                query_rows.push_back(std::move(cells));
            else
                throw parse_error(lineno, "row in " + path + " does not match any known schema");
        }
    }

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out, std::ios::trunc);
        if (!file) throw data_error("cannot open output file " + a.out);
    }
    std::ostream& out = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;

    // fixed column order: baseline-free methods in their usual comparison order
    auto method_rank = [](const std::string& m) {
        static const std::vector<std::string> order = {"bidi", "ch", "tnr", "silc", "pcpd"};
        for (std::size_t i = 0; i < order.size(); ++i)
            if (order[i] == m) return static_cast<int>(i);
        return 100;
    };

    std::sort(build_rows.begin(), build_rows.end(), [&](const auto& x, const auto& y) {
        if (x[0] != y[0]) return x[0] < y[0];
        if (method_rank(x[1]) != method_rank(y[1])) return method_rank(x[1]) < method_rank(y[1]);
        return x[1] < y[1];
    });
    out << "# space and preprocessing time per dataset\n";
    out << "dataset,method,build_seconds,index_bytes\n";
    for (const auto& r : build_rows) out << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << '\n';

    // pivot: one row per (dataset, queryset, mode); one latency column per method
    std::vector<std::string> methods;
    for (const auto& r : query_rows)
        if (std::find(methods.begin(), methods.end(), r[1]) == methods.end())
            methods.push_back(r[1]);
    std::sort(methods.begin(), methods.end(), [&](const std::string& x, const std::string& y) {
        return method_rank(x) != method_rank(y) ? method_rank(x) < method_rank(y) : x < y;
    });

    struct RowKey {
        std::string dataset, queryset, mode;
        bool operator<(const RowKey& o) const {
            if (dataset != o.dataset) return dataset < o.dataset;
            LabelOrder lo;
            if (queryset != o.queryset) return lo(queryset, o.queryset);
            return mode < o.mode;
        }
    };
    std::map<RowKey, std::map<std::string, std::pair<std::string, std::string>>> pivot;
    for (const auto& r : query_rows)
        pivot[{r[0], r[2], r[3]}][r[1]] = {r[4], r[5]};

    out << "# mean query latency (us) per dataset, query set, and mode\n";
    out << "dataset,queryset,mode,queries";
    for (const std::string& m : methods) out << ',' << m << "_us";
    out << '\n';
    for (const auto& [key, cells] : pivot) {
        std::string count;
        bool count_consistent = true;
        for (const auto& [m, cell] : cells) {
            if (count.empty()) count = cell.first;
            else if (count != cell.first) count_consistent = false;
        }
        out << key.dataset << ',' << key.queryset << ',' << key.mode << ','
            << (count_consistent ? count : "");
        for (const std::string& m : methods) {
            auto it = cells.find(m);
            out << ',' << (it == cells.end() ? "" : it->second.second);
        }
        out << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"road-network index benchmark"};
    app.require_subcommand(1);

    BuildArgs build;
    CLI::App* b = app.add_subcommand("build", "construct and persist an index");
    b->add_option("--method", build.method, "ch|tnr|silc|pcpd")->required();
    b->add_option("--graph", build.graph, "graph file (.gr)")->required();
    b->add_option("--coords", build.coords, "coordinate file (.co)");
    b->add_option("--out", build.out, "container output path")->required();
    b->add_option("--grid", build.grid, "grid cells per side (tnr)");
    b->add_option("--fallback", build.fallback, "local-query fallback: ch|bidijkstra (tnr)")
        ->check(CLI::IsMember({"ch", "bidijkstra"}));
    b->add_option("--bits", build.bits, "quantization bits per axis (silc/pcpd)")
        ->check(CLI::Range(1u, 16u));
    b->add_option("--threads", build.threads, "build worker threads");
    b->add_option("--dataset", build.dataset, "dataset label for stats rows");
    b->add_option("--stats-csv", build.stats_csv, "append build stats to this CSV");

    QueryArgs query;
    CLI::App* q = app.add_subcommand("query", "benchmark a persisted index");
    q->add_option("--index", query.index, "container file")->required();
    q->add_option("--graph", query.graph, "graph file (.gr)")->required();
    q->add_option("--coords", query.coords, "coordinate file (.co)");
    q->add_option("--queries", query.queries, "query-set files")->required()->expected(-1);
    q->add_option("--mode", query.mode, "distance|path")
        ->check(CLI::IsMember({"distance", "path"}));
    q->add_option("--csv", query.csv, "append latency rows to this CSV");
    q->add_option("--dataset", query.dataset, "dataset label for CSV rows");
    q->add_flag("--verify-paths", query.verify_paths, "recheck each returned path (path mode)");
    q->add_option("--ram-budget-mb", query.ram_budget_mb,
                  "refuse containers larger than this budget");
    q->add_flag("--force", query.force, "benchmark even over the RAM budget");
    q->add_option("--throughput-threads", query.throughput_threads,
                  "run a pooled throughput measurement instead of latency");

    VerifyArgs verify;
    CLI::App* v = app.add_subcommand("verify", "check indexes against the baseline oracle");
    v->add_option("--graph", verify.graph, "graph file (.gr)")->required();
    v->add_option("--coords", verify.coords, "coordinate file (.co)");
    v->add_option("--indexes", verify.indexes, "container files")->required()->expected(-1);
    v->add_option("--pairs", verify.pairs, "random pairs to sample");
    v->add_option("--seed", verify.seed, "sampling seed");

    GenArgs gen;
    CLI::App* g = app.add_subcommand("gen-queries", "emit bucketed query-set files");
    g->add_option("--graph", gen.graph, "graph file (.gr)")->required();
    g->add_option("--coords", gen.coords, "coordinate file (.co)");
    g->add_option("--kind", gen.kind, "linf (straight-line buckets) | network (distance buckets)")
        ->check(CLI::IsMember({"linf", "network"}));
    g->add_option("--count", gen.count, "pairs requested per bucket");
    g->add_option("--seed", gen.seed, "generation seed");
    g->add_option("--out-dir", gen.out_dir, "directory for the ten set files");
    g->add_option("--threads", gen.threads, "sampling worker threads (network kind)");

    RedundancyArgs redundancy;
    CLI::App* r = app.add_subcommand("redundancy", "measure core-disjoint detour ratios");
    r->add_option("--graph", redundancy.graph, "graph file (.gr)")->required();
    r->add_option("--coords", redundancy.coords, "coordinate file (.co)");
    r->add_option("--queries", redundancy.queries, "query-set files")->required()->expected(-1);
    r->add_option("--csv", redundancy.csv, "write the ratio table to this CSV");
    r->add_option("--threads", redundancy.threads, "measurement worker threads");

    ReportArgs report;
    CLI::App* p = app.add_subcommand("report", "merge stats CSVs into summary tables");
    p->add_option("--csv", report.csvs, "stats CSV files from build/query")
        ->required()
        ->expected(-1);
    p->add_option("--out", report.out, "write the merged tables here (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (b->parsed()) return cmd_build(build);
        if (q->parsed()) return cmd_query(query);
        if (v->parsed()) return cmd_verify(verify);
        if (g->parsed()) return cmd_gen_queries(gen);
        if (r->parsed()) return cmd_redundancy(redundancy);
        if (p->parsed()) return cmd_report(report);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitUsage;
}
