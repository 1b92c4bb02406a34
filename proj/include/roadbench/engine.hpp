#pragma once

#include <memory>

#include "roadbench/container.hpp"
#include "roadbench/core.hpp"
#include "roadbench/dijkstra.hpp"
#include "roadbench/graph.hpp"
#include "roadbench/pcpd.hpp"
#include "roadbench/silc.hpp"
#include "roadbench/tnr.hpp"

namespace roadbench {

// ---------------------------------------------------------------------------
// Uniform point-to-point facade over every query method, including the
// no-index baseline. Engines carry per-instance scratch state, so each thread
// needs its own; the shared indexes themselves are read-only.
// ---------------------------------------------------------------------------

class TNREngine final : public ShortestPathEngine {
  public:
    TNREngine(const TNRIndex& idx, const RoadNetwork& net) : idx_(&idx), net_(&net) {}
    Dist distance(Vertex s, Vertex t) override { return tnr_distance(*idx_, s, t, &ws_); }
    Path path(Vertex s, Vertex t) override { return tnr_path(*idx_, *net_, s, t, &ws_); }

  private:
    const TNRIndex* idx_;
    const RoadNetwork* net_;
    TNRWorkspace ws_;
};

class SILCEngine final : public ShortestPathEngine {
  public:
    SILCEngine(const SILCIndex& idx, const RoadNetwork& net) : idx_(&idx), net_(&net) {}
    Dist distance(Vertex s, Vertex t) override { return silc_distance(*idx_, *net_, s, t); }
    Path path(Vertex s, Vertex t) override { return silc_path(*idx_, *net_, s, t); }

  private:
    const SILCIndex* idx_;
    const RoadNetwork* net_;
};

class PCPDEngine final : public ShortestPathEngine {
  public:
    PCPDEngine(const PCPSet& set, const RoadNetwork& net) : set_(&set), net_(&net) {}
    Dist distance(Vertex s, Vertex t) override { return pcpd_distance(*set_, *net_, s, t); }
    Path path(Vertex s, Vertex t) override { return pcpd_path(*set_, *net_, s, t); }

  private:
    const PCPSet* set_;
    const RoadNetwork* net_;
};

// Fresh engine for a loaded container; call once per querying thread.
inline std::unique_ptr<ShortestPathEngine> make_engine(const LoadedIndex& li,
                                                       const RoadNetwork& net) {
    switch (li.method) {
        case MethodTag::ch: return std::make_unique<CHEngine>(*li.ch);
        case MethodTag::tnr: return std::make_unique<TNREngine>(*li.tnr, net);
        case MethodTag::silc: return std::make_unique<SILCEngine>(*li.silc, net);
        case MethodTag::pcpd: return std::make_unique<PCPDEngine>(*li.pcpd, net);
    }
    throw data_error("unrecognized method tag");
}

// Bidirectional search with no preprocessing: the reference point all
// indexed methods are benchmarked against.
inline std::unique_ptr<ShortestPathEngine> make_baseline_engine(const RoadNetwork& net) {
    return std::make_unique<DijkstraEngine>(net);
}

}  // namespace roadbench
