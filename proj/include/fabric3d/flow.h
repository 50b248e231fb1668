#pragma once

#include "fabric3d/arch.h"
#include "fabric3d/blif.h"
#include "fabric3d/pack.h"
#include "fabric3d/place.h"
#include "fabric3d/report.h"
#include "fabric3d/route.h"
#include "fabric3d/rrg.h"
#include "fabric3d/timing.h"
#include "fabric3d/vertical.h"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fabric3d {

struct FabricModel;

// A device built once per configuration and shared read-only by every run
// on it.
struct Fabric
{
    ArchSpec spec;
    SitePlan plan;
    RoutingResourceGraph graph;
    VerticalCounts counts;
    std::shared_ptr<const FabricModel> model; // only when bitstreams are wanted
};

Fabric build_fabric(const ArchSpec &spec, uint64_t site_seed = 1, bool with_model = false);

struct Benchmark
{
    std::string name;
    std::string path;
    LogicNetlist netlist;
    int vectors = 0; // simulation vectors for bitstream checks; 0 skips them
};

// "name,blif,vectors" with a header row; blif paths are relative to the
// manifest's directory.
std::vector<Benchmark> load_manifest(const std::string &path);

struct FlowOptions
{
    PlaceParams place;
    RouteParams route;
    // Wall-clock routing time goes into route_ms; off keeps reports
    // byte-reproducible.
    bool measure_time = true;
    // When non-empty: <dir>/<benchmark>_s<seed>.route and, if the fabric has a
    // model, .bit next to it.
    std::string artifact_dir;
};

struct FlowResult
{
    ReportRow row;
    PackedNetlist packed;
    Placement placement;
    RoutingResult routing;
    StaResult timing;
};

// pack -> place -> route -> STA. Any failure is caught and reported in the
// row (ok=false, error set); the other fields are then partial.
FlowResult run_flow(const Fabric &fabric, const std::string &config_id, const Benchmark &bench, uint64_t seed,
                    const FlowOptions &opts = {});

} // namespace fabric3d
