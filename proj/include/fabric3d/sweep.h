#pragma once

#include "fabric3d/arch.h"
#include "fabric3d/flow.h"
#include "fabric3d/report.h"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace fabric3d {

struct SweepConfig
{
    std::string id;
    ArchSpec spec;
};

struct ExperimentConfig
{
    std::vector<SweepConfig> configs; // explicit entries first, then the expanded sweep
    std::vector<Benchmark> benchmarks;
    std::vector<uint64_t> seeds{1};
    int parallelism = 1;
    std::string baseline;
    bool measure_time = true;
    uint64_t site_seed = 1;
    // When set, the CLI writes report.csv here; with `artifacts`, run_sweep
    // leaves route dumps (and bitstreams) under <output_dir>/artifacts/<id>/.
    std::string output_dir;
    bool artifacts = true;
    bool bitstreams = true;
    FlowOptions flow;
};

// JSON document; relative paths resolve against `base_dir`. Config ids are
// built from the swept axes, e.g. "SB_p50_Perimeter_patsubset_r0.5", and must
// be unique.
ExperimentConfig parse_experiment(std::string_view text, const std::string &base_dir);
ExperimentConfig load_experiment(const std::string &path);

using SweepProgress = std::function<void(const ReportRow &)>;

// Every (config, benchmark, seed) on a pool of `parallelism` threads. Rows
// come back sorted by config id, benchmark, seed regardless of scheduling.
std::vector<ReportRow> run_sweep(const ExperimentConfig &cfg, const SweepProgress &progress = {});

} // namespace fabric3d
