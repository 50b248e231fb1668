#pragma once

#include "fabric3d/delay.h"
#include "fabric3d/pack.h"
#include "fabric3d/routing.h"

#include <string>
#include <vector>

namespace fabric3d {

// Generic longest-path timing graph. Start nodes launch at time 0; nodes with
// no fan-in also sit at 0. End nodes are where paths are timed.
struct TimingGraph
{
    struct Arc
    {
        int from;
        int to;
        double delay_ps;
    };
    std::vector<std::string> names;
    std::vector<uint8_t> is_end;
    std::vector<Arc> arcs;

    int add_node(std::string name, bool end = false)
    {
        names.push_back(std::move(name));
        is_end.push_back(end);
        return static_cast<int>(names.size()) - 1;
    }
    void add_arc(int from, int to, double delay_ps) { arcs.push_back({from, to, delay_ps}); }
};

struct TimingAnalysis
{
    double cpd_ps = 0;
    std::vector<int> critical_path; // node ids, launch first
    std::vector<double> arrival;
    std::vector<double> required; // +inf where no end node is reachable
};

// Throws on a combinational loop, naming the nodes left unordered.
TimingAnalysis analyze_timing(const TimingGraph &g);

struct StaResult
{
    double cpd_ps = 0;
    std::vector<std::string> critical_path;
    // Per packed net: worst slack over its sinks; per sink slack alongside.
    std::vector<double> net_slack_ps;
    std::vector<std::vector<double>> sink_slack_ps;
};

// `conn_delay[n][i]` is the interconnect delay from net n's driver to its i-th
// sink terminal. Intra-cluster feedback is free; each LUT adds lut_ps and each
// flip-flop D endpoint adds setup_ps.
StaResult sta_from_delays(const PackedNetlist &p, const std::vector<std::vector<double>> &conn_delay,
                          const DelayModel &model);

// Connection delays along routed trees, re-evaluated under `model`.
std::vector<std::vector<double>> connection_delays(const RoutingResult &r, const RoutingResourceGraph &g,
                                                   const DelayModel &model);

StaResult sta(const RoutingResult &r, const PackedNetlist &p, const RoutingResourceGraph &g, const DelayModel &model);

} // namespace fabric3d
