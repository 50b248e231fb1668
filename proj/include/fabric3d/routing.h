#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fabric3d {

class RoutingResourceGraph;

// One routed net. `nodes` holds the tree root first and every node after its
// parent; `edges[i]` is the RRG edge driving nodes[i] (-1 for the root).
struct RouteTree
{
    std::string name;
    int source = -1;
    std::vector<int> sinks;
    std::vector<int> nodes;
    std::vector<int> edges;
};

struct RoutingResult
{
    bool success = false;
    int iterations = 0;
    std::vector<RouteTree> nets;
    std::vector<int> occupancy;
    // Tile units: channel spans plus one per used CHANZ pair (weighted).
    double wirelength = 0;
    std::vector<double> net_delay_ps;
    long heap_pops = 0; // router work, independent of machine speed
    std::string error;
};

// Total wirelength of the given trees: CHANX/CHANY spans plus `wz` per
// vertical via.
double routed_wirelength(const RoutingResourceGraph &g, const std::vector<RouteTree> &nets, double wz = 1.0);

// Average number of routed edges per net whose endpoints lie on different
// layers, over nets with at least one sink.
double count_layer_crossings(const RoutingResult &r, const RoutingResourceGraph &g);

// "NET <name>: <ids>" lines, one per net, then a SUMMARY line. Within a net the
// ids walk the tree depth first; an id already listed marks a branch point and
// the walk resumes from it.
std::string write_route_dump(const RoutingResult &r, const RoutingResourceGraph &g, double cpd_ps);
// Rebuilds trees (names, nodes, edges, source and sinks) from a dump.
RoutingResult read_route_dump(std::string_view text, const RoutingResourceGraph &g);

} // namespace fabric3d
