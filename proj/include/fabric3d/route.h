#pragma once

#include "fabric3d/common.h"
#include "fabric3d/delay.h"
#include "fabric3d/pack.h"
#include "fabric3d/place.h"
#include "fabric3d/routing.h"
#include "fabric3d/rrg.h"

namespace fabric3d {

class UnroutableError : public Error
{
  public:
    using Error::Error;
};

struct RouteParams
{
    int max_iters = 50;
    double first_pres_fac = 0.5;
    double pres_fac_mult = 1.5;
    double hist_fac = 1.0;
    bool timing_driven = true;
    double crit_exp = 1.0;
    double max_crit = 0.99;
    double wz = 1.0;
};

// RRG source and per-terminal sink nodes of every packed net.
struct NetTerminals
{
    int source = -1;
    std::vector<int> sinks;
};
std::vector<NetTerminals> net_terminals(const PackedNetlist &p, const Placement &pl, const RoutingResourceGraph &g);

// PathFinder negotiated congestion with criticality-weighted costs. Throws
// UnroutableError listing overused nodes when max_iters is exhausted.
RoutingResult route(const PackedNetlist &p, const Placement &pl, const RoutingResourceGraph &g,
                    const DelayModel &model, const RouteParams &params = {});

// Independent legality check: recount occupancy from the trees, verify every
// tree is connected through real edges, acyclic, rooted at the source and
// reaching every sink. Returns a list of problems (empty when legal).
std::vector<std::string> check_routing(const RoutingResult &r, const RoutingResourceGraph &g,
                                       const std::vector<NetTerminals> &terms);

} // namespace fabric3d
