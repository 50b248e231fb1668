#pragma once

#include "fabric3d/pack.h"
#include "fabric3d/rrg.h"

#include <cstdint>
#include <limits>
#include <vector>

namespace fabric3d {

struct Loc
{
    int layer = -1;
    int x = -1;
    int y = -1;
    int sub = 0; // pad slot within an IO tile
    bool operator==(const Loc &) const = default;
};

struct PlaceParams
{
    double interlayer_move_prob = 0.10;
    double inner_num = 10.0;
    double alpha = 0.95;
    int t0_moves = 100;
    double t0_factor = 20.0;
    // Cost per layer of vertical net span, in tile units.
    double lambda = 1.0;
};

struct PlaceStats
{
    long proposed = 0;
    long cross_layer = 0;
    long accepted = 0;
    int temperatures = 0;
    double t0 = 0;
    long zero_temp_accepted = 0;
    double zero_temp_max_delta = -std::numeric_limits<double>::infinity();
};

struct Placement
{
    std::vector<Loc> loc; // per PackedNetlist block
    double cost = 0;
    PlaceStats stats;
};

double net_cost(const PackedNet &net, const std::vector<Loc> &loc, double lambda);
double placement_cost(const PackedNetlist &p, const std::vector<Loc> &loc, double lambda);

// Legal locations for every block kind, in layer, y, x, sub order.
std::vector<Loc> clb_slots(const RoutingResourceGraph &g);
std::vector<Loc> io_slots(const RoutingResourceGraph &g);

Placement place(const PackedNetlist &p, const RoutingResourceGraph &g, uint64_t seed, const PlaceParams &params = {});

// Throws if a block sits on an incompatible tile or two blocks share a slot.
void check_placement(const PackedNetlist &p, const RoutingResourceGraph &g, const Placement &pl);

} // namespace fabric3d
