#pragma once

#include "fabric3d/arch.h"
#include "fabric3d/blif.h"
#include "fabric3d/rrg.h"
#include "fabric3d/vertical.h"

#include <json.hpp>
#include <string>
#include <tuple>
#include <vector>

namespace fabric3d::testing {

struct ArchOpts
{
    int w = 4, h = 4, layers = 1, W = 8;
    int K = 4, N = 1;
    std::string type = "None2D";
    int pct = 100;
    std::string placement = "RepeatedInterval";
    std::array<int, 4> in{0, 0, 0, 0}, out{0, 0, 0, 0};
    std::string planar = "Wilton";
    std::string cls = "Homogeneous";
    double ratio = 0.739;
};

inline std::string arch_json(const ArchOpts &o)
{
    nlohmann::json d;
    d["grid"] = {{"width", o.w}, {"height", o.h}};
    d["layers"] = {{"count", o.layers}, {"class", o.cls}};
    d["routing"] = {{"channel_width", o.W},
                    {"segments", nlohmann::json::array({{{"length", 1}, {"tracks", o.W}}})},
                    {"planar_sb", o.planar}};
    d["logic"] = {{"lut_size", o.K}, {"cluster_size", o.N}};
    d["vertical"] = {{"type", o.type},
                     {"sb_percentage", o.pct},
                     {"sb_placement", o.placement},
                     {"pattern", {{"input", o.in}, {"output", o.out}}}};
    d["timing"] = {{"vertical_delay_ratio", o.ratio}};
    return d.dump();
}

inline ArchSpec make_arch(const ArchOpts &o) { return parse_arch(arch_json(o)); }

inline RoutingResourceGraph make_3d(const ArchSpec &spec, uint64_t seed = 1)
{
    return extend_to_3d(build_base_rrg(spec), spec, plan_sites(spec, seed));
}

// Position-based identity of a node, independent of numbering.
using NodeKey = std::tuple<int, int, int, int, int, int, int, int>;
inline NodeKey key_of(const RRNode &n)
{
    return {static_cast<int>(n.kind), n.layer, n.xlo, n.ylo, n.xhi, n.yhi, n.ptc, static_cast<int>(n.dir)};
}

inline std::vector<std::pair<NodeKey, NodeKey>> edge_keys(const RoutingResourceGraph &g)
{
    std::vector<std::pair<NodeKey, NodeKey>> out;
    for (const RREdge &e : g.edges)
        out.push_back({key_of(g.nodes[e.src]), key_of(g.nodes[e.dst])});
    std::sort(out.begin(), out.end());
    return out;
}

inline LogicNetlist blif(const std::string &text) { return parse_blif(text); }

inline const char *kAnd2 = ".model and2\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n";
inline const char *kToggle = ".model toggle\n.inputs clk\n.outputs q\n.latch d q re clk 0\n.names q d\n0 1\n.end\n";

} // namespace fabric3d::testing
