#include "fabric3d/fabric.h"

#include "fabric3d/common.h"

#include <algorithm>
#include <fmt/format.h>

namespace fabric3d {

std::string_view to_string(BlockRole r)
{
    switch (r) {
    case BlockRole::Clb: return "clb";
    case BlockRole::Cb: return "cb";
    case BlockRole::Sb: return "sb";
    case BlockRole::Sb3d: return "sb3d";
    }
    return "?";
}

std::string_view to_string(EntryKind k)
{
    switch (k) {
    case EntryKind::RoutingMux: return "routing";
    case EntryKind::Crossbar: return "crossbar";
    case EntryKind::Lut: return "lut";
    case EntryKind::FfInit: return "ff_init";
    case EntryKind::OutputSelect: return "output_select";
    }
    return "?";
}

int select_width(int fanin)
{
    int w = 0;
    while ((1L << w) < fanin)
        ++w;
    return w;
}

const ClbSite *FabricModel::clb(int layer, int x, int y) const
{
    const size_t i = (static_cast<size_t>(layer) * graph.height + y) * graph.width + x;
    if (i >= clb_at.size() || clb_at[i] < 0)
        return nullptr;
    return &clbs[clb_at[i]];
}

long FabricModel::mux_count() const
{
    long n = 0;
    for (const ConfigEntry &e : entries)
        n += e.kind != EntryKind::Lut && e.width > 0;
    return n;
}

namespace {

bool is_chanz_source(const RRNode &n) { return n.dir == Direction::AboveInc || n.dir == Direction::UnderDec; }

// Candidate order: same-layer planar wires, same-layer OPINs, CHANZ halves,
// then anything arriving from another layer. Candidate 0 is therefore a planar
// source whenever the node has one.
int candidate_group(const RRNode &src, const RRNode &dst)
{
    if (src.layer != dst.layer)
        return 3;
    if (src.is_wire())
        return 0;
    if (src.kind == NodeKind::Opin)
        return 1;
    return 2;
}

// Corner owning the mux that drives a wire: the end the signal enters from.
void wire_corner(const RRNode &n, int &cx, int &cy)
{
    const bool inc = n.dir == Direction::Inc;
    if (n.kind == NodeKind::ChanX) {
        cx = inc ? n.xlo : n.xhi + 1;
        cy = n.ylo;
    } else {
        cx = n.xlo;
        cy = inc ? n.ylo : n.yhi + 1;
    }
}

} // namespace

FabricModel annotate(const RoutingResourceGraph &g, const ArchSpec &spec)
{
    FabricModel m;
    m.spec = spec;
    m.graph = g;
    m.lut_size = spec.lut_size;
    m.cluster_size = spec.cluster_size;
    m.clb_inputs = clb_input_count(spec.lut_size, spec.cluster_size);
    m.node_entry.assign(g.nodes.size(), -1);
    m.clb_at.assign(static_cast<size_t>(g.layer_count) * g.width * g.height, -1);

    // Per layer: CLB internals tile by tile, then routing muxes in node order.
    std::vector<std::vector<int>> layer_nodes(g.layer_count);
    for (size_t v = 0; v < g.nodes.size(); ++v)
        layer_nodes[g.nodes[v].layer].push_back(static_cast<int>(v));

    const int k = m.lut_size;
    const int n_ble = m.cluster_size;
    long offset = 0;
    auto push = [&](ConfigEntry e) {
        e.offset = offset;
        offset += e.width;
        m.entries.push_back(std::move(e));
        return static_cast<int>(m.entries.size()) - 1;
    };

    for (int l = 0; l < g.layer_count; ++l) {
        m.layer_offset.push_back(offset);
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x) {
                if (g.tile(l, x, y).kind != BlockKind::CLB)
                    continue;
                ClbSite site{l, x, y, {}, {}, {}, {}};
                site.crossbar.assign(n_ble, std::vector<int>(k, -1));
                for (int b = 0; b < n_ble; ++b) {
                    ConfigEntry e;
                    e.owner = BlockRole::Clb;
                    e.layer = l;
                    e.x = x;
                    e.y = y;
                    e.ble = b;
                    e.kind = EntryKind::Crossbar;
                    e.fanin = m.clb_inputs + n_ble;
                    e.width = select_width(e.fanin);
                    for (int q = 0; q < k; ++q) {
                        e.pin = q;
                        site.crossbar[b][q] = push(e);
                    }
                    e.pin = -1;
                    e.kind = EntryKind::Lut;
                    e.fanin = 1 << k;
                    e.width = 1 << k;
                    site.lut.push_back(push(e));
                    e.kind = EntryKind::FfInit;
                    e.fanin = 2;
                    e.width = 1;
                    site.ff_init.push_back(push(e));
                    e.kind = EntryKind::OutputSelect;
                    site.out_sel.push_back(push(e));
                }
                m.clb_at[(static_cast<size_t>(l) * g.height + y) * g.width + x] = static_cast<int>(m.clbs.size());
                m.clbs.push_back(std::move(site));
            }

        for (int v : layer_nodes[l]) {
            const RRNode &n = g.nodes[v];
            const auto &in = g.fanin(v);
            // SINKs are fed by block-internal wires; fanin-1 nodes need no mux.
            if (n.kind == NodeKind::Sink || n.kind == NodeKind::Source || n.kind == NodeKind::Opin || in.size() < 2) {
                for (int e : in)
                    m.direct.push_back(e);
                continue;
            }
            ConfigEntry e;
            e.kind = EntryKind::RoutingMux;
            e.layer = l;
            e.node = v;
            if (n.kind == NodeKind::Ipin) {
                e.owner = BlockRole::Cb;
                e.x = n.xlo;
                e.y = n.ylo;
            } else if (n.kind == NodeKind::ChanZ) {
                if (!is_chanz_source(n))
                    throw Error(fmt::format("CHANZ sink node {} has {} drivers", v, in.size()));
                e.owner = BlockRole::Sb3d;
                e.x = n.xlo;
                e.y = n.ylo;
            } else {
                e.owner = BlockRole::Sb;
                wire_corner(n, e.x, e.y);
            }
            e.edges = in;
            std::stable_sort(e.edges.begin(), e.edges.end(), [&](int a, int b) {
                const RRNode &sa = g.nodes[g.edges[a].src];
                const RRNode &sb = g.nodes[g.edges[b].src];
                int ga = candidate_group(sa, n), gb = candidate_group(sb, n);
                if (ga != gb)
                    return ga < gb;
                return g.edges[a].src < g.edges[b].src;
            });
            e.fanin = static_cast<int>(e.edges.size());
            e.width = select_width(e.fanin);
            m.node_entry[v] = push(std::move(e));
        }
    }
    m.config_bits = offset;

    // Cross-layer ports, one per exported source node, in node order.
    std::vector<int> port_of(g.nodes.size(), -1);
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const RREdge &ed = g.edges[e];
        const int from = g.nodes[ed.src].layer, to = g.nodes[ed.dst].layer;
        if (from == to)
            continue;
        if (port_of[ed.src] < 0) {
            port_of[ed.src] = static_cast<int>(m.ports.size());
            m.ports.push_back({ed.src, from, {}, ""});
        }
        auto &tl = m.ports[port_of[ed.src]].to_layers;
        if (std::find(tl.begin(), tl.end(), to) == tl.end())
            tl.push_back(to);
    }
    std::sort(m.ports.begin(), m.ports.end(), [](const CrossLayerPort &a, const CrossLayerPort &b) { return a.node < b.node; });
    for (size_t i = 0; i < m.ports.size(); ++i) {
        m.ports[i].name = fmt::format("xl_{}", i);
        std::sort(m.ports[i].to_layers.begin(), m.ports[i].to_layers.end());
    }
    return m;
}

std::vector<std::string> audit_coverage(const FabricModel &m, const RoutingResourceGraph &g)
{
    std::vector<std::string> out;
    std::vector<int> seen(g.edges.size(), 0);
    auto note = [&](int e, const std::string &where) {
        if (e < 0 || e >= static_cast<int>(g.edges.size())) {
            out.push_back(fmt::format("{} refers to unknown edge {}", where, e));
            return;
        }
        ++seen[e];
    };
    for (size_t i = 0; i < m.entries.size(); ++i) {
        const ConfigEntry &c = m.entries[i];
        if (c.kind != EntryKind::RoutingMux)
            continue;
        for (int e : c.edges) {
            note(e, fmt::format("mux {}", i));
            if (e >= 0 && e < static_cast<int>(g.edges.size()) && g.edges[e].dst != c.node)
                out.push_back(fmt::format("mux {} lists edge {} which does not drive node {}", i, e, c.node));
        }
    }
    for (int e : m.direct)
        note(e, "direct wire");
    for (size_t e = 0; e < g.edges.size(); ++e) {
        if (seen[e] == 1)
            continue;
        const RREdge &ed = g.edges[e];
        out.push_back(fmt::format("edge {} ({} {} -> {} {}) accounted {} times", e, to_string(g.nodes[ed.src].kind),
                                  ed.src, to_string(g.nodes[ed.dst].kind), ed.dst, seen[e]));
    }
    return out;
}

} // namespace fabric3d
