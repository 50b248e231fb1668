#include "fabric3d/vertical.h"

#include "fabric3d/common.h"

#include <algorithm>
#include <cstdlib>
#include <fmt/format.h>
#include <set>

namespace fabric3d {

int target_site_count(int percentage, int total_sites)
{
    return (percentage * total_sites + 50) / 100;
}

namespace {

std::vector<SiteCoord> all_sites(int w, int h)
{
    std::vector<SiteCoord> out;
    for (int y = 0; y <= h; ++y)
        for (int x = 0; x <= w; ++x)
            out.push_back({x, y});
    return out;
}

void sort_row_major(std::vector<SiteCoord> &v)
{
    std::sort(v.begin(), v.end(), [](const SiteCoord &a, const SiteCoord &b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
}

// Distances in half-tile units so odd grids keep an integral center.
int cheb2(const SiteCoord &s, int w, int h) { return std::max(std::abs(2 * s.x - w), std::abs(2 * s.y - h)); }

} // namespace

SitePlan plan_sites(const ArchSpec &spec, uint64_t seed)
{
    const int w = spec.grid_width;
    const int h = spec.grid_height;
    SitePlan plan;
    plan.total_sites = spec.sb_site_count();
    std::vector<SiteCoord> sites = all_sites(w, h);
    const int target = target_site_count(spec.vertical.sb_percentage, plan.total_sites);

    switch (spec.vertical.placement) {
    case SitePlacement::RepeatedInterval: {
        // Largest stride that still yields enough sites keeps the pattern sparse
        // and evenly spread before truncation.
        int stride = 1;
        for (int s = w + h + 1; s >= 1; --s) {
            int n = 0;
            for (const SiteCoord &c : sites)
                n += (c.x + c.y) % s == 0;
            if (n >= target) {
                stride = s;
                break;
            }
        }
        for (const SiteCoord &c : sites)
            if ((c.x + c.y) % stride == 0 && static_cast<int>(plan.sites.size()) < target)
                plan.sites.push_back(c);
        break;
    }
    case SitePlacement::Rows:
        std::stable_sort(sites.begin(), sites.end(), [&](const SiteCoord &a, const SiteCoord &b) {
            int da = std::abs(2 * a.y - h), db = std::abs(2 * b.y - h);
            return da != db ? da < db : a.y < b.y;
        });
        plan.sites.assign(sites.begin(), sites.begin() + target);
        break;
    case SitePlacement::Columns:
        std::stable_sort(sites.begin(), sites.end(), [&](const SiteCoord &a, const SiteCoord &b) {
            int da = std::abs(2 * a.x - w), db = std::abs(2 * b.x - w);
            if (da != db)
                return da < db;
            return a.x != b.x ? a.x < b.x : a.y < b.y;
        });
        plan.sites.assign(sites.begin(), sites.begin() + target);
        break;
    case SitePlacement::Core:
    case SitePlacement::Perimeter: {
        const int sign = spec.vertical.placement == SitePlacement::Core ? 1 : -1;
        std::stable_sort(sites.begin(), sites.end(), [&](const SiteCoord &a, const SiteCoord &b) {
            int da = sign * cheb2(a, w, h), db = sign * cheb2(b, w, h);
            return da < db;
        });
        plan.sites.assign(sites.begin(), sites.begin() + target);
        break;
    }
    case SitePlacement::Random: {
        Rng rng(seed);
        rng.shuffle(sites);
        plan.sites.assign(sites.begin(), sites.begin() + target);
        break;
    }
    case SitePlacement::CustomList: {
        std::set<SiteCoord> seen;
        for (const SiteCoord &c : spec.vertical.custom_sites) {
            if (c.x < 0 || c.x > w || c.y < 0 || c.y > h)
                throw Error(fmt::format("3D SB site ({},{}) is outside the {}x{} site lattice", c.x, c.y, w + 1, h + 1));
            if (!seen.insert(c).second)
                throw Error(fmt::format("duplicate 3D SB site ({},{})", c.x, c.y));
        }
        plan.sites = spec.vertical.custom_sites;
        break;
    }
    }
    sort_row_major(plan.sites);
    plan.realized_percentage = plan.total_sites ? 100.0 * plan.sites.size() / plan.total_sites : 0.0;
    return plan;
}

TrackMap vertical_track_map(const SBPattern &pattern, int width, int k)
{
    TrackMap m;
    for (int j = 0; j < 4; ++j) {
        m.input[j] = ((pattern.input[j] + k) % width + width) % width;
        m.output[j] = ((pattern.output[j] + k) % width + width) % width;
    }
    return m;
}

const std::vector<NamedPattern> &named_patterns()
{
    static const std::vector<NamedPattern> table = {
        {"subset", {{0, 0, 0, 0}, {0, 0, 0, 0}}},
        {"off-by-one-output", {{0, 0, 0, 0}, {1, 1, 1, 1}}},
        {"revolving-offset", {{0, 1, 2, 3}, {0, 1, 2, 3}}},
        {"revolving-input", {{0, 1, 2, 3}, {0, 0, 0, 0}}},
        {"revolving-output", {{0, 0, 0, 0}, {0, 1, 2, 3}}},
        {"direction-match", {{0, 1, 0, 1}, {1, 0, 1, 0}}},
        {"symmetric-offset", {{-2, -1, 1, 2}, {0, 0, 0, 0}}},
        {"random", {{-3, 0, 2, 1}, {3, -1, -2, 2}}},
    };
    return table;
}

std::optional<SBPattern> named_pattern(std::string_view name)
{
    for (const NamedPattern &p : named_patterns())
        if (p.name == name)
            return p.pattern;
    return std::nullopt;
}

namespace {

bool custom_pin_allowed(const CustomRules &r, int pin)
{
    return r.pins.empty() || std::find(r.pins.begin(), r.pins.end(), pin) != r.pins.end();
}

void check_custom(const RoutingResourceGraph &g, const ArchSpec &spec)
{
    if (spec.vertical.type != ConnectionType::Custom)
        return;
    const CustomRules &r = spec.vertical.custom;
    size_t max_pins = 0;
    for (const TileInfo &t : g.tiles)
        max_pins = std::max({max_pins, t.ipins.size(), t.opins.size()});
    for (int p : r.pins)
        if (p < 0 || static_cast<size_t>(p) >= max_pins)
            throw Error(fmt::format("custom vertical rule references pin {} but no tile has more than {} pins", p,
                                    max_pins));
    for (int t : r.tracks)
        if (t < 0 || t >= g.channel_width)
            throw Error(fmt::format("custom vertical rule references track {} but the channel width is {}", t,
                                    g.channel_width));
}

// The other layer's own pins already use the evenly spaced tap points;
// shifting by half a spacing puts the cross-layer taps between them.
std::vector<int> interleaved(std::vector<int> taps, int points)
{
    const size_t shift = points > 0 ? taps.size() / (2 * static_cast<size_t>(points)) : 0;
    if (shift > 0)
        std::rotate(taps.begin(), taps.begin() + shift, taps.end());
    return taps;
}

void add_cb_edges(RoutingResourceGraph &g, const WireIndex &wires, const ArchSpec &spec)
{
    const VerticalConfig &vc = spec.vertical;
    const bool custom = vc.type == ConnectionType::Custom;
    const bool inputs = vc.uses_cb_inputs();
    const bool outputs = vc.uses_cb_outputs();
    if (!inputs && !outputs)
        return;
    const int fc_in = spec.fc_in_tracks();
    const int fc_out = spec.fc_out_tracks();
    const std::vector<char> driven = switch_driven_wires(g);
    for (int l = 0; l < g.layer_count; ++l)
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x)
                for (int other : {l - 1, l + 1}) {
                    if (other < 0 || other >= g.layer_count)
                        continue;
                    const TileInfo &ti = g.tile(l, x, y);
                    if (inputs && !ti.ipins.empty()) {
                        int np = static_cast<int>(ti.ipins.size());
                        std::vector<int> taps = interleaved(ipin_tap_wires(wires, driven, other, x, y), np * fc_in);
                        for (int p = 0; p < np; ++p) {
                            if (custom && !custom_pin_allowed(vc.custom, p))
                                continue;
                            for (int wire : select_taps(taps, p, fc_in, np))
                                g.add_edge(wire, ti.ipins[p]);
                        }
                    }
                    if (outputs && !ti.opins.empty()) {
                        int np = static_cast<int>(ti.opins.size());
                        std::vector<int> taps = interleaved(opin_tap_wires(wires, g, other, x, y), np * fc_out);
                        for (int p = 0; p < np; ++p) {
                            if (custom && !custom_pin_allowed(vc.custom, p))
                                continue;
                            for (int wire : select_taps(taps, p, fc_out, np))
                                g.add_edge(ti.opins[p], wire);
                        }
                    }
                }
}

// Planar wire on `side` for pattern track `t`. When fewer than W wires end or
// start at this corner (long segments) the pattern wraps over those present.
int pattern_wire(const WireIndex &wires, int layer, SiteCoord c, int side, int t, bool incoming)
{
    auto at = [&](int track) {
        return incoming ? wires.incoming(layer, c.x, c.y, side, track) : wires.outgoing(layer, c.x, c.y, side, track);
    };
    int direct = at(t);
    if (direct >= 0)
        return direct;
    std::vector<int> avail;
    for (int i = 0; i < wires.channel_width(); ++i)
        if (int n = at(i); n >= 0)
            avail.push_back(n);
    if (avail.empty())
        return -1;
    return avail[t % avail.size()];
}

void add_sb_pairs(RoutingResourceGraph &g, const WireIndex &wires, const ArchSpec &spec, const SitePlan &plan)
{
    const VerticalConfig &vc = spec.vertical;
    const int w = g.channel_width;
    std::vector<int> ks;
    for (int k = 0; k < w; ++k)
        if (vc.type != ConnectionType::Custom || vc.custom.tracks.empty() ||
            std::find(vc.custom.tracks.begin(), vc.custom.tracks.end(), k) != vc.custom.tracks.end())
            ks.push_back(k);

    auto chanz = [&](int layer, SiteCoord c, int k, Direction d) {
        RRNode n;
        n.kind = NodeKind::ChanZ;
        n.layer = layer;
        n.xlo = n.xhi = c.x;
        n.ylo = n.yhi = c.y;
        n.ptc = k;
        n.dir = d;
        return g.add_node(n);
    };
    auto wire_pair = [&](int from_layer, int to_layer, SiteCoord c, int k, Direction src_dir, Direction sink_dir) {
        int src = chanz(from_layer, c, k, src_dir);
        int sink = chanz(to_layer, c, k, sink_dir);
        TrackMap m = vertical_track_map(vc.pattern, w, k);
        for (int side = 0; side < 4; ++side)
            if (int in = pattern_wire(wires, from_layer, c, side, m.input[side], true); in >= 0)
                g.add_edge(in, src);
        g.add_edge(src, sink);
        for (int side = 0; side < 4; ++side)
            if (int out = pattern_wire(wires, to_layer, c, side, m.output[side], false); out >= 0)
                g.add_edge(sink, out);
    };

    for (const SiteCoord &c : plan.sites)
        for (int l = 0; l + 1 < g.layer_count; ++l)
            for (int k : ks) {
                wire_pair(l, l + 1, c, k, Direction::AboveInc, Direction::UnderInc);
                wire_pair(l + 1, l, c, k, Direction::UnderDec, Direction::AboveDec);
            }
}

} // namespace

RoutingResourceGraph extend_to_3d(const RoutingResourceGraph &base, const ArchSpec &spec, const SitePlan &plan)
{
    RoutingResourceGraph g = base;
    if (spec.vertical.type == ConnectionType::None2D)
        return g;
    if (g.layer_count < 2)
        throw Error("vertical connectivity requires ≥2 layers");
    check_custom(g, spec);
    WireIndex wires(g);
    add_cb_edges(g, wires, spec);
    if (spec.vertical.uses_sb())
        add_sb_pairs(g, wires, spec, plan);
    g.finalize();
    return g;
}

std::vector<ChanzPair> chanz_pairs(const RoutingResourceGraph &g)
{
    std::vector<ChanzPair> out;
    for (const RREdge &e : g.edges) {
        const RRNode &s = g.nodes[e.src];
        const RRNode &d = g.nodes[e.dst];
        if (s.kind != NodeKind::ChanZ || d.kind != NodeKind::ChanZ)
            continue;
        ChanzPair p;
        p.source = e.src;
        p.sink = e.dst;
        p.site = {s.xlo, s.ylo};
        p.k = s.ptc;
        p.upward = s.dir == Direction::AboveInc;
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const ChanzPair &a, const ChanzPair &b) { return a.source < b.source; });
    return out;
}

VerticalCounts count_vertical(const RoutingResourceGraph &g)
{
    VerticalCounts c;
    for (const RREdge &e : g.edges) {
        const RRNode &s = g.nodes[e.src];
        const RRNode &d = g.nodes[e.dst];
        if (s.layer == d.layer)
            continue;
        if (s.kind == NodeKind::ChanZ && d.kind == NodeKind::ChanZ)
            ++c.sb;
        else if (d.kind == NodeKind::Ipin)
            ++c.pin_in;
        else if (s.kind == NodeKind::Opin)
            ++c.pin_out;
    }
    long tiles = static_cast<long>(g.width) * g.height;
    c.per_grid = tiles ? static_cast<double>(c.total()) / tiles : 0.0;
    return c;
}

} // namespace fabric3d
