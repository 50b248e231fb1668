#include "fabric3d/rrg.h"

#include "fabric3d/common.h"

#include <algorithm>

namespace fabric3d {

std::string_view to_string(NodeKind k)
{
    switch (k) {
    case NodeKind::Source: return "SOURCE";
    case NodeKind::Sink: return "SINK";
    case NodeKind::Ipin: return "IPIN";
    case NodeKind::Opin: return "OPIN";
    case NodeKind::ChanX: return "CHANX";
    case NodeKind::ChanY: return "CHANY";
    case NodeKind::ChanZ: return "CHANZ";
    }
    return "?";
}

std::string_view to_string(Direction d)
{
    switch (d) {
    case Direction::None: return "NONE";
    case Direction::Inc: return "INC";
    case Direction::Dec: return "DEC";
    case Direction::AboveInc: return "ABOVE_INC";
    case Direction::AboveDec: return "ABOVE_DEC";
    case Direction::UnderInc: return "UNDER_INC";
    case Direction::UnderDec: return "UNDER_DEC";
    }
    return "?";
}

DelayModel DelayModel::from_spec(const ArchSpec &spec)
{
    DelayModel m;
    m.base_switch_ps = spec.base_switch_delay * 1e12;
    m.wire_per_tile_ps = spec.wire_delay_per_tile * 1e12;
    m.vertical_ps = spec.vertical_delay() * 1e12;
    m.lut_ps = spec.lut_delay * 1e12;
    m.setup_ps = spec.setup_time * 1e12;
    return m;
}

double edge_delay(const RRNode &src, const RRNode &dst, const DelayModel &model)
{
    double cross = src.layer != dst.layer ? model.vertical_ps : 0.0;
    switch (dst.kind) {
    case NodeKind::Source:
    case NodeKind::Opin:
    case NodeKind::Sink:
        return 0.0;
    case NodeKind::Ipin:
        return model.base_switch_ps + cross;
    case NodeKind::ChanX:
    case NodeKind::ChanY:
        return model.base_switch_ps + dst.span() * model.wire_per_tile_ps + cross;
    case NodeKind::ChanZ:
        // The hop between the two halves of a pair is the via itself.
        if (src.kind == NodeKind::ChanZ)
            return model.vertical_ps;
        return model.base_switch_ps;
    }
    return 0.0;
}

int RoutingResourceGraph::add_node(const RRNode &n)
{
    nodes.push_back(n);
    out_.emplace_back();
    in_.emplace_back();
    return static_cast<int>(nodes.size()) - 1;
}

int RoutingResourceGraph::add_edge(int src, int dst)
{
    if (int e = find_edge(src, dst); e >= 0)
        return e;
    RREdge e{src, dst, edge_delay(nodes[src], nodes[dst], delays)};
    edges.push_back(e);
    int id = static_cast<int>(edges.size()) - 1;
    out_[src].push_back(id);
    in_[dst].push_back(id);
    return id;
}

int RoutingResourceGraph::find_edge(int src, int dst) const
{
    for (int e : out_[src])
        if (edges[e].dst == dst)
            return e;
    return -1;
}

void RoutingResourceGraph::finalize()
{
    out_.assign(nodes.size(), {});
    in_.assign(nodes.size(), {});
    for (size_t i = 0; i < edges.size(); ++i) {
        out_[edges[i].src].push_back(static_cast<int>(i));
        in_[edges[i].dst].push_back(static_cast<int>(i));
    }
    for (TileInfo &t : tiles) {
        t.sources.clear();
        t.sinks.clear();
        t.ipins.clear();
        t.opins.clear();
    }
    for (size_t i = 0; i < nodes.size(); ++i) {
        RRNode &n = nodes[i];
        int id = static_cast<int>(i);
        switch (n.kind) {
        case NodeKind::Source: tile(n.layer, n.xlo, n.ylo).sources.push_back(id); break;
        case NodeKind::Sink:
            n.capacity = std::max<int>(1, static_cast<int>(in_[i].size()));
            tile(n.layer, n.xlo, n.ylo).sinks.push_back(id);
            break;
        case NodeKind::Ipin: tile(n.layer, n.xlo, n.ylo).ipins.push_back(id); break;
        case NodeKind::Opin: tile(n.layer, n.xlo, n.ylo).opins.push_back(id); break;
        default: break;
        }
    }
}

// ---- wire lookup -------------------------------------------------------

WireIndex::WireIndex(const RoutingResourceGraph &g) : g_(g), w_(g.channel_width)
{
    x_.assign(static_cast<size_t>(g.layer_count) * (g.height + 1) * g.width * w_ * 2, -1);
    y_.assign(static_cast<size_t>(g.layer_count) * (g.width + 1) * g.height * w_ * 2, -1);
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const RRNode &n = g.nodes[i];
        if (n.kind == NodeKind::ChanX) {
            for (int c = n.xlo; c <= n.xhi; ++c)
                x_[static_cast<size_t>(n.layer) * (g.height + 1) * g.width * w_ * 2 +
                   slot(n.ylo, c, n.ptc, n.dir, g.width)] = static_cast<int>(i);
        } else if (n.kind == NodeKind::ChanY) {
            for (int r = n.ylo; r <= n.yhi; ++r)
                y_[static_cast<size_t>(n.layer) * (g.width + 1) * g.height * w_ * 2 +
                   slot(n.xlo, r, n.ptc, n.dir, g.height)] = static_cast<int>(i);
        }
    }
}

int WireIndex::slot(int line, int pos, int track, Direction d, int positions) const
{
    return ((line * positions + pos) * w_ + track) * 2 + (d == Direction::Dec ? 1 : 0);
}

int WireIndex::chanx(int layer, int line, int col, int track, Direction d) const
{
    if (layer < 0 || layer >= g_.layer_count || line < 1 || line > g_.height || col < 0 || col >= g_.width ||
        track < 0 || track >= w_)
        return -1;
    return x_[static_cast<size_t>(layer) * (g_.height + 1) * g_.width * w_ * 2 + slot(line, col, track, d, g_.width)];
}

int WireIndex::chany(int layer, int line, int row, int track, Direction d) const
{
    if (layer < 0 || layer >= g_.layer_count || line < 1 || line > g_.width || row < 0 || row >= g_.height ||
        track < 0 || track >= w_)
        return -1;
    return y_[static_cast<size_t>(layer) * (g_.width + 1) * g_.height * w_ * 2 + slot(line, row, track, d, g_.height)];
}

int WireIndex::incoming(int layer, int cx, int cy, int side, int track) const
{
    int n = -1;
    switch (side) {
    case kLeft:
        n = chanx(layer, cy, cx - 1, track, Direction::Inc);
        return n >= 0 && g_.nodes[n].xhi == cx - 1 ? n : -1;
    case kRight:
        n = chanx(layer, cy, cx, track, Direction::Dec);
        return n >= 0 && g_.nodes[n].xlo == cx ? n : -1;
    case kBottom:
        n = chany(layer, cx, cy - 1, track, Direction::Inc);
        return n >= 0 && g_.nodes[n].yhi == cy - 1 ? n : -1;
    case kTop:
        n = chany(layer, cx, cy, track, Direction::Dec);
        return n >= 0 && g_.nodes[n].ylo == cy ? n : -1;
    }
    return -1;
}

int WireIndex::outgoing(int layer, int cx, int cy, int side, int track) const
{
    int n = -1;
    switch (side) {
    case kLeft:
        n = chanx(layer, cy, cx - 1, track, Direction::Dec);
        return n >= 0 && g_.nodes[n].xhi == cx - 1 ? n : -1;
    case kRight:
        n = chanx(layer, cy, cx, track, Direction::Inc);
        return n >= 0 && g_.nodes[n].xlo == cx ? n : -1;
    case kBottom:
        n = chany(layer, cx, cy - 1, track, Direction::Dec);
        return n >= 0 && g_.nodes[n].yhi == cy - 1 ? n : -1;
    case kTop:
        n = chany(layer, cx, cy, track, Direction::Inc);
        return n >= 0 && g_.nodes[n].ylo == cy ? n : -1;
    }
    return -1;
}

// ---- connection blocks ---------------------------------------------------

std::vector<char> switch_driven_wires(const RoutingResourceGraph &g)
{
    std::vector<char> driven(g.nodes.size(), 0);
    for (const RREdge &e : g.edges)
        if (g.nodes[e.src].is_wire())
            driven[e.dst] = 1;
    return driven;
}

// Undriven wires start at the collapsed border and could never carry a
// signal to the pin.
std::vector<int> ipin_tap_wires(const WireIndex &wires, const std::vector<char> &driven, int layer, int x, int y)
{
    std::vector<int> taps;
    const int w = wires.channel_width();
    for (int t = 0; t < w; ++t)
        for (int side = 0; side < 4; ++side)
            for (Direction d : {Direction::Inc, Direction::Dec}) {
                int n = -1;
                switch (side) {
                case 0: n = wires.chanx(layer, y + 1, x, t, d); break;
                case 1: n = wires.chany(layer, x + 1, y, t, d); break;
                case 2: n = wires.chanx(layer, y, x, t, d); break;
                case 3: n = wires.chany(layer, x, y, t, d); break;
                }
                if (n >= 0 && driven[n])
                    taps.push_back(n);
            }
    return taps;
}

std::vector<int> opin_tap_wires(const WireIndex &wires, const RoutingResourceGraph &g, int layer, int x, int y)
{
    std::vector<int> taps;
    const int w = wires.channel_width();
    for (int t = 0; t < w; ++t)
        for (int side = 0; side < 2; ++side)
            for (Direction d : {Direction::Inc, Direction::Dec}) {
                int n = side == 0 ? wires.chanx(layer, y + 1, x, t, d) : wires.chany(layer, x + 1, y, t, d);
                if (n < 0)
                    continue;
                const RRNode &wn = g.nodes[n];
                int drive = side == 0 ? (d == Direction::Inc ? wn.xlo : wn.xhi) : (d == Direction::Inc ? wn.ylo : wn.yhi);
                if (drive != (side == 0 ? x : y))
                    continue;
                // Wires running into the collapsed left/bottom border have no
                // onward switch and would leave the pin stranded.
                bool onward = false;
                for (int e : g.fanout(n))
                    onward = onward || g.nodes[g.edges[e].dst].is_wire();
                if (onward)
                    taps.push_back(n);
            }
    return taps;
}

std::vector<int> select_taps(const std::vector<int> &taps, int pin, int count, int pins)
{
    const long n = static_cast<long>(taps.size());
    if (n == 0 || count <= 0)
        return {};
    count = static_cast<int>(std::min<long>(count, n));
    pins = std::max(1, pins);
    // pins*count points spread evenly over the track-major tap list; pin p
    // takes every pins-th point. The rotating offset keeps points that share a
    // stride from always landing on the same side and direction.
    const long m = static_cast<long>(pins) * count;
    const long stride = std::max<long>(1, (n + m - 1) / m);
    std::vector<int> out;
    std::vector<char> used(n, 0);
    for (int j = 0; j < count; ++j) {
        long k = pin + static_cast<long>(j) * pins;
        long idx = (k * n / m + k % stride) % n;
        while (used[idx])
            idx = (idx + 1) % n;
        used[idx] = 1;
        out.push_back(taps[idx]);
    }
    return out;
}

// ---- switch blocks -------------------------------------------------------

namespace {

int wilton_track(int from, int to, int t, int w)
{
    switch (from) {
    case kLeft:
        if (to == kRight) return t;
        if (to == kTop) return (w - t) % w;
        return (w + t - 1) % w;
    case kRight:
        if (to == kLeft) return t;
        if (to == kTop) return (w + t - 1) % w;
        return (2 * w - 2 - t) % w;
    case kBottom:
        if (to == kTop) return t;
        if (to == kLeft) return (t + 1) % w;
        return (2 * w - 2 - t) % w;
    case kTop:
        if (to == kBottom) return t;
        if (to == kLeft) return (w - t) % w;
        return (t + 1) % w;
    }
    return t;
}

} // namespace

int planar_sb_track(PlanarPattern p, int from, int to, int t, int w)
{
    if (p == PlanarPattern::Subset || w <= 0)
        return t;
    // Wires are unidirectional, so the permutation runs over the 2W wire slots
    // of the channel (Inc at 2t, Dec at 2t+1). Applying it per direction would
    // split the fabric into two disjoint parity domains.
    const int dec = from == kRight || from == kTop;
    return wilton_track(from, to, 2 * t + dec, 2 * w) / 2;
}

// ---- construction --------------------------------------------------------

namespace {

struct TrackSeg
{
    int length;
    int offset;
};

std::vector<TrackSeg> track_segments(const ArchSpec &spec)
{
    std::vector<TrackSeg> out;
    for (const Segment &s : spec.segments)
        for (int j = 0; j < s.tracks; ++j)
            out.push_back({s.length, j % s.length});
    return out;
}

// Wire spans along a channel of `positions` tiles for one track.
bool wire_starts_at(int p, const TrackSeg &s)
{
    return p == 0 || ((p - s.offset) % s.length + s.length) % s.length == 0;
}

int wire_end(int p, int positions, const TrackSeg &s)
{
    int q = p + 1;
    while (q < positions && !wire_starts_at(q, s) && q - p < s.length)
        ++q;
    return q - 1;
}

} // namespace

RoutingResourceGraph build_base_rrg(const ArchSpec &spec)
{
    RoutingResourceGraph g;
    g.layer_count = spec.layer_count;
    g.width = spec.grid_width;
    g.height = spec.grid_height;
    g.channel_width = spec.channel_width;
    g.spec_hash = spec_hash(spec);
    g.delays = DelayModel::from_spec(spec);
    g.tiles.resize(static_cast<size_t>(g.layer_count) * g.width * g.height);

    const std::vector<TrackSeg> segs = track_segments(spec);
    const int w = spec.channel_width;

    for (int l = 0; l < g.layer_count; ++l)
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x) {
                BlockKind kind = spec.tile_kind(l, x, y);
                g.tile(l, x, y).kind = kind;
                TilePins pins = tile_pins(spec, kind);
                auto pin_node = [&](NodeKind k, int ptc) {
                    RRNode n;
                    n.kind = k;
                    n.layer = l;
                    n.xlo = n.xhi = x;
                    n.ylo = n.yhi = y;
                    n.ptc = ptc;
                    return g.add_node(n);
                };
                for (int i = 0; i < pins.outputs; ++i)
                    pin_node(NodeKind::Source, i);
                int sink_classes = pins.equivalent_inputs ? (pins.inputs > 0 ? 1 : 0) : pins.inputs;
                for (int i = 0; i < sink_classes; ++i)
                    pin_node(NodeKind::Sink, i);
                for (int i = 0; i < pins.inputs; ++i)
                    pin_node(NodeKind::Ipin, i);
                for (int i = 0; i < pins.outputs; ++i)
                    pin_node(NodeKind::Opin, i);

                // Wires owned by this tile: those starting at it in its top
                // (CHANX) and right (CHANY) channels.
                for (int t = 0; t < w; ++t) {
                    if (!wire_starts_at(x, segs[t]))
                        continue;
                    int end = wire_end(x, g.width, segs[t]);
                    for (Direction d : {Direction::Inc, Direction::Dec}) {
                        RRNode n;
                        n.kind = NodeKind::ChanX;
                        n.layer = l;
                        n.xlo = x;
                        n.xhi = end;
                        n.ylo = n.yhi = y + 1;
                        n.ptc = t;
                        n.dir = d;
                        g.add_node(n);
                    }
                }
                for (int t = 0; t < w; ++t) {
                    if (!wire_starts_at(y, segs[t]))
                        continue;
                    int end = wire_end(y, g.height, segs[t]);
                    for (Direction d : {Direction::Inc, Direction::Dec}) {
                        RRNode n;
                        n.kind = NodeKind::ChanY;
                        n.layer = l;
                        n.xlo = n.xhi = x + 1;
                        n.ylo = y;
                        n.yhi = end;
                        n.ptc = t;
                        n.dir = d;
                        g.add_node(n);
                    }
                }
            }
    g.finalize();

    WireIndex wires(g);
    const int fc_in = spec.fc_in_tracks();
    const int fc_out = spec.fc_out_tracks();
    for (int l = 0; l < g.layer_count; ++l)
        for (int cy = 0; cy <= g.height; ++cy)
            for (int cx = 0; cx <= g.width; ++cx)
                for (int from = 0; from < 4; ++from)
                    for (int t = 0; t < w; ++t) {
                        int in = wires.incoming(l, cx, cy, from, t);
                        if (in < 0)
                            continue;
                        for (int to = 0; to < 4; ++to) {
                            if (to == from)
                                continue;
                            int out = wires.outgoing(l, cx, cy, to, planar_sb_track(spec.planar_sb, from, to, t, w));
                            if (out >= 0)
                                g.add_edge(in, out);
                        }
                    }

    const std::vector<char> driven = switch_driven_wires(g);

    for (int l = 0; l < g.layer_count; ++l)
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x) {
                const TileInfo &ti = g.tile(l, x, y);
                const bool equivalent = tile_pins(spec, ti.kind).equivalent_inputs;
                for (size_t i = 0; i < ti.sources.size(); ++i)
                    g.add_edge(ti.sources[i], ti.opins[i]);
                for (size_t i = 0; i < ti.ipins.size(); ++i)
                    g.add_edge(ti.ipins[i], equivalent ? ti.sinks[0] : ti.sinks[i]);

                std::vector<int> in_taps = ipin_tap_wires(wires, driven, l, x, y);
                int np = static_cast<int>(ti.ipins.size());
                for (int p = 0; p < np; ++p)
                    for (int wire : select_taps(in_taps, p, fc_in, np))
                        g.add_edge(wire, ti.ipins[p]);
                std::vector<int> out_taps = opin_tap_wires(wires, g, l, x, y);
                np = static_cast<int>(ti.opins.size());
                for (int p = 0; p < np; ++p)
                    for (int wire : select_taps(out_taps, p, fc_out, np))
                        g.add_edge(ti.opins[p], wire);
            }
    g.finalize();
    return g;
}

long NodeCensus::total() const
{
    long s = 0;
    for (long c : counts)
        s += c;
    return s;
}

NodeCensus node_census(const RoutingResourceGraph &g)
{
    NodeCensus c;
    for (const RRNode &n : g.nodes)
        ++c.counts[static_cast<int>(n.kind)];
    return c;
}

} // namespace fabric3d
