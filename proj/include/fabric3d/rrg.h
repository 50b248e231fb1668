#pragma once

#include "fabric3d/arch.h"
#include "fabric3d/delay.h"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fabric3d {

enum class NodeKind : uint8_t { Source, Sink, Ipin, Opin, ChanX, ChanY, ChanZ };
inline constexpr int kNodeKindCount = 7;

// Inc/Dec for planar wires. The four vertical directions name the side of the
// layer the CHANZ node sits on (Above/Under) and whether the signal moves to a
// higher (Inc) or lower (Dec) layer.
enum class Direction : uint8_t { None, Inc, Dec, AboveInc, AboveDec, UnderInc, UnderDec };

std::string_view to_string(NodeKind k);
std::string_view to_string(Direction d);

// Switch-block sides in counter-clockwise order.
enum Side : int { kLeft = 0, kBottom = 1, kRight = 2, kTop = 3 };

struct RRNode
{
    NodeKind kind = NodeKind::Source;
    int layer = 0;
    // Pins: tile coordinates. CHANX: columns xlo..xhi on horizontal channel
    // line ylo (= yhi, 1..height). CHANY: rows ylo..yhi on vertical channel
    // line xlo (= xhi, 1..width). CHANZ: switch-block corner.
    int xlo = 0, ylo = 0, xhi = 0, yhi = 0;
    // Pin index, pin-class index, track index or vertical track index.
    int ptc = 0;
    Direction dir = Direction::None;
    int capacity = 1;

    bool is_wire() const { return kind == NodeKind::ChanX || kind == NodeKind::ChanY; }
    int span() const { return kind == NodeKind::ChanX ? xhi - xlo + 1 : kind == NodeKind::ChanY ? yhi - ylo + 1 : 0; }
    bool operator==(const RRNode &) const = default;
};

struct RREdge
{
    int src = -1;
    int dst = -1;
    double delay_ps = 0;
    bool operator==(const RREdge &) const = default;
};

struct TileInfo
{
    BlockKind kind = BlockKind::RoutingOnly;
    std::vector<int> sources;
    std::vector<int> sinks;
    std::vector<int> ipins;
    std::vector<int> opins;
};

// Delay of one switch/wire hop given the model: every configurable switch
// costs base_switch, entering a wire adds its span times the per-tile wire
// delay, and any hop that changes layer adds the vertical delay.
double edge_delay(const RRNode &src, const RRNode &dst, const DelayModel &model);

class RoutingResourceGraph
{
  public:
    int layer_count = 0;
    int width = 0;
    int height = 0;
    int channel_width = 0;
    uint64_t spec_hash = 0;
    DelayModel delays;

    std::vector<RRNode> nodes;
    std::vector<RREdge> edges;
    std::vector<TileInfo> tiles;

    int add_node(const RRNode &n);
    // Delay is derived from the endpoints and `delays`. Duplicate (src, dst)
    // pairs are ignored and return the existing edge.
    int add_edge(int src, int dst);
    // Rebuilds adjacency and tile pin tables from nodes/edges.
    void finalize();

    const std::vector<int> &fanout(int node) const { return out_[node]; }
    const std::vector<int> &fanin(int node) const { return in_[node]; }
    int find_edge(int src, int dst) const;

    TileInfo &tile(int layer, int x, int y) { return tiles[(static_cast<size_t>(layer) * height + y) * width + x]; }
    const TileInfo &tile(int layer, int x, int y) const
    {
        return tiles[(static_cast<size_t>(layer) * height + y) * width + x];
    }

    double delay_of(int edge, const DelayModel &model) const
    {
        return edge_delay(nodes[edges[edge].src], nodes[edges[edge].dst], model);
    }
    bool crosses_layers(int edge) const { return nodes[edges[edge].src].layer != nodes[edges[edge].dst].layer; }

  private:
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
};

using RRG = RoutingResourceGraph;

// Locates planar wires by position.
class WireIndex
{
  public:
    explicit WireIndex(const RoutingResourceGraph &g);

    // Wire covering `pos` on channel `line`, or -1.
    int chanx(int layer, int line, int col, int track, Direction d) const;
    int chany(int layer, int line, int row, int track, Direction d) const;

    // Wires that end at / start at switch-block corner (cx, cy) on `side`.
    int incoming(int layer, int cx, int cy, int side, int track) const;
    int outgoing(int layer, int cx, int cy, int side, int track) const;

    int channel_width() const { return w_; }

  private:
    int slot(int line, int pos, int track, Direction d, int positions) const;
    const RoutingResourceGraph &g_;
    int w_;
    std::vector<int> x_;
    std::vector<int> y_;
};

// Wires an input pin of tile (x, y) may listen to: the four channels around
// the tile, ordered by track, then side (top, right, bottom, left), then
// direction. Wires no switch drives (see switch_driven_wires) are left out.
std::vector<int> ipin_tap_wires(const WireIndex &wires, const std::vector<char> &driven, int layer, int x, int y);
// Wires fed by at least one wire-to-wire switch.
std::vector<char> switch_driven_wires(const RoutingResourceGraph &g);
// Wires an output pin of tile (x, y) may drive: wires of the tile's top and
// right channels whose driving end sits at the tile, ordered like the inputs.
std::vector<int> opin_tap_wires(const WireIndex &wires, const RoutingResourceGraph &g, int layer, int x, int y);
// `count` evenly spaced taps for pin `pin` of a class of `pins` pins. Pins
// are offset from each other so the class as a whole covers the tap list.
std::vector<int> select_taps(const std::vector<int> &taps, int pin, int count, int pins);

RoutingResourceGraph build_base_rrg(const ArchSpec &spec);

// Planar switch-block permutation for a wire entering on `from` and leaving on `to`.
int planar_sb_track(PlanarPattern p, int from, int to, int track, int width);

struct NodeCensus
{
    std::array<long, kNodeKindCount> counts{};
    long operator[](NodeKind k) const { return counts[static_cast<int>(k)]; }
    long total() const;
};
NodeCensus node_census(const RoutingResourceGraph &g);

std::string serialize_rrg(const RoutingResourceGraph &g);
RoutingResourceGraph deserialize_rrg(std::string_view text);

} // namespace fabric3d
