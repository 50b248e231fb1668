#pragma once

#include "fabric3d/arch.h"
#include "fabric3d/rrg.h"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fabric3d {

enum class BlockRole : uint8_t { Clb, Cb, Sb, Sb3d };
enum class EntryKind : uint8_t { RoutingMux, Crossbar, Lut, FfInit, OutputSelect };

std::string_view to_string(BlockRole r);
std::string_view to_string(EntryKind k);

// One configurable element. Routing muxes select among RRG edges; CLB
// crossbar muxes select among the I cluster inputs followed by the N BLE
// outputs; a LUT holds 2^K table bits; FF init and output select are 2-way.
struct ConfigEntry
{
    EntryKind kind = EntryKind::RoutingMux;
    BlockRole owner = BlockRole::Sb;
    int layer = 0;
    int x = 0; // tile, or switch-block corner for Sb/Sb3d
    int y = 0;
    int node = -1; // routing mux: the RRG node it drives
    int ble = -1;  // CLB internals
    int pin = -1;  // crossbar: LUT input pin
    std::vector<int> edges; // routing mux candidates, candidate 0 first
    int fanin = 0;
    int width = 0; // config bits
    long offset = 0;
};

struct ClbSite
{
    int layer = 0;
    int x = 0;
    int y = 0;
    std::vector<std::vector<int>> crossbar; // [ble][pin] -> entry
    std::vector<int> lut, ff_init, out_sel; // [ble] -> entry
};

// A signal leaving its layer: the source node is exported by its layer module
// and imported by every layer it feeds.
struct CrossLayerPort
{
    int node = -1;
    int from_layer = 0;
    std::vector<int> to_layers;
    std::string name;
};

struct FabricModel
{
    ArchSpec spec;
    RoutingResourceGraph graph;
    int lut_size = 0;
    int cluster_size = 0;
    int clb_inputs = 0;

    std::vector<ConfigEntry> entries;
    std::vector<int> direct;     // RRG edges realised as plain wires
    std::vector<int> node_entry; // node -> routing mux entry, -1 if none
    std::vector<ClbSite> clbs;
    std::vector<int> clb_at; // layer*W*H + y*W + x -> clbs index or -1
    std::vector<CrossLayerPort> ports;
    std::vector<long> layer_offset; // first config bit of each layer
    long config_bits = 0;

    const ClbSite *clb(int layer, int x, int y) const;
    long mux_count() const; // routing + CLB muxes with at least one config bit
};

// Config bits of a mux with `fanin` candidates: ceil(log2(fanin)), 0 for fanin <= 1.
int select_width(int fanin);

// Maps every RRG edge onto a mux candidate slot or a direct wire and lays out
// the configuration bits layer by layer.
FabricModel annotate(const RoutingResourceGraph &g, const ArchSpec &spec);

// Lists RRG edges that are not accounted exactly once (missing, duplicated or
// unknown). Empty when the bijection holds.
std::vector<std::string> audit_coverage(const FabricModel &m, const RoutingResourceGraph &g);

struct NetlistDocument
{
    std::string name; // file name
    std::string text;
};

// Structural netlist: library, top and one module per layer, in that order,
// followed by the manifest.
std::vector<NetlistDocument> emit_netlist(const FabricModel &m);
// "<file> <fnv1a64 hex> <bytes>" per document.
std::string netlist_manifest(const std::vector<NetlistDocument> &docs);

} // namespace fabric3d
