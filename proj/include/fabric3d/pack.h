#pragma once

#include "fabric3d/arch.h"
#include "fabric3d/blif.h"

#include <string>
#include <vector>

namespace fabric3d {

// Basic logic element: one K-LUT, an optional flip-flop and the output select.
// `inputs` are the signals on LUT pins 0.. (pin 0 is the table MSB); unused
// pins beyond inputs.size() are don't-cares.
struct Ble
{
    int lut = -1;   // netlist LUT index, -1 for an inserted pass-through
    int latch = -1; // netlist latch index or -1
    std::vector<int> inputs;
    std::vector<uint8_t> table; // 2^inputs.size() entries
    int output = -1;            // signal leaving the BLE (FF Q when registered)
    int lut_output = -1;        // signal produced by the LUT itself
    bool registered() const { return latch >= 0; }
};

struct Cluster
{
    std::vector<Ble> bles;
    // Distinct signals entering from outside, sorted by id.
    std::vector<int> inputs;
};

struct PlaceBlock
{
    enum Kind : uint8_t { Clb, InPad, OutPad } kind = Clb;
    int index = -1; // cluster index, or signal id for pads
    std::string name;
};

// A block pin taking part in a net. For clusters `pin` is the BLE position on
// the driver side and -1 (any equivalent input) on the sink side.
struct Terminal
{
    int block = -1;
    int pin = 0;
    bool operator==(const Terminal &) const = default;
};

struct PackedNet
{
    std::string name;
    int signal = -1;
    Terminal driver;
    std::vector<Terminal> sinks;
};

struct PackedNetlist
{
    LogicNetlist logic;
    int lut_size = 0;
    int cluster_size = 0;
    std::vector<Cluster> clusters;
    std::vector<PlaceBlock> blocks;
    std::vector<PackedNet> nets;

    // Block that holds signal `s`'s producer (cluster, or input pad).
    std::vector<int> signal_block;
    std::vector<int> cluster_block; // cluster index -> block index
};

// Greedy affinity clustering. Throws if a LUT exceeds K or the clusters do not
// fit the CLB tiles (or pads the IO slots) of `spec`.
PackedNetlist pack(const LogicNetlist &netlist, const ArchSpec &spec);

// Rebuilds blocks and nets from clusters (used by pack and by tests that
// assemble clusters by hand).
void build_packed_nets(PackedNetlist &p);

} // namespace fabric3d
