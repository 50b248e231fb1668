#pragma once

#include "fabric3d/blif.h"
#include "fabric3d/fabric.h"
#include "fabric3d/pack.h"
#include "fabric3d/place.h"
#include "fabric3d/routing.h"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fabric3d {

// Where a primary input or output of the benchmark sits on the fabric.
struct PadBinding
{
    std::string name;
    int layer = 0;
    int x = 0;
    int y = 0;
    int sub = 0;
    bool operator==(const PadBinding &) const = default;
};

struct Bitstream
{
    uint64_t spec_hash = 0;
    std::string benchmark;
    std::vector<uint8_t> bits; // one entry per config bit, 0 or 1
    std::vector<PadBinding> inputs;  // in primary-input order
    std::vector<PadBinding> outputs; // in primary-output order

    // Select value or table slice stored for a model entry.
    uint64_t field(const ConfigEntry &e) const;
    void set_field(const ConfigEntry &e, uint64_t value);
    bool operator==(const Bitstream &) const = default;
};

// Encodes routed mux selects, crossbar selects and LUT/FF contents. Unrouted
// muxes keep select 0. Throws if the routing uses an edge the model lacks.
Bitstream generate_bitstream(const RoutingResult &routing, const Placement &placement, const PackedNetlist &packed,
                             const FabricModel &model);

// Header lines plus hex payload (bit i is bit i%8 of byte i/8).
std::string write_bitstream_text(const Bitstream &b);
Bitstream read_bitstream_text(std::string_view text);
// Payload bytes only; identical to the hex payload of the text form.
std::string bitstream_payload(const Bitstream &b);

// Cycle simulation of the programmed fabric. Only nodes that can influence an
// output are evaluated; a combinational loop among them throws with the loop's
// node list.
std::vector<Vector> simulate_fabric(const FabricModel &model, const Bitstream &b, const std::vector<Vector> &inputs);

struct RoundtripReport
{
    bool pass = false;
    int vectors = 0;
    int mismatches = 0;
    std::string verdict; // single line
    std::string dump;    // first mismatching cycles, empty on pass
};

// pack -> place -> route -> bitstream -> simulate_fabric, compared against
// simulate_golden on random vectors. Unroutable designs propagate.
RoundtripReport verify_roundtrip(const ArchSpec &spec, const LogicNetlist &benchmark, uint64_t seed, int vectors);

} // namespace fabric3d
