#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fabric3d {

// Truth table index: the first input is the most significant bit.
struct LutCell
{
    int output = -1;
    std::vector<int> inputs;
    std::vector<uint8_t> table;
};

struct Latch
{
    int d = -1;
    int q = -1;
    int init = 0;
};

struct Driver
{
    enum Kind : uint8_t { None, Input, Lut, Latch } kind = None;
    int index = -1;
};

struct LogicNetlist
{
    std::string model;
    std::vector<std::string> signals;
    std::unordered_map<std::string, int> signal_ids;
    std::vector<int> inputs;
    std::vector<int> outputs;
    std::vector<LutCell> luts;
    std::vector<Latch> latches;
    // Clock of the latches; not a data input. Empty when there are no latches
    // or the clock is implicit.
    std::string clock;

    // Derived by finish(): one driver per signal, sinks as LUT indices.
    std::vector<Driver> drivers;
    std::vector<int> topo; // LUT indices, inputs before consumers

    int find_signal(std::string_view name) const;
    int intern(const std::string &name);
    int max_fanin() const;
    // Computes drivers and topological order; throws on multiple drivers,
    // undriven signals and combinational cycles.
    void finish();
};

LogicNetlist parse_blif(std::string_view text);
LogicNetlist load_blif(const std::string &path);
std::string write_blif(const LogicNetlist &n);

using Vector = std::vector<uint8_t>;

// Cycle-accurate: outputs of each cycle are computed from the latch state and
// that cycle's inputs, then every latch captures its D.
std::vector<Vector> simulate_golden(const LogicNetlist &n, const std::vector<Vector> &inputs);

std::vector<Vector> random_vectors(int width, int count, uint64_t seed);

struct RandomNetlistParams
{
    int inputs = 4;
    int outputs = 3;
    int luts = 20;
    int latches = 0;
    int lut_size = 4;
};

// Random acyclic LUT network; latches break feedback paths so sequential
// designs may loop. Every LUT input is driven and every output observed.
LogicNetlist random_netlist(const RandomNetlistParams &p, uint64_t seed);

} // namespace fabric3d
