#include "fabric3d/blif.h"

#include "fabric3d/common.h"

#include <algorithm>
#include <fmt/format.h>

namespace fabric3d {

std::vector<Vector> simulate_golden(const LogicNetlist &n, const std::vector<Vector> &inputs)
{
    if (n.topo.size() != n.luts.size() || n.drivers.size() != n.signals.size())
        throw Error("netlist not finished");
    std::vector<uint8_t> value(n.signals.size(), 0);
    std::vector<uint8_t> state(n.latches.size());
    for (size_t i = 0; i < n.latches.size(); ++i)
        state[i] = static_cast<uint8_t>(n.latches[i].init);

    std::vector<Vector> out;
    out.reserve(inputs.size());
    for (size_t cyc = 0; cyc < inputs.size(); ++cyc) {
        const Vector &in = inputs[cyc];
        if (in.size() != n.inputs.size())
            throw Error(fmt::format("vector {} has {} bits, netlist has {} inputs", cyc, in.size(), n.inputs.size()));
        for (size_t i = 0; i < in.size(); ++i)
            value[n.inputs[i]] = in[i] & 1;
        for (size_t i = 0; i < n.latches.size(); ++i)
            value[n.latches[i].q] = state[i];
        for (int li : n.topo) {
            const LutCell &c = n.luts[li];
            size_t idx = 0;
            for (int s : c.inputs)
                idx = (idx << 1) | value[s];
            value[c.output] = c.table[idx];
        }
        Vector o(n.outputs.size());
        for (size_t i = 0; i < n.outputs.size(); ++i)
            o[i] = value[n.outputs[i]];
        out.push_back(std::move(o));
        for (size_t i = 0; i < n.latches.size(); ++i)
            state[i] = value[n.latches[i].d];
    }
    return out;
}

std::vector<Vector> random_vectors(int width, int count, uint64_t seed)
{
    Rng rng(seed);
    std::vector<Vector> v(count, Vector(width));
    for (Vector &row : v)
        for (uint8_t &b : row)
            b = static_cast<uint8_t>(rng.next() & 1);
    return v;
}

LogicNetlist random_netlist(const RandomNetlistParams &p, uint64_t seed)
{
    if (p.inputs < 1 || p.luts < 1 || p.lut_size < 1)
        throw Error("random netlist needs at least one input, one LUT and LUT size 1");
    Rng rng(seed);
    LogicNetlist n;
    n.model = fmt::format("rand_{}", seed);

    std::vector<int> pool;
    std::vector<int> uses;
    auto add_source = [&](const std::string &name) {
        int s = n.intern(name);
        pool.push_back(s);
        uses.resize(n.signals.size(), 0);
        return s;
    };
    for (int i = 0; i < p.inputs; ++i)
        n.inputs.push_back(add_source(fmt::format("pi{}", i)));
    std::vector<int> qs;
    for (int i = 0; i < p.latches; ++i)
        qs.push_back(add_source(fmt::format("q{}", i)));
    if (p.latches > 0)
        n.clock = "clk";

    for (int j = 0; j < p.luts; ++j) {
        int fanin = std::min<int>(static_cast<int>(pool.size()), 2 + rng.below(std::max(1, p.lut_size - 1)));
        fanin = std::min(fanin, p.lut_size);
        LutCell c;
        std::vector<int> unused;
        for (int s : pool)
            if (uses[s] == 0)
                unused.push_back(s);
        while (static_cast<int>(c.inputs.size()) < fanin) {
            // Favour unconsumed signals so few outputs dangle.
            int s;
            if (!unused.empty() && rng.below(2) == 0) {
                int k = rng.below(static_cast<int>(unused.size()));
                s = unused[k];
                unused.erase(unused.begin() + k);
            } else {
                s = pool[rng.below(static_cast<int>(pool.size()))];
            }
            if (std::find(c.inputs.begin(), c.inputs.end(), s) == c.inputs.end())
                c.inputs.push_back(s);
        }
        for (int s : c.inputs)
            ++uses[s];
        c.table.resize(size_t{1} << c.inputs.size());
        // Reject constant tables; they make inputs unobservable.
        do {
            for (uint8_t &b : c.table)
                b = static_cast<uint8_t>(rng.next() & 1);
        } while (std::all_of(c.table.begin(), c.table.end(), [&](uint8_t b) { return b == c.table[0]; }));
        c.output = add_source(fmt::format("n{}", j));
        n.luts.push_back(std::move(c));
    }

    for (int i = 0; i < p.latches; ++i) {
        Latch l;
        l.q = qs[i];
        l.d = n.luts[rng.below(p.luts)].output;
        l.init = static_cast<int>(rng.next() & 1);
        ++uses[l.d];
        n.latches.push_back(l);
    }

    for (const LutCell &c : n.luts)
        if (uses[c.output] == 0)
            n.outputs.push_back(c.output);
    for (int q : qs)
        if (uses[q] == 0)
            n.outputs.push_back(q);
    while (static_cast<int>(n.outputs.size()) < p.outputs) {
        int s = n.luts[rng.below(p.luts)].output;
        if (std::find(n.outputs.begin(), n.outputs.end(), s) == n.outputs.end())
            n.outputs.push_back(s);
        else if (static_cast<int>(n.outputs.size()) >= p.luts)
            break;
    }
    n.finish();
    return n;
}

} // namespace fabric3d
