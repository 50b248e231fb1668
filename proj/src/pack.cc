#include "fabric3d/pack.h"

#include "fabric3d/common.h"

#include <algorithm>
#include <fmt/format.h>
#include <set>

namespace fabric3d {

namespace {

std::vector<Ble> form_bles(const LogicNetlist &n)
{
    std::vector<int> fanout(n.signals.size(), 0);
    for (const LutCell &c : n.luts)
        for (int s : c.inputs)
            ++fanout[s];
    for (const Latch &l : n.latches)
        ++fanout[l.d];
    for (int s : n.outputs)
        ++fanout[s];

    // A latch shares a BLE with the LUT driving it only when nothing else
    // needs the combinational value.
    std::vector<int> paired(n.luts.size(), -1);
    std::vector<bool> latch_done(n.latches.size(), false);
    for (size_t i = 0; i < n.latches.size(); ++i) {
        const Driver &d = n.drivers[n.latches[i].d];
        if (d.kind == Driver::Lut && fanout[n.latches[i].d] == 1 && paired[d.index] < 0) {
            paired[d.index] = static_cast<int>(i);
            latch_done[i] = true;
        }
    }

    std::vector<Ble> bles;
    for (size_t j = 0; j < n.luts.size(); ++j) {
        const LutCell &c = n.luts[j];
        Ble b;
        b.lut = static_cast<int>(j);
        b.inputs = c.inputs;
        b.table = c.table;
        b.lut_output = c.output;
        if (paired[j] >= 0) {
            b.latch = paired[j];
            b.output = n.latches[paired[j]].q;
        } else {
            b.output = c.output;
        }
        bles.push_back(std::move(b));
    }
    for (size_t i = 0; i < n.latches.size(); ++i) {
        if (latch_done[i])
            continue;
        Ble b;
        b.latch = static_cast<int>(i);
        b.inputs = {n.latches[i].d};
        b.table = {0, 1};
        b.output = n.latches[i].q;
        bles.push_back(std::move(b));
    }
    return bles;
}

std::vector<int> external_inputs(const std::vector<const Ble *> &members)
{
    std::set<int> produced;
    for (const Ble *b : members)
        produced.insert(b->output);
    std::set<int> in;
    for (const Ble *b : members)
        for (int s : b->inputs)
            if (!produced.count(s))
                in.insert(s);
    return {in.begin(), in.end()};
}

} // namespace

PackedNetlist pack(const LogicNetlist &netlist, const ArchSpec &spec)
{
    const int k = spec.lut_size;
    const int n_per = spec.cluster_size;
    const int max_in = clb_input_count(k, n_per);
    for (const LutCell &c : netlist.luts)
        if (static_cast<int>(c.inputs.size()) > k)
            throw Error(fmt::format("LUT '{}' has {} inputs but the architecture LUT size is {}",
                                    netlist.signals[c.output], c.inputs.size(), k));

    PackedNetlist p;
    p.logic = netlist;
    p.lut_size = k;
    p.cluster_size = n_per;

    std::vector<Ble> bles = form_bles(netlist);
    std::vector<std::set<int>> sigs(bles.size());
    for (size_t i = 0; i < bles.size(); ++i) {
        sigs[i].insert(bles[i].inputs.begin(), bles[i].inputs.end());
        sigs[i].insert(bles[i].output);
    }

    std::vector<bool> used(bles.size(), false);
    for (size_t seed = 0; seed < bles.size(); ++seed) {
        if (used[seed])
            continue;
        std::vector<const Ble *> members{&bles[seed]};
        std::vector<size_t> idx{seed};
        std::set<int> cluster_sigs = sigs[seed];
        used[seed] = true;
        while (static_cast<int>(members.size()) < n_per) {
            long best = -1;
            int best_aff = -1;
            for (size_t c = 0; c < bles.size(); ++c) {
                if (used[c])
                    continue;
                int aff = 0;
                for (int s : sigs[c])
                    aff += cluster_sigs.count(s) ? 1 : 0;
                if (aff <= best_aff)
                    continue;
                members.push_back(&bles[c]);
                bool fits = static_cast<int>(external_inputs(members).size()) <= max_in;
                members.pop_back();
                if (fits) {
                    best = static_cast<long>(c);
                    best_aff = aff;
                }
            }
            if (best < 0)
                break;
            used[best] = true;
            members.push_back(&bles[best]);
            idx.push_back(best);
            cluster_sigs.insert(sigs[best].begin(), sigs[best].end());
        }
        if (static_cast<int>(external_inputs({&bles[seed]}).size()) > max_in)
            throw Error(fmt::format("BLE for signal '{}' needs more inputs than a cluster provides",
                                    netlist.signals[bles[seed].output]));
        Cluster cl;
        for (size_t i : idx)
            cl.bles.push_back(bles[i]);
        cl.inputs = external_inputs(members);
        p.clusters.push_back(std::move(cl));
    }

    long clb_tiles = 0, io_slots = 0;
    for (int l = 0; l < spec.layer_count; ++l)
        for (int y = 0; y < spec.grid_height; ++y)
            for (int x = 0; x < spec.grid_width; ++x) {
                BlockKind kind = spec.tile_kind(l, x, y);
                clb_tiles += kind == BlockKind::CLB;
                io_slots += kind == BlockKind::IO ? kIoPadsPerTile : 0;
            }
    if (static_cast<long>(p.clusters.size()) > clb_tiles)
        throw Error(fmt::format("insufficient CLB capacity: {} clusters for {} CLB tiles", p.clusters.size(),
                                clb_tiles));
    long pads = static_cast<long>(netlist.inputs.size() + netlist.outputs.size());
    if (pads > io_slots)
        throw Error(fmt::format("insufficient IO capacity: {} pads for {} IO slots", pads, io_slots));

    build_packed_nets(p);
    return p;
}

void build_packed_nets(PackedNetlist &p)
{
    const LogicNetlist &n = p.logic;
    p.blocks.clear();
    p.nets.clear();
    p.signal_block.assign(n.signals.size(), -1);
    p.cluster_block.assign(p.clusters.size(), -1);
    std::vector<int> driver_pin(n.signals.size(), 0);

    for (size_t c = 0; c < p.clusters.size(); ++c) {
        p.cluster_block[c] = static_cast<int>(p.blocks.size());
        p.blocks.push_back({PlaceBlock::Clb, static_cast<int>(c), fmt::format("clb{}", c)});
        for (size_t b = 0; b < p.clusters[c].bles.size(); ++b) {
            int s = p.clusters[c].bles[b].output;
            p.signal_block[s] = p.cluster_block[c];
            driver_pin[s] = static_cast<int>(b);
        }
    }
    for (int s : n.inputs) {
        p.signal_block[s] = static_cast<int>(p.blocks.size());
        p.blocks.push_back({PlaceBlock::InPad, s, n.signals[s]});
    }
    std::vector<std::vector<Terminal>> sinks(n.signals.size());
    for (size_t c = 0; c < p.clusters.size(); ++c)
        for (int s : p.clusters[c].inputs)
            sinks[s].push_back({p.cluster_block[c], -1});
    for (int s : n.outputs) {
        int blk = static_cast<int>(p.blocks.size());
        p.blocks.push_back({PlaceBlock::OutPad, s, "out:" + n.signals[s]});
        sinks[s].push_back({blk, 0});
    }
    for (size_t s = 0; s < n.signals.size(); ++s) {
        if (sinks[s].empty())
            continue;
        if (p.signal_block[s] < 0)
            throw Error(fmt::format("signal '{}' has sinks but no placed driver", n.signals[s]));
        PackedNet net;
        net.name = n.signals[s];
        net.signal = static_cast<int>(s);
        net.driver = {p.signal_block[s], driver_pin[s]};
        net.sinks = std::move(sinks[s]);
        p.nets.push_back(std::move(net));
    }
}

} // namespace fabric3d
