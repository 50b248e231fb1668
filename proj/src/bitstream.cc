#include "fabric3d/bitstream.h"

#include "fabric3d/common.h"
#include "fabric3d/route.h"
#include "fabric3d/vertical.h"

#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <unordered_map>

namespace fabric3d {

uint64_t Bitstream::field(const ConfigEntry &e) const
{
    uint64_t v = 0;
    for (int i = 0; i < e.width && i < 64; ++i)
        v |= static_cast<uint64_t>(bits.at(e.offset + i) & 1) << i;
    return v;
}

void Bitstream::set_field(const ConfigEntry &e, uint64_t value)
{
    for (int i = 0; i < e.width && i < 64; ++i)
        bits.at(e.offset + i) = static_cast<uint8_t>((value >> i) & 1);
}

namespace {

void set_table(Bitstream &b, const ConfigEntry &e, const std::vector<uint8_t> &table, int k)
{
    // Logical pin 0 is the table MSB and the physical LUT's leading pins carry
    // the used inputs, so trailing physical pins are don't-cares.
    int f = 0;
    while ((size_t{1} << f) < table.size())
        ++f;
    if ((size_t{1} << f) != table.size() || f > k)
        throw Error(fmt::format("LUT table of {} entries does not fit a {}-input LUT", table.size(), k));
    for (int p = 0; p < (1 << k); ++p)
        b.bits.at(e.offset + p) = table[static_cast<size_t>(p) >> (k - f)] & 1;
}

PadBinding bind(const std::string &name, const Loc &l) { return {name, l.layer, l.x, l.y, l.sub}; }

} // namespace

Bitstream generate_bitstream(const RoutingResult &routing, const Placement &placement, const PackedNetlist &packed,
                             const FabricModel &model)
{
    const RoutingResourceGraph &g = model.graph;
    Bitstream b;
    b.spec_hash = g.spec_hash;
    b.benchmark = packed.logic.model;
    b.bits.assign(model.config_bits, 0);
    if (packed.lut_size > model.lut_size || packed.cluster_size > model.cluster_size)
        throw Error("packed netlist does not fit the fabric's CLB");

    std::vector<char> is_direct(g.edges.size(), 0);
    for (int e : model.direct)
        is_direct[e] = 1;
    std::vector<char> set(model.entries.size(), 0);
    std::unordered_map<std::string, const RouteTree *> tree_of;
    for (const RouteTree &t : routing.nets) {
        tree_of[t.name] = &t;
        for (size_t i = 1; i < t.nodes.size(); ++i) {
            const int e = t.edges[i];
            if (e < 0 || e >= static_cast<int>(g.edges.size()) || g.edges[e].dst != t.nodes[i])
                throw Error(fmt::format("net '{}': routed edge {} into node {} is not in the fabric", t.name, e, t.nodes[i]));
            const int entry = model.node_entry[t.nodes[i]];
            if (entry < 0) {
                if (!is_direct[e])
                    throw Error(fmt::format("net '{}': routed edge {} is not in the fabric", t.name, e));
                continue;
            }
            const ConfigEntry &c = model.entries[entry];
            auto it = std::find(c.edges.begin(), c.edges.end(), e);
            if (it == c.edges.end())
                throw Error(fmt::format("net '{}': routed edge {} is not a candidate of its mux", t.name, e));
            const uint64_t sel = static_cast<uint64_t>(it - c.edges.begin());
            if (set[entry] && b.field(c) != sel)
                throw Error(fmt::format("net '{}': mux driving node {} already selects another input", t.name, c.node));
            set[entry] = 1;
            b.set_field(c, sel);
        }
    }

    const LogicNetlist &n = packed.logic;
    std::vector<int> net_of_signal(n.signals.size(), -1);
    for (size_t i = 0; i < packed.nets.size(); ++i)
        net_of_signal[packed.nets[i].signal] = static_cast<int>(i);

    for (size_t c = 0; c < packed.clusters.size(); ++c) {
        const Cluster &cl = packed.clusters[c];
        const Loc &loc = placement.loc.at(packed.cluster_block[c]);
        const ClbSite *site = model.clb(loc.layer, loc.x, loc.y);
        if (!site)
            throw Error(fmt::format("cluster {} placed on a tile without a CLB", c));
        const TileInfo &tile = g.tile(loc.layer, loc.x, loc.y);
        for (size_t bi = 0; bi < cl.bles.size(); ++bi) {
            const Ble &ble = cl.bles[bi];
            for (size_t q = 0; q < ble.inputs.size(); ++q) {
                const int s = ble.inputs[q];
                int sel = -1;
                for (size_t j = 0; j < cl.bles.size() && sel < 0; ++j)
                    if (cl.bles[j].output == s)
                        sel = model.clb_inputs + static_cast<int>(j);
                if (sel < 0) {
                    const int ni = net_of_signal[s];
                    auto it = ni >= 0 ? tree_of.find(packed.nets[ni].name) : tree_of.end();
                    if (it == tree_of.end())
                        throw Error(fmt::format("signal '{}' has no routed net", n.signals[s]));
                    const RouteTree &t = *it->second;
                    for (size_t i = 1; i < t.nodes.size() && sel < 0; ++i)
                        if (t.nodes[i] == tile.sinks.at(0)) {
                            const int ipin = g.edges[t.edges[i]].src;
                            auto p = std::find(tile.ipins.begin(), tile.ipins.end(), ipin);
                            sel = static_cast<int>(p - tile.ipins.begin());
                        }
                    if (sel < 0)
                        throw Error(fmt::format("net '{}' does not reach cluster {}", t.name, c));
                }
                b.set_field(model.entries[site->crossbar[bi][q]], static_cast<uint64_t>(sel));
            }
            set_table(b, model.entries[site->lut[bi]], ble.table, model.lut_size);
            if (ble.registered()) {
                b.set_field(model.entries[site->ff_init[bi]], n.latches[ble.latch].init == 1 ? 1 : 0);
                b.set_field(model.entries[site->out_sel[bi]], 1);
            }
        }
    }

    // Bindings follow primary input/output order; an unused pad keeps sub -1.
    std::vector<int> outpad(n.signals.size(), -1);
    for (size_t bi = 0; bi < packed.blocks.size(); ++bi)
        if (packed.blocks[bi].kind == PlaceBlock::OutPad)
            outpad[packed.blocks[bi].index] = static_cast<int>(bi);
    for (int s : n.inputs) {
        const int bi = packed.signal_block[s];
        if (bi >= 0 && packed.blocks[bi].kind == PlaceBlock::InPad)
            b.inputs.push_back(bind(n.signals[s], placement.loc.at(bi)));
        else
            b.inputs.push_back({n.signals[s], 0, 0, 0, -1});
    }
    for (int s : n.outputs) {
        if (outpad[s] < 0)
            throw Error(fmt::format("output '{}' has no pad", n.signals[s]));
        b.outputs.push_back(bind(n.signals[s], placement.loc.at(outpad[s])));
    }
    return b;
}

std::string bitstream_payload(const Bitstream &b)
{
    std::string out((b.bits.size() + 7) / 8, '\0');
    for (size_t i = 0; i < b.bits.size(); ++i)
        if (b.bits[i] & 1)
            out[i / 8] = static_cast<char>(static_cast<uint8_t>(out[i / 8]) | (1u << (i % 8)));
    return out;
}

std::string write_bitstream_text(const Bitstream &b)
{
    std::string out = "bitstream 1\n";
    out += fmt::format("spec_hash {}\n", hex64(b.spec_hash));
    out += fmt::format("benchmark {}\n", b.benchmark.empty() ? "-" : b.benchmark);
    out += fmt::format("bits {}\n", b.bits.size());
    for (const PadBinding &p : b.inputs)
        out += fmt::format("input {} {} {} {} {}\n", p.name, p.layer, p.x, p.y, p.sub);
    for (const PadBinding &p : b.outputs)
        out += fmt::format("output {} {} {} {} {}\n", p.name, p.layer, p.x, p.y, p.sub);
    const std::string payload = bitstream_payload(b);
    out += fmt::format("payload {}\n", payload.size());
    for (size_t i = 0; i < payload.size(); i += 32) {
        for (size_t j = i; j < payload.size() && j < i + 32; ++j)
            out += fmt::format("{:02x}", static_cast<uint8_t>(payload[j]));
        out += "\n";
    }
    out += "end\n";
    return out;
}

Bitstream read_bitstream_text(std::string_view text)
{
    std::vector<std::string_view> lines;
    for (size_t pos = 0; pos < text.size();) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        lines.push_back(trim(text.substr(pos, eol - pos)));
        pos = eol + 1;
    }
    size_t li = 0;
    auto next = [&](std::string_view key) {
        if (li >= lines.size())
            throw ParseError("unexpected end of document", static_cast<int>(li));
        auto f = split_ws(lines[li]);
        ++li;
        if (f.empty() || f[0] != key)
            throw ParseError(fmt::format("expected '{}'", key), static_cast<int>(li));
        return f;
    };
    auto num = [&](std::string_view s, auto &out) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ParseError(fmt::format("bad number '{}'", s), static_cast<int>(li));
    };

    Bitstream b;
    auto f = next("bitstream");
    if (f.size() != 2 || f[1] != "1")
        throw ParseError("unsupported bitstream version", 1);
    f = next("spec_hash");
    if (f.size() != 2)
        throw ParseError("expected 'spec_hash <hex>'", static_cast<int>(li));
    {
        auto [p, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), b.spec_hash, 16);
        if (ec != std::errc() || p != f[1].data() + f[1].size())
            throw ParseError("bad spec hash", static_cast<int>(li));
    }
    f = next("benchmark");
    b.benchmark = f.size() > 1 && f[1] != "-" ? std::string(f[1]) : "";
    f = next("bits");
    size_t nbits = 0;
    if (f.size() != 2)
        throw ParseError("expected 'bits <n>'", static_cast<int>(li));
    num(f[1], nbits);
    while (li < lines.size()) {
        auto g = split_ws(lines[li]);
        if (g.empty() || (g[0] != "input" && g[0] != "output"))
            break;
        ++li;
        if (g.size() != 6)
            throw ParseError("expected '<input|output> <name> <layer> <x> <y> <sub>'", static_cast<int>(li));
        PadBinding p;
        p.name = std::string(g[1]);
        num(g[2], p.layer);
        num(g[3], p.x);
        num(g[4], p.y);
        num(g[5], p.sub);
        (g[0] == "input" ? b.inputs : b.outputs).push_back(std::move(p));
    }
    f = next("payload");
    size_t nbytes = 0;
    if (f.size() != 2)
        throw ParseError("expected 'payload <bytes>'", static_cast<int>(li));
    num(f[1], nbytes);
    if (nbytes != (nbits + 7) / 8)
        throw ParseError(fmt::format("payload of {} bytes does not hold {} bits", nbytes, nbits), static_cast<int>(li));
    std::string payload;
    while (li < lines.size() && lines[li] != "end") {
        std::string_view h = lines[li++];
        if (h.size() % 2)
            throw ParseError("odd number of hex digits", static_cast<int>(li));
        for (size_t i = 0; i < h.size(); i += 2) {
            unsigned v = 0;
            auto [p, ec] = std::from_chars(h.data() + i, h.data() + i + 2, v, 16);
            if (ec != std::errc() || p != h.data() + i + 2)
                throw ParseError("bad hex digit", static_cast<int>(li));
            payload.push_back(static_cast<char>(v));
        }
    }
    next("end");
    if (payload.size() != nbytes)
        throw ParseError(fmt::format("payload has {} bytes, header says {}", payload.size(), nbytes), static_cast<int>(li));
    b.bits.resize(nbits);
    for (size_t i = 0; i < nbits; ++i)
        b.bits[i] = (static_cast<uint8_t>(payload[i / 8]) >> (i % 8)) & 1;
    for (size_t i = nbits; i < nbytes * 8; ++i)
        if ((static_cast<uint8_t>(payload[i / 8]) >> (i % 8)) & 1)
            throw ParseError("padding bits must be zero", static_cast<int>(li));
    return b;
}

RoundtripReport verify_roundtrip(const ArchSpec &spec, const LogicNetlist &benchmark, uint64_t seed, int vectors)
{
    const RoutingResourceGraph g = extend_to_3d(build_base_rrg(spec), spec, plan_sites(spec, seed));
    const FabricModel model = annotate(g, spec);
    const PackedNetlist packed = pack(benchmark, spec);
    const Placement pl = place(packed, g, seed);
    const RoutingResult r = route(packed, pl, g, DelayModel::from_spec(spec));
    const Bitstream bs = generate_bitstream(r, pl, packed, model);

    const std::vector<Vector> in = random_vectors(static_cast<int>(benchmark.inputs.size()), vectors, seed);
    const std::vector<Vector> want = simulate_golden(benchmark, in);
    const std::vector<Vector> got = simulate_fabric(model, bs, in);

    RoundtripReport rep;
    rep.vectors = vectors;
    auto bits = [](const Vector &v) {
        std::string s;
        for (uint8_t x : v)
            s += x ? '1' : '0';
        return s;
    };
    for (int i = 0; i < vectors; ++i)
        if (want[i] != got[i]) {
            if (++rep.mismatches <= 5)
                rep.dump += fmt::format("cycle {}: in={} expected={} fabric={}\n", i, bits(in[i]), bits(want[i]), bits(got[i]));
        }
    rep.pass = rep.mismatches == 0;
    rep.verdict = fmt::format("{} benchmark={} vectors={} mismatches={} bits={}", rep.pass ? "PASS" : "FAIL",
                              benchmark.model.empty() ? "-" : benchmark.model, vectors, rep.mismatches, bs.bits.size());
    return rep;
}

} // namespace fabric3d
