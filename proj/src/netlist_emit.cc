#include "fabric3d/common.h"
#include "fabric3d/fabric.h"

#include <algorithm>
#include <cctype>
#include <fmt/format.h>
#include <set>

namespace fabric3d {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    for (char &c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Layer-independent net name of a routing node, so homogeneous layers emit
// identical modules.
std::string node_net(const RRNode &n)
{
    switch (n.kind) {
    case NodeKind::Ipin: return fmt::format("ipin_x{}_y{}_{}", n.xlo, n.ylo, n.ptc);
    case NodeKind::Opin: return fmt::format("opin_x{}_y{}_{}", n.xlo, n.ylo, n.ptc);
    case NodeKind::ChanX:
    case NodeKind::ChanY:
        return fmt::format("{}_x{}_y{}_t{}_{}", lower(to_string(n.kind)), n.xlo, n.ylo, n.ptc, lower(to_string(n.dir)));
    case NodeKind::ChanZ: return fmt::format("chanz_x{}_y{}_k{}_{}", n.xlo, n.ylo, n.ptc, lower(to_string(n.dir)));
    default: return fmt::format("{}_x{}_y{}_{}", lower(to_string(n.kind)), n.xlo, n.ylo, n.ptc);
    }
}

std::string block_module(BlockKind k)
{
    switch (k) {
    case BlockKind::CLB: return "clb";
    case BlockKind::IO: return "io";
    case BlockKind::DSP: return "dsp";
    case BlockKind::BRAM: return "bram";
    case BlockKind::RoutingOnly: break;
    }
    return "";
}

class Writer
{
  public:
    void module(const std::string &name, const std::vector<std::string> &ports)
    {
        text_ += "module " + name + " (";
        for (size_t i = 0; i < ports.size(); ++i)
            text_ += (i ? " " : "") + ports[i];
        text_ += ")\n";
    }
    void net(const std::string &name) { text_ += "net " + name + "\n"; }
    void inst(const std::string &mod, const std::string &name, const std::vector<std::pair<std::string, std::string>> &conn)
    {
        text_ += "inst " + mod + " " + name + " (";
        for (size_t i = 0; i < conn.size(); ++i)
            text_ += (i ? "," : "") + conn[i].first + "=" + conn[i].second;
        text_ += ")\n";
    }
    void end() { text_ += "endmodule\n"; }
    std::string take() { return std::move(text_); }

  private:
    std::string text_;
};

std::vector<std::string> numbered(const std::string &dir, const std::string &stem, int n)
{
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i)
        out.push_back(fmt::format("{} {}{}", dir, stem, i));
    return out;
}

void append(std::vector<std::string> &a, const std::vector<std::string> &b) { a.insert(a.end(), b.begin(), b.end()); }

std::string mux_name(int fanin) { return fmt::format("mux{}", fanin); }

// Config bits used by one CLB, in layout order.
long clb_bits(const FabricModel &m)
{
    const int xb = select_width(m.clb_inputs + m.cluster_size);
    return static_cast<long>(m.cluster_size) * (m.lut_size * xb + (1L << m.lut_size) + 2);
}

std::string library(const FabricModel &m, const std::set<int> &mux_sizes, const std::set<BlockKind> &blocks)
{
    Writer w;
    const int k = m.lut_size, nb = m.cluster_size, ni = m.clb_inputs;
    for (int f : mux_sizes) {
        std::vector<std::string> ports = numbered("input", "i", f);
        append(ports, numbered("input", "s", select_width(f)));
        ports.push_back("output o");
        w.module(mux_name(f), ports);
        w.end();
    }
    {
        std::vector<std::string> ports = numbered("input", "a", k);
        append(ports, numbered("input", "c", 1 << k));
        ports.push_back("output o");
        w.module(fmt::format("lut{}", k), ports);
        w.end();
    }
    w.module("dff", {"input d", "input clk", "input init", "output q"});
    w.end();
    w.module("cfgbit", {"output q"});
    w.end();
    w.module("buf", {"input i", "output o"});
    w.end();

    if (blocks.count(BlockKind::CLB)) {
        const int xfan = ni + nb, xw = select_width(xfan);
        std::vector<std::string> ports{"input clk"};
        append(ports, numbered("input", "ipin", ni));
        append(ports, numbered("input", "cfg", static_cast<int>(clb_bits(m))));
        append(ports, numbered("output", "opin", nb));
        w.module("clb", ports);
        int bit = 0;
        auto cfg = [&]() { return fmt::format("cfg{}", bit++); };
        for (int b = 0; b < nb; ++b) {
            for (int q = 0; q < k; ++q)
                w.net(fmt::format("xb{}_{}", b, q));
            w.net(fmt::format("lut{}", b));
            w.net(fmt::format("ff{}", b));
        }
        for (int b = 0; b < nb; ++b) {
            for (int q = 0; q < k; ++q) {
                std::vector<std::pair<std::string, std::string>> c;
                for (int i = 0; i < ni; ++i)
                    c.emplace_back(fmt::format("i{}", i), fmt::format("ipin{}", i));
                for (int j = 0; j < nb; ++j)
                    c.emplace_back(fmt::format("i{}", ni + j), fmt::format("opin{}", j));
                for (int s = 0; s < xw; ++s)
                    c.emplace_back(fmt::format("s{}", s), cfg());
                c.emplace_back("o", fmt::format("xb{}_{}", b, q));
                w.inst(mux_name(xfan), fmt::format("xbar{}_{}", b, q), c);
            }
            std::vector<std::pair<std::string, std::string>> c;
            for (int q = 0; q < k; ++q)
                c.emplace_back(fmt::format("a{}", q), fmt::format("xb{}_{}", b, q));
            for (int t = 0; t < (1 << k); ++t)
                c.emplace_back(fmt::format("c{}", t), cfg());
            c.emplace_back("o", fmt::format("lut{}", b));
            w.inst(fmt::format("lut{}", k), fmt::format("lut{}", b), c);
            w.inst("dff", fmt::format("ff{}", b),
                   {{"d", fmt::format("lut{}", b)}, {"clk", "clk"}, {"init", cfg()}, {"q", fmt::format("ff{}", b)}});
            w.inst(mux_name(2), fmt::format("osel{}", b),
                   {{"i0", fmt::format("lut{}", b)}, {"i1", fmt::format("ff{}", b)}, {"s0", cfg()}, {"o", fmt::format("opin{}", b)}});
        }
        w.end();
    }
    if (blocks.count(BlockKind::IO)) {
        std::vector<std::string> ports = numbered("input", "ipin", kIoPadsPerTile);
        append(ports, numbered("input", "pad_in", kIoPadsPerTile));
        append(ports, numbered("output", "opin", kIoPadsPerTile));
        append(ports, numbered("output", "pad_out", kIoPadsPerTile));
        w.module("io", ports);
        for (int s = 0; s < kIoPadsPerTile; ++s) {
            w.inst("buf", fmt::format("in{}", s), {{"i", fmt::format("pad_in{}", s)}, {"o", fmt::format("opin{}", s)}});
            w.inst("buf", fmt::format("out{}", s), {{"i", fmt::format("ipin{}", s)}, {"o", fmt::format("pad_out{}", s)}});
        }
        w.end();
    }
    for (BlockKind bk : {BlockKind::DSP, BlockKind::BRAM}) {
        if (!blocks.count(bk))
            continue;
        TilePins tp = tile_pins(m.spec, bk);
        std::vector<std::string> ports = numbered("input", "ipin", tp.inputs);
        append(ports, numbered("output", "opin", tp.outputs));
        w.module(block_module(bk), ports);
        w.end();
    }
    return w.take();
}

struct LayerPorts
{
    std::vector<std::string> pads_in, pads_out; // local names
    std::vector<int> imports, exports;          // port indices
};

std::string layer_module(const FabricModel &m, int l, LayerPorts &lp)
{
    const RoutingResourceGraph &g = m.graph;
    Writer w;
    std::vector<int> port_of(g.nodes.size(), -1);
    for (size_t i = 0; i < m.ports.size(); ++i) {
        const CrossLayerPort &p = m.ports[i];
        if (p.from_layer == l)
            lp.exports.push_back(static_cast<int>(i));
        if (std::find(p.to_layers.begin(), p.to_layers.end(), l) != p.to_layers.end()) {
            lp.imports.push_back(static_cast<int>(i));
            port_of[p.node] = static_cast<int>(i);
        }
    }
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            if (g.tile(l, x, y).kind == BlockKind::IO)
                for (int s = 0; s < kIoPadsPerTile; ++s) {
                    lp.pads_in.push_back(fmt::format("pi_x{}_y{}_s{}", x, y, s));
                    lp.pads_out.push_back(fmt::format("po_x{}_y{}_s{}", x, y, s));
                }

    std::vector<std::string> ports{"input clk"};
    for (const std::string &p : lp.pads_in)
        ports.push_back("input " + p);
    for (int i : lp.imports)
        ports.push_back("input " + m.ports[i].name);
    for (const std::string &p : lp.pads_out)
        ports.push_back("output " + p);
    for (int i : lp.exports)
        ports.push_back("output " + m.ports[i].name);
    w.module(fmt::format("layer_{}", l + 1), ports);

    auto src_net = [&](int node) {
        if (g.nodes[node].layer != l)
            return m.ports.at(port_of[node]).name;
        return node_net(g.nodes[node]);
    };
    const long base = m.layer_offset[l];
    const long end = l + 1 < static_cast<int>(m.layer_offset.size()) ? m.layer_offset[l + 1] : m.config_bits;
    auto bit = [&](long global) { return fmt::format("c{}", global - base); };

    for (size_t v = 0; v < g.nodes.size(); ++v) {
        const RRNode &n = g.nodes[v];
        if (n.layer == l && n.kind != NodeKind::Source && n.kind != NodeKind::Sink)
            w.net(node_net(n));
    }
    for (long b = base; b < end; ++b)
        w.net(bit(b));
    for (long b = base; b < end; ++b)
        w.inst("cfgbit", fmt::format("cfg{}", b - base), {{"q", bit(b)}});

    int pad = 0;
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            const TileInfo &t = g.tile(l, x, y);
            const std::string mod = block_module(t.kind);
            if (mod.empty())
                continue;
            std::vector<std::pair<std::string, std::string>> c;
            if (t.kind == BlockKind::CLB)
                c.emplace_back("clk", "clk");
            for (size_t i = 0; i < t.ipins.size(); ++i)
                c.emplace_back(fmt::format("ipin{}", i), node_net(g.nodes[t.ipins[i]]));
            if (t.kind == BlockKind::IO)
                for (int s = 0; s < kIoPadsPerTile; ++s)
                    c.emplace_back(fmt::format("pad_in{}", s), lp.pads_in[pad + s]);
            if (t.kind == BlockKind::CLB) {
                const ClbSite *site = m.clb(l, x, y);
                const long first = m.entries[site->crossbar[0][0]].offset;
                for (long b = 0; b < clb_bits(m); ++b)
                    c.emplace_back(fmt::format("cfg{}", b), bit(first + b));
            }
            for (size_t i = 0; i < t.opins.size(); ++i)
                c.emplace_back(fmt::format("opin{}", i), node_net(g.nodes[t.opins[i]]));
            if (t.kind == BlockKind::IO) {
                for (int s = 0; s < kIoPadsPerTile; ++s)
                    c.emplace_back(fmt::format("pad_out{}", s), lp.pads_out[pad + s]);
                pad += kIoPadsPerTile;
            }
            w.inst(mod, fmt::format("{}_x{}_y{}", mod, x, y), c);
        }

    for (const ConfigEntry &e : m.entries) {
        if (e.kind != EntryKind::RoutingMux || e.layer != l)
            continue;
        std::vector<std::pair<std::string, std::string>> c;
        for (size_t i = 0; i < e.edges.size(); ++i)
            c.emplace_back(fmt::format("i{}", i), src_net(g.edges[e.edges[i]].src));
        for (int s = 0; s < e.width; ++s)
            c.emplace_back(fmt::format("s{}", s), bit(e.offset + s));
        const std::string out = node_net(g.nodes[e.node]);
        c.emplace_back("o", out);
        w.inst(mux_name(e.fanin), fmt::format("{}_x{}_y{}_{}", to_string(e.owner), e.x, e.y, out), c);
    }
    // Plain wires; edges into SINKs and out of SOURCEs live inside the blocks.
    for (int e : m.direct) {
        const RREdge &ed = g.edges[e];
        const RRNode &d = g.nodes[ed.dst];
        if (d.layer != l || d.kind == NodeKind::Sink || g.nodes[ed.src].kind == NodeKind::Source)
            continue;
        const std::string out = node_net(d);
        w.inst("buf", "wire_" + out, {{"i", src_net(ed.src)}, {"o", out}});
    }
    for (int i : lp.exports)
        w.inst("buf", "export_" + m.ports[i].name, {{"i", node_net(g.nodes[m.ports[i].node])}, {"o", m.ports[i].name}});
    w.end();
    return w.take();
}

} // namespace

std::vector<NetlistDocument> emit_netlist(const FabricModel &m)
{
    const RoutingResourceGraph &g = m.graph;
    std::set<int> mux_sizes{2};
    for (const ConfigEntry &e : m.entries)
        if (e.kind == EntryKind::RoutingMux || e.kind == EntryKind::Crossbar)
            mux_sizes.insert(e.fanin);
    std::set<BlockKind> blocks;
    for (const TileInfo &t : g.tiles)
        blocks.insert(t.kind);

    std::vector<NetlistDocument> docs;
    docs.push_back({"library.fnl", library(m, mux_sizes, blocks)});

    std::vector<LayerPorts> lps(g.layer_count);
    std::vector<std::string> layer_text;
    for (int l = 0; l < g.layer_count; ++l)
        layer_text.push_back(layer_module(m, l, lps[l]));

    Writer w;
    std::vector<std::string> ports{"input clk"};
    for (int l = 0; l < g.layer_count; ++l)
        for (const std::string &p : lps[l].pads_in)
            ports.push_back(fmt::format("input l{}_{}", l + 1, p));
    for (int l = 0; l < g.layer_count; ++l)
        for (const std::string &p : lps[l].pads_out)
            ports.push_back(fmt::format("output l{}_{}", l + 1, p));
    w.module("top", ports);
    for (const CrossLayerPort &p : m.ports)
        w.net(p.name);
    for (int l = 0; l < g.layer_count; ++l) {
        std::vector<std::pair<std::string, std::string>> c{{"clk", "clk"}};
        for (const std::string &p : lps[l].pads_in)
            c.emplace_back(p, fmt::format("l{}_{}", l + 1, p));
        for (int i : lps[l].imports)
            c.emplace_back(m.ports[i].name, m.ports[i].name);
        for (const std::string &p : lps[l].pads_out)
            c.emplace_back(p, fmt::format("l{}_{}", l + 1, p));
        for (int i : lps[l].exports)
            c.emplace_back(m.ports[i].name, m.ports[i].name);
        w.inst(fmt::format("layer_{}", l + 1), fmt::format("layer_{}", l + 1), c);
    }
    w.end();
    docs.push_back({"top.fnl", w.take()});
    for (int l = 0; l < g.layer_count; ++l)
        docs.push_back({fmt::format("layer_{}.fnl", l + 1), std::move(layer_text[l])});
    return docs;
}

std::string netlist_manifest(const std::vector<NetlistDocument> &docs)
{
    std::string out;
    for (const NetlistDocument &d : docs)
        out += fmt::format("{} {} {}\n", d.name, hex64(fnv1a64(d.text)), d.text.size());
    return out;
}

} // namespace fabric3d
