#include "fabric3d/bitstream.h"
#include "fabric3d/common.h"

#include <algorithm>
#include <fmt/format.h>

namespace fabric3d {

namespace {

// Value ids: RRG nodes first, then per CLB site and BLE a LUT output and a BLE
// output.
class FabricSim
{
  public:
    FabricSim(const FabricModel &m, const Bitstream &b) : m_(m), g_(m.graph), b_(b)
    {
        if (b.bits.size() != static_cast<size_t>(m.config_bits))
            throw Error(fmt::format("bitstream has {} bits, fabric needs {}", b.bits.size(), m.config_bits));
        nv_ = static_cast<int>(g_.nodes.size());
        const int n_ble = m.cluster_size;
        total_ = nv_ + 2 * static_cast<int>(m.clbs.size()) * n_ble;
        value_.assign(total_, 0);
        mark_.assign(total_, 0);

        // Site of each CLB tile, and the pins each LUT's table depends on.
        site_of_tile_.assign(g_.tiles.size(), -1);
        const int k = m.lut_size;
        for (size_t s = 0; s < m.clbs.size(); ++s) {
            const ClbSite &c = m.clbs[s];
            site_of_tile_[(static_cast<size_t>(c.layer) * g_.height + c.y) * g_.width + c.x] = static_cast<int>(s);
            for (int bl = 0; bl < n_ble; ++bl) {
                const ConfigEntry &lut = m.entries[c.lut[bl]];
                uint32_t mask = 0;
                for (int q = 0; q < k; ++q) {
                    const int bit = 1 << (k - 1 - q);
                    for (int p = 0; p < (1 << k) && !(mask & (1u << q)); ++p)
                        if (b.bits[lut.offset + p] != b.bits[lut.offset + (p ^ bit)])
                            mask |= 1u << q;
                }
                dep_mask_.push_back(mask);
                state_.push_back(static_cast<uint8_t>(b.field(m.entries[c.ff_init[bl]])));
            }
        }
        for (const PadBinding &p : b.inputs)
            in_node_.push_back(p.sub < 0 ? -1 : pad_node(p, true));
        for (const PadBinding &p : b.outputs) {
            if (p.sub < 0)
                throw Error(fmt::format("output '{}' is not bound to a pad", p.name));
            out_node_.push_back(pad_node(p, false));
        }
    }

    Vector step(const Vector &in)
    {
        if (in.size() != in_node_.size())
            throw Error(fmt::format("input vector has {} bits, bitstream binds {}", in.size(), in_node_.size()));
        std::fill(mark_.begin(), mark_.end(), 0);
        pad_value_.assign(nv_, 0);
        for (size_t i = 0; i < in.size(); ++i)
            if (in_node_[i] >= 0)
                pad_value_[in_node_[i]] = in[i] & 1;
        ff_read_.clear();
        ff_seen_.assign(state_.size(), 0);

        Vector out(out_node_.size());
        for (size_t i = 0; i < out_node_.size(); ++i)
            out[i] = eval(out_node_[i]);
        // Next state for every flip-flop whose output was observed, including
        // those only reached through other flip-flops' inputs.
        std::vector<uint8_t> next;
        for (size_t i = 0; i < ff_read_.size(); ++i) {
            const int f = ff_read_[i];
            next.push_back(eval(nv_ + 2 * f));
        }
        for (size_t i = 0; i < ff_read_.size(); ++i)
            state_[ff_read_[i]] = next[i];
        return out;
    }

  private:
    int pad_node(const PadBinding &p, bool input) const
    {
        if (p.layer < 0 || p.layer >= g_.layer_count || p.x < 0 || p.x >= g_.width || p.y < 0 || p.y >= g_.height)
            throw Error(fmt::format("pad '{}' lies outside the fabric", p.name));
        const TileInfo &t = g_.tile(p.layer, p.x, p.y);
        const auto &v = input ? t.sources : t.ipins;
        if (t.kind != BlockKind::IO || p.sub >= static_cast<int>(v.size()))
            throw Error(fmt::format("pad '{}' is not on an IO slot", p.name));
        return v[p.sub];
    }

    // Values `id` reads under the current configuration. Empty for
    // constants, pad inputs and flip-flop outputs.
    void deps(int id, std::vector<int> &out)
    {
        out.clear();
        if (id >= nv_) {
            const int f = (id - nv_) / 2;
            const int site = f / m_.cluster_size, bl = f % m_.cluster_size;
            const ClbSite &c = m_.clbs[site];
            if ((id - nv_) % 2 == 1) { // BLE output
                if (!b_.field(m_.entries[c.out_sel[bl]]))
                    out.push_back(id - 1);
                return;
            }
            const uint32_t mask = dep_mask_[f];
            for (int q = 0; q < m_.lut_size; ++q)
                if (mask & (1u << q))
                    out.push_back(crossbar_source(c, site, bl, q));
            return;
        }
        const RRNode &n = g_.nodes[id];
        if (n.kind == NodeKind::Source) {
            const size_t ti = (static_cast<size_t>(n.layer) * g_.height + n.ylo) * g_.width + n.xlo;
            if (site_of_tile_[ti] >= 0)
                out.push_back(nv_ + 2 * (site_of_tile_[ti] * m_.cluster_size + source_index(id)) + 1);
            return;
        }
        const int entry = m_.node_entry[id];
        if (entry >= 0) {
            const ConfigEntry &e = m_.entries[entry];
            const uint64_t sel = b_.field(e);
            if (sel >= e.edges.size())
                throw Error(fmt::format("mux driving node {} selects input {} of {}", id, sel, e.edges.size()));
            out.push_back(g_.edges[e.edges[sel]].src);
            return;
        }
        if (g_.fanin(id).size() == 1)
            out.push_back(g_.edges[g_.fanin(id)[0]].src);
    }

    int source_index(int id) const
    {
        const RRNode &n = g_.nodes[id];
        const auto &s = g_.tile(n.layer, n.xlo, n.ylo).sources;
        return static_cast<int>(std::find(s.begin(), s.end(), id) - s.begin());
    }

    int crossbar_source(const ClbSite &c, int site, int bl, int q) const
    {
        const ConfigEntry &e = m_.entries[c.crossbar[bl][q]];
        const uint64_t sel = b_.field(e);
        if (sel < static_cast<uint64_t>(m_.clb_inputs))
            return g_.tile(c.layer, c.x, c.y).ipins.at(sel);
        if (sel < static_cast<uint64_t>(m_.clb_inputs + m_.cluster_size))
            return nv_ + 2 * (site * m_.cluster_size + static_cast<int>(sel - m_.clb_inputs)) + 1;
        throw Error(fmt::format("crossbar of BLE {} at ({},{},{}) selects input {}", bl, c.layer, c.x, c.y, sel));
    }

    uint8_t compute(int id, const std::vector<int> &d)
    {
        if (id >= nv_) {
            const int f = (id - nv_) / 2;
            if ((id - nv_) % 2 == 1) {
                if (d.empty()) {
                    if (!ff_seen_[f]) {
                        ff_seen_[f] = 1;
                        ff_read_.push_back(f);
                    }
                    return state_[f];
                }
                return value_[d[0]];
            }
            const ClbSite &c = m_.clbs[f / m_.cluster_size];
            const ConfigEntry &lut = m_.entries[c.lut[f % m_.cluster_size]];
            const uint32_t mask = dep_mask_[f];
            int p = 0;
            size_t j = 0;
            for (int q = 0; q < m_.lut_size; ++q)
                if (mask & (1u << q))
                    p |= value_[d[j++]] << (m_.lut_size - 1 - q);
            return b_.bits[lut.offset + p];
        }
        if (g_.nodes[id].kind == NodeKind::Source && d.empty())
            return pad_value_[id];
        return d.empty() ? 0 : value_[d[0]];
    }

    // Iterative depth-first evaluation; mark 1 = on the stack, 2 = done.
    uint8_t eval(int root)
    {
        if (mark_[root] == 2)
            return value_[root];
        struct Frame
        {
            int id;
            std::vector<int> deps;
            size_t next;
        };
        std::vector<Frame> stack;
        stack.push_back({root, {}, 0});
        deps(root, stack.back().deps);
        mark_[root] = 1;
        while (!stack.empty()) {
            Frame &f = stack.back();
            if (f.next < f.deps.size()) {
                const int d = f.deps[f.next++];
                if (mark_[d] == 2)
                    continue;
                if (mark_[d] == 1)
                    throw Error("combinational loop through " + describe_loop(stack, d));
                mark_[d] = 1;
                Frame nf{d, {}, 0};
                deps(d, nf.deps);
                stack.push_back(std::move(nf));
                continue;
            }
            value_[f.id] = compute(f.id, f.deps);
            mark_[f.id] = 2;
            stack.pop_back();
        }
        return value_[root];
    }

    template <class Stack>
    std::string describe_loop(const Stack &stack, int start) const
    {
        std::string s;
        bool on = false;
        for (const auto &f : stack) {
            on = on || f.id == start;
            if (!on)
                continue;
            if (!s.empty())
                s += " -> ";
            s += f.id < nv_ ? fmt::format("{}", f.id) : fmt::format("ble{}", (f.id - nv_) / 2);
        }
        return s;
    }

    const FabricModel &m_;
    const RoutingResourceGraph &g_;
    const Bitstream &b_;
    int nv_ = 0;
    int total_ = 0;
    std::vector<uint8_t> value_, mark_, pad_value_;
    std::vector<int> site_of_tile_;
    std::vector<uint32_t> dep_mask_;
    std::vector<uint8_t> state_;
    std::vector<int> ff_read_;
    std::vector<uint8_t> ff_seen_;
    std::vector<int> in_node_, out_node_;
};

} // namespace

std::vector<Vector> simulate_fabric(const FabricModel &model, const Bitstream &b, const std::vector<Vector> &inputs)
{
    FabricSim sim(model, b);
    std::vector<Vector> out;
    out.reserve(inputs.size());
    for (const Vector &v : inputs)
        out.push_back(sim.step(v));
    return out;
}

} // namespace fabric3d
