#include "fabric3d/timing.h"

#include "fabric3d/common.h"
#include "fabric3d/rrg.h"

#include <algorithm>
#include <fmt/format.h>
#include <limits>
#include <unordered_map>

namespace fabric3d {

TimingAnalysis analyze_timing(const TimingGraph &g)
{
    const size_t n = g.names.size();
    std::vector<std::vector<int>> out(n), in(n);
    for (size_t a = 0; a < g.arcs.size(); ++a) {
        out[g.arcs[a].from].push_back(static_cast<int>(a));
        in[g.arcs[a].to].push_back(static_cast<int>(a));
    }
    std::vector<int> indeg(n), order;
    for (size_t v = 0; v < n; ++v) {
        indeg[v] = static_cast<int>(in[v].size());
        if (indeg[v] == 0)
            order.push_back(static_cast<int>(v));
    }
    for (size_t h = 0; h < order.size(); ++h)
        for (int a : out[order[h]])
            if (--indeg[g.arcs[a].to] == 0)
                order.push_back(g.arcs[a].to);
    if (order.size() != n) {
        std::string loop;
        for (size_t v = 0; v < n && loop.size() < 200; ++v)
            if (indeg[v] > 0)
                loop += (loop.empty() ? "" : ", ") + g.names[v];
        throw Error("combinational loop in timing graph: " + loop);
    }

    TimingAnalysis r;
    r.arrival.assign(n, 0.0);
    std::vector<int> pred(n, -1);
    for (int v : order)
        for (int a : in[v]) {
            double t = r.arrival[g.arcs[a].from] + g.arcs[a].delay_ps;
            if (pred[v] < 0 || t > r.arrival[v]) {
                r.arrival[v] = t;
                pred[v] = g.arcs[a].from;
            }
        }
    int worst = -1;
    for (size_t v = 0; v < n; ++v)
        if (g.is_end[v] && (worst < 0 || r.arrival[v] > r.cpd_ps)) {
            worst = static_cast<int>(v);
            r.cpd_ps = r.arrival[v];
        }

    const double inf = std::numeric_limits<double>::infinity();
    r.required.assign(n, inf);
    for (size_t v = 0; v < n; ++v)
        if (g.is_end[v])
            r.required[v] = r.cpd_ps;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        for (int a : out[*it])
            r.required[*it] = std::min(r.required[*it], r.required[g.arcs[a].to] - g.arcs[a].delay_ps);

    for (int v = worst; v >= 0; v = pred[v])
        r.critical_path.push_back(v);
    std::reverse(r.critical_path.begin(), r.critical_path.end());
    return r;
}

StaResult sta_from_delays(const PackedNetlist &p, const std::vector<std::vector<double>> &conn_delay,
                          const DelayModel &model)
{
    const LogicNetlist &n = p.logic;
    TimingGraph tg;
    // Node of each signal at its producer, and per net the node where each
    // sink terminal receives it.
    std::vector<int> produced(n.signals.size(), -1);
    for (int s : n.inputs)
        produced[s] = tg.add_node("pi:" + n.signals[s]);

    struct BleNodes
    {
        int lut = -1;
        int d = -1;
    };
    std::vector<std::vector<BleNodes>> ble_nodes(p.clusters.size());
    for (size_t c = 0; c < p.clusters.size(); ++c)
        for (const Ble &b : p.clusters[c].bles) {
            BleNodes bn;
            const std::string &out = n.signals[b.output];
            bn.lut = tg.add_node(fmt::format("lut:{}@clb{}", b.lut >= 0 ? n.signals[b.lut_output] : "pass_" + out, c));
            if (b.registered()) {
                bn.d = tg.add_node(fmt::format("ff_d:{}@clb{}", out, c), true);
                produced[b.output] = tg.add_node(fmt::format("ff_q:{}@clb{}", out, c));
            } else {
                produced[b.output] = bn.lut;
            }
            ble_nodes[c].push_back(bn);
        }

    // (net, sink) -> receiving node
    std::vector<std::vector<int>> recv(p.nets.size());
    for (size_t ni = 0; ni < p.nets.size(); ++ni) {
        const PackedNet &net = p.nets[ni];
        int from = net.signal >= 0 && static_cast<size_t>(net.signal) < produced.size() ? produced[net.signal] : -1;
        if (from < 0)
            throw Error(fmt::format("net '{}' has no timing source", net.name));
        for (size_t si = 0; si < net.sinks.size(); ++si) {
            const PlaceBlock &blk = p.blocks[net.sinks[si].block];
            int node = blk.kind == PlaceBlock::OutPad
                           ? tg.add_node("po:" + n.signals[blk.index], true)
                           : tg.add_node(fmt::format("in:{}@{}", net.name, blk.name));
            double d = ni < conn_delay.size() && si < conn_delay[ni].size() ? conn_delay[ni][si] : 0.0;
            tg.add_arc(from, node, d);
            recv[ni].push_back(node);
        }
    }

    // Signal availability inside each cluster.
    std::vector<int> net_of_signal(n.signals.size(), -1);
    for (size_t ni = 0; ni < p.nets.size(); ++ni)
        net_of_signal[p.nets[ni].signal] = static_cast<int>(ni);
    for (size_t c = 0; c < p.clusters.size(); ++c) {
        const Cluster &cl = p.clusters[c];
        const int blk = p.cluster_block[c];
        auto avail = [&](int s) -> int {
            for (const Ble &b : cl.bles)
                if (b.output == s)
                    return produced[s];
            int ni = net_of_signal[s];
            if (ni >= 0)
                for (size_t si = 0; si < p.nets[ni].sinks.size(); ++si)
                    if (p.nets[ni].sinks[si].block == blk)
                        return recv[ni][si];
            throw Error(fmt::format("signal '{}' does not reach clb{}", n.signals[s], c));
        };
        for (size_t b = 0; b < cl.bles.size(); ++b) {
            const Ble &ble = cl.bles[b];
            for (int s : ble.inputs)
                tg.add_arc(avail(s), ble_nodes[c][b].lut, model.lut_ps);
            if (ble.registered())
                tg.add_arc(ble_nodes[c][b].lut, ble_nodes[c][b].d, model.setup_ps);
        }
    }

    TimingAnalysis ta = analyze_timing(tg);
    StaResult r;
    r.cpd_ps = ta.cpd_ps;
    for (int v : ta.critical_path)
        r.critical_path.push_back(tg.names[v]);
    r.net_slack_ps.assign(p.nets.size(), std::numeric_limits<double>::infinity());
    r.sink_slack_ps.resize(p.nets.size());
    for (size_t ni = 0; ni < p.nets.size(); ++ni)
        for (int node : recv[ni]) {
            double slack = ta.required[node] - ta.arrival[node];
            r.sink_slack_ps[ni].push_back(slack);
            r.net_slack_ps[ni] = std::min(r.net_slack_ps[ni], slack);
        }
    return r;
}

std::vector<std::vector<double>> connection_delays(const RoutingResult &r, const RoutingResourceGraph &g,
                                                   const DelayModel &model)
{
    std::vector<std::vector<double>> out(r.nets.size());
    for (size_t ni = 0; ni < r.nets.size(); ++ni) {
        const RouteTree &t = r.nets[ni];
        std::vector<double> at(t.nodes.size(), 0.0);
        // Parents precede children, so one forward pass suffices.
        std::unordered_map<int, size_t> index;
        for (size_t i = 0; i < t.nodes.size(); ++i) {
            index[t.nodes[i]] = i;
            if (t.edges[i] >= 0) {
                const RREdge &e = g.edges[t.edges[i]];
                at[i] = at[index.at(e.src)] + g.delay_of(t.edges[i], model);
            }
        }
        for (int s : t.sinks) {
            auto it = index.find(s);
            out[ni].push_back(it == index.end() ? 0.0 : at[it->second]);
        }
    }
    return out;
}

StaResult sta(const RoutingResult &r, const PackedNetlist &p, const RoutingResourceGraph &g, const DelayModel &model)
{
    return sta_from_delays(p, connection_delays(r, g, model), model);
}

} // namespace fabric3d
