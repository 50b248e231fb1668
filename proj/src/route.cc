#include "fabric3d/route.h"

#include "fabric3d/timing.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <queue>

namespace fabric3d {

std::vector<NetTerminals> net_terminals(const PackedNetlist &p, const Placement &pl, const RoutingResourceGraph &g)
{
    std::vector<NetTerminals> out;
    out.reserve(p.nets.size());
    for (const PackedNet &net : p.nets) {
        NetTerminals t;
        const Loc &dl = pl.loc[net.driver.block];
        const TileInfo &dt = g.tile(dl.layer, dl.x, dl.y);
        int src_pin = p.blocks[net.driver.block].kind == PlaceBlock::Clb ? net.driver.pin : dl.sub;
        if (src_pin < 0 || src_pin >= static_cast<int>(dt.sources.size()))
            throw Error(fmt::format("net '{}': driver pin {} missing on its tile", net.name, src_pin));
        t.source = dt.sources[src_pin];
        for (const Terminal &s : net.sinks) {
            const Loc &sl = pl.loc[s.block];
            const TileInfo &st = g.tile(sl.layer, sl.x, sl.y);
            int cls = p.blocks[s.block].kind == PlaceBlock::Clb ? 0 : sl.sub;
            if (cls >= static_cast<int>(st.sinks.size()))
                throw Error(fmt::format("net '{}': sink class {} missing on its tile", net.name, cls));
            t.sinks.push_back(st.sinks[cls]);
        }
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

double base_cost(const RRNode &n, double wz)
{
    switch (n.kind) {
    case NodeKind::ChanX:
    case NodeKind::ChanY:
        return n.span();
    case NodeKind::ChanZ:
        // Charge the via once, on the receiving half.
        return n.dir == Direction::UnderInc || n.dir == Direction::AboveDec ? wz : 0.0;
    case NodeKind::Ipin:
        return 0.95;
    case NodeKind::Opin:
        return 1.0;
    default:
        return 0.0;
    }
}

class Router
{
  public:
    Router(const PackedNetlist &p, const RoutingResourceGraph &g, const DelayModel &model, const RouteParams &prm,
           std::vector<NetTerminals> terms)
        : p_(p), g_(g), model_(model), prm_(prm), terms_(std::move(terms))
    {
        const size_t n = g.nodes.size();
        occ_.assign(n, 0);
        hist_.assign(n, 0.0);
        base_.resize(n);
        for (size_t i = 0; i < n; ++i)
            base_[i] = base_cost(g.nodes[i], prm.wz);
        edge_delay_.resize(g.edges.size());
        for (size_t e = 0; e < g.edges.size(); ++e)
            edge_delay_[e] = g.delay_of(static_cast<int>(e), model);
        norm_ = model.base_switch_ps > 0 ? model.base_switch_ps : 1.0;
        dist_.assign(n, 0.0);
        prev_.assign(n, -1);
        seen_.assign(n, 0);
        tree_mark_.assign(n, 0);
        crit_.resize(terms_.size());
        for (size_t i = 0; i < terms_.size(); ++i)
            crit_[i].assign(terms_[i].sinks.size(), prm.timing_driven ? prm.max_crit : 0.0);
    }

    RoutingResult run()
    {
        RoutingResult r;
        r.nets.resize(terms_.size());
        for (size_t i = 0; i < terms_.size(); ++i)
            r.nets[i].name = p_.nets[i].name;
        double pres_fac = prm_.first_pres_fac;
        for (int it = 1; it <= prm_.max_iters; ++it) {
            r.iterations = it;
            for (size_t ni = 0; ni < terms_.size(); ++ni) {
                RouteTree &t = r.nets[ni];
                for (int v : t.nodes)
                    --occ_[v];
                route_net(ni, t, pres_fac);
                for (int v : t.nodes)
                    ++occ_[v];
            }
            long over = 0;
            for (size_t v = 0; v < occ_.size(); ++v)
                if (occ_[v] > g_.nodes[v].capacity) {
                    ++over;
                    hist_[v] += prm_.hist_fac * (occ_[v] - g_.nodes[v].capacity);
                }
            if (over == 0) {
                r.success = true;
                break;
            }
            pres_fac *= prm_.pres_fac_mult;
            if (prm_.timing_driven)
                update_criticality(r);
        }
        r.occupancy = occ_;
        r.heap_pops = pops_;
        r.wirelength = routed_wirelength(g_, r.nets, prm_.wz);
        auto delays = connection_delays(r, g_, model_);
        for (const auto &d : delays)
            r.net_delay_ps.push_back(d.empty() ? 0.0 : *std::max_element(d.begin(), d.end()));
        if (!r.success) {
            std::string list;
            int shown = 0;
            for (size_t v = 0; v < occ_.size(); ++v)
                if (occ_[v] > g_.nodes[v].capacity && shown++ < 10) {
                    const RRNode &n = g_.nodes[v];
                    list += fmt::format("\n  node {} {} L{} ({},{})-({},{}) track {}: occupancy {} > {}", v,
                                        to_string(n.kind), n.layer, n.xlo, n.ylo, n.xhi, n.yhi, n.ptc, occ_[v],
                                        n.capacity);
                }
            throw UnroutableError(fmt::format("unroutable after {} iterations; overused nodes:{}", prm_.max_iters, list));
        }
        return r;
    }

  private:
    // Criticality trades delay against the base and history cost only; the
    // present-overuse penalty applies in full so critical connections still
    // give way.
    double cost(int v, int e, double crit, double pres_fac) const
    {
        const double b = base_[v] + hist_[v];
        const int over = std::max(0, occ_[v] + 1 - g_.nodes[v].capacity);
        return crit * edge_delay_[e] / norm_ + (1.0 - crit) * b + b * pres_fac * over;
    }

    void update_criticality(const RoutingResult &r)
    {
        StaResult s = sta_from_delays(p_, connection_delays(r, g_, model_), model_);
        if (s.cpd_ps <= 0)
            return;
        for (size_t ni = 0; ni < crit_.size(); ++ni)
            for (size_t si = 0; si < crit_[ni].size(); ++si) {
                double slack = si < s.sink_slack_ps[ni].size() ? s.sink_slack_ps[ni][si] : s.cpd_ps;
                double c = std::isfinite(slack) ? std::max(0.0, 1.0 - slack / s.cpd_ps) : 0.0;
                crit_[ni][si] = std::min(prm_.max_crit, std::pow(c, prm_.crit_exp));
            }
    }

    void route_net(size_t ni, RouteTree &t, double pres_fac)
    {
        const NetTerminals &term = terms_[ni];
        t.source = term.source;
        t.sinks = term.sinks;
        t.nodes.assign(1, term.source);
        t.edges.assign(1, -1);
        std::vector<double> tree_delay{0.0};
        ++stamp_;
        tree_mark_[term.source] = stamp_;

        std::vector<size_t> order(term.sinks.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return crit_[ni][a] > crit_[ni][b]; });

        using Item = std::pair<double, int>;
        for (size_t si : order) {
            const int target = term.sinks[si];
            if (tree_mark_[target] == stamp_)
                continue;
            const double crit = crit_[ni][si];
            ++search_;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            for (size_t i = 0; i < t.nodes.size(); ++i) {
                int u = t.nodes[i];
                dist_[u] = crit * tree_delay[i] / norm_;
                prev_[u] = -1;
                seen_[u] = search_;
                pq.push({dist_[u], u});
            }
            bool found = false;
            while (!pq.empty()) {
                auto [d, u] = pq.top();
                pq.pop();
                ++pops_;
                if (d > dist_[u])
                    continue;
                if (u == target) {
                    found = true;
                    break;
                }
                for (int e : g_.fanout(u)) {
                    int v = g_.edges[e].dst;
                    if (tree_mark_[v] == stamp_)
                        continue;
                    const RRNode &vn = g_.nodes[v];
                    if (vn.kind == NodeKind::Sink && v != target)
                        continue;
                    double nd = d + cost(v, e, crit, pres_fac);
                    if (seen_[v] != search_ || nd < dist_[v]) {
                        seen_[v] = search_;
                        dist_[v] = nd;
                        prev_[v] = e;
                        pq.push({nd, v});
                    }
                }
            }
            if (!found)
                throw UnroutableError(fmt::format("net '{}': no path from node {} to sink node {}", t.name,
                                                  term.source, target));
            std::vector<int> path;
            for (int v = target; tree_mark_[v] != stamp_; v = g_.edges[prev_[v]].src)
                path.push_back(prev_[v]);
            std::reverse(path.begin(), path.end());
            for (int e : path) {
                int v = g_.edges[e].dst;
                int parent = g_.edges[e].src;
                size_t pi = std::find(t.nodes.begin(), t.nodes.end(), parent) - t.nodes.begin();
                t.nodes.push_back(v);
                t.edges.push_back(e);
                tree_delay.push_back(tree_delay[pi] + edge_delay_[e]);
                tree_mark_[v] = stamp_;
            }
        }
    }

    const PackedNetlist &p_;
    const RoutingResourceGraph &g_;
    DelayModel model_;
    RouteParams prm_;
    std::vector<NetTerminals> terms_;
    std::vector<int> occ_;
    std::vector<double> hist_;
    std::vector<double> base_;
    std::vector<double> edge_delay_;
    double norm_ = 1.0;
    std::vector<double> dist_;
    std::vector<int> prev_;
    std::vector<int> seen_;
    std::vector<int> tree_mark_;
    int stamp_ = 0;
    int search_ = 0;
    long pops_ = 0;
    std::vector<std::vector<double>> crit_;
};

} // namespace

RoutingResult route(const PackedNetlist &p, const Placement &pl, const RoutingResourceGraph &g,
                    const DelayModel &model, const RouteParams &params)
{
    Router r(p, g, model, params, net_terminals(p, pl, g));
    return r.run();
}

std::vector<std::string> check_routing(const RoutingResult &r, const RoutingResourceGraph &g,
                                       const std::vector<NetTerminals> &terms)
{
    std::vector<std::string> bad;
    std::vector<int> occ(g.nodes.size(), 0);
    std::vector<int> parent(g.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    if (r.nets.size() != terms.size())
        bad.push_back(fmt::format("{} routed nets for {} packed nets", r.nets.size(), terms.size()));

    for (size_t ni = 0; ni < r.nets.size() && ni < terms.size(); ++ni) {
        const RouteTree &t = r.nets[ni];
        if (t.nodes.empty() || t.nodes.size() != t.edges.size()) {
            bad.push_back(fmt::format("net '{}': malformed tree", t.name));
            continue;
        }
        if (t.nodes[0] != terms[ni].source || t.edges[0] != -1)
            bad.push_back(fmt::format("net '{}': tree not rooted at its source", t.name));
        std::vector<int> members(t.nodes.begin(), t.nodes.end());
        std::sort(members.begin(), members.end());
        if (std::adjacent_find(members.begin(), members.end()) != members.end())
            bad.push_back(fmt::format("net '{}': node repeated in tree", t.name));
        for (int v : members) {
            ++occ[v];
            parent[v] = v;
        }
        for (size_t i = 1; i < t.nodes.size(); ++i) {
            int e = t.edges[i];
            if (e < 0 || e >= static_cast<int>(g.edges.size()) || g.edges[e].dst != t.nodes[i] ||
                !std::binary_search(members.begin(), members.end(), g.edges[e].src)) {
                bad.push_back(fmt::format("net '{}': node {} not driven by a tree edge", t.name, t.nodes[i]));
                continue;
            }
            int a = find(g.edges[e].src), b = find(t.nodes[i]);
            if (a == b)
                bad.push_back(fmt::format("net '{}': cycle through node {}", t.name, t.nodes[i]));
            else
                parent[b] = a;
        }
        int root = find(t.nodes[0]);
        for (int v : members)
            if (find(v) != root)
                bad.push_back(fmt::format("net '{}': node {} disconnected from the source", t.name, v));
        for (int s : terms[ni].sinks)
            if (!std::binary_search(members.begin(), members.end(), s))
                bad.push_back(fmt::format("net '{}': sink node {} not reached", t.name, s));
    }
    for (size_t v = 0; v < occ.size(); ++v)
        if (occ[v] > g.nodes[v].capacity)
            bad.push_back(fmt::format("node {} occupancy {} exceeds capacity {}", v, occ[v], g.nodes[v].capacity));
    return bad;
}

} // namespace fabric3d
