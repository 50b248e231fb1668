#include "fabric3d/place.h"

#include "fabric3d/common.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace fabric3d {

double net_cost(const PackedNet &net, const std::vector<Loc> &loc, double lambda)
{
    const Loc &d = loc[net.driver.block];
    int x0 = d.x, x1 = d.x, y0 = d.y, y1 = d.y, l0 = d.layer, l1 = d.layer;
    for (const Terminal &t : net.sinks) {
        const Loc &s = loc[t.block];
        x0 = std::min(x0, s.x);
        x1 = std::max(x1, s.x);
        y0 = std::min(y0, s.y);
        y1 = std::max(y1, s.y);
        l0 = std::min(l0, s.layer);
        l1 = std::max(l1, s.layer);
    }
    return (x1 - x0) + (y1 - y0) + lambda * (l1 - l0);
}

double placement_cost(const PackedNetlist &p, const std::vector<Loc> &loc, double lambda)
{
    double c = 0;
    for (const PackedNet &n : p.nets)
        c += net_cost(n, loc, lambda);
    return c;
}

std::vector<Loc> clb_slots(const RoutingResourceGraph &g)
{
    std::vector<Loc> out;
    for (int l = 0; l < g.layer_count; ++l)
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x)
                if (g.tile(l, x, y).kind == BlockKind::CLB)
                    out.push_back({l, x, y, 0});
    return out;
}

std::vector<Loc> io_slots(const RoutingResourceGraph &g)
{
    std::vector<Loc> out;
    for (int l = 0; l < g.layer_count; ++l)
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x)
                if (g.tile(l, x, y).kind == BlockKind::IO)
                    for (int s = 0; s < kIoPadsPerTile; ++s)
                        out.push_back({l, x, y, s});
    return out;
}

namespace {

class Annealer
{
  public:
    Annealer(const PackedNetlist &p, const RoutingResourceGraph &g, uint64_t seed, const PlaceParams &params)
        : p_(p), g_(g), rng_(seed), prm_(params)
    {
        slots_[0] = clb_slots(g);
        slots_[1] = io_slots(g);
        by_layer_[0].assign(g.layer_count, {});
        by_layer_[1].assign(g.layer_count, {});
        for (int c = 0; c < 2; ++c)
            for (size_t i = 0; i < slots_[c].size(); ++i)
                by_layer_[c][slots_[c][i].layer].push_back(static_cast<int>(i));
        occ_.assign(static_cast<size_t>(g.layer_count) * g.width * g.height * kIoPadsPerTile, -1);
        block_nets_.assign(p.blocks.size(), {});
        for (size_t n = 0; n < p.nets.size(); ++n) {
            add_net_ref(p.nets[n].driver.block, static_cast<int>(n));
            for (const Terminal &t : p.nets[n].sinks)
                add_net_ref(t.block, static_cast<int>(n));
        }
        for (int c = 0; c < 2; ++c) {
            size_t need = 0;
            for (const PlaceBlock &b : p.blocks)
                need += cls(b) == c;
            if (need > slots_[c].size())
                throw Error(fmt::format("{} {} blocks but only {} legal slots", need, c == 0 ? "CLB" : "IO",
                                        slots_[c].size()));
        }
    }

    Placement run()
    {
        initial();
        net_cost_.resize(p_.nets.size());
        for (size_t n = 0; n < p_.nets.size(); ++n)
            net_cost_[n] = net_cost(p_.nets[n], loc_, prm_.lambda);
        cost_ = sum_costs();

        PlaceStats &st = stats_;
        const long per_temp =
            std::max<long>(1, std::lround(prm_.inner_num * std::pow(static_cast<double>(p_.blocks.size()), 4.0 / 3.0)));

        // Initial temperature from the spread of random-move deltas.
        std::vector<double> deltas;
        for (int i = 0; i < prm_.t0_moves && !p_.blocks.empty(); ++i) {
            double d = 0;
            if (try_move(std::numeric_limits<double>::infinity(), &d))
                deltas.push_back(d);
        }
        double t = 0;
        if (deltas.size() > 1) {
            double mean = 0;
            for (double d : deltas)
                mean += d;
            mean /= deltas.size();
            double var = 0;
            for (double d : deltas)
                var += (d - mean) * (d - mean);
            t = prm_.t0_factor * std::sqrt(var / (deltas.size() - 1));
        }
        st.t0 = t;

        const double nets = std::max<size_t>(1, p_.nets.size());
        while (t > 0 && cost_ > 0 && t >= 0.005 * cost_ / nets && st.temperatures < 2000) {
            for (long i = 0; i < per_temp; ++i)
                try_move(t, nullptr);
            ++st.temperatures;
            t *= prm_.alpha;
            // Guard against drift in the incremental sum.
            cost_ = sum_costs();
        }
        for (long i = 0; i < per_temp; ++i) {
            double d = 0;
            if (try_move(0.0, &d)) {
                ++st.zero_temp_accepted;
                st.zero_temp_max_delta = std::max(st.zero_temp_max_delta, d);
            }
        }

        Placement pl;
        pl.loc = loc_;
        pl.cost = placement_cost(p_, loc_, prm_.lambda);
        pl.stats = st;
        return pl;
    }

  private:
    static int cls(const PlaceBlock &b) { return b.kind == PlaceBlock::Clb ? 0 : 1; }

    void add_net_ref(int block, int net)
    {
        auto &v = block_nets_[block];
        if (v.empty() || v.back() != net)
            if (std::find(v.begin(), v.end(), net) == v.end())
                v.push_back(net);
    }

    size_t key(const Loc &l) const
    {
        return ((static_cast<size_t>(l.layer) * g_.height + l.y) * g_.width + l.x) * kIoPadsPerTile + l.sub;
    }

    double sum_costs() const
    {
        double c = 0;
        for (double v : net_cost_)
            c += v;
        return c;
    }

    void initial()
    {
        loc_.assign(p_.blocks.size(), Loc{});
        std::vector<int> order(p_.blocks.size());
        for (size_t i = 0; i < order.size(); ++i)
            order[i] = static_cast<int>(i);
        rng_.shuffle(order);
        std::vector<std::vector<int>> free(2 * g_.layer_count);
        for (int c = 0; c < 2; ++c)
            for (int l = 0; l < g_.layer_count; ++l)
                free[c * g_.layer_count + l] = by_layer_[c][l];

        for (int b : order) {
            const int c = cls(p_.blocks[b]);
            // Prefer the layer holding the most already-placed neighbours.
            std::vector<int> score(g_.layer_count, 0);
            for (int n : block_nets_[b]) {
                const PackedNet &net = p_.nets[n];
                auto count = [&](int other) {
                    if (other != b && loc_[other].layer >= 0)
                        ++score[loc_[other].layer];
                };
                count(net.driver.block);
                for (const Terminal &t : net.sinks)
                    count(t.block);
            }
            int best = -1;
            std::vector<int> ties;
            for (int l = 0; l < g_.layer_count; ++l) {
                if (free[c * g_.layer_count + l].empty())
                    continue;
                if (score[l] > best) {
                    best = score[l];
                    ties.clear();
                }
                if (score[l] == best)
                    ties.push_back(l);
            }
            int layer = ties[rng_.below(static_cast<int>(ties.size()))];
            auto &pool = free[c * g_.layer_count + layer];
            int pick = rng_.below(static_cast<int>(pool.size()));
            int slot = pool[pick];
            pool.erase(pool.begin() + pick);
            loc_[b] = slots_[c][slot];
            occ_[key(loc_[b])] = b;
        }
    }

    // Proposes one move; applies it when accepted at temperature t.
    bool try_move(double t, double *delta_out)
    {
        const int b = rng_.below(static_cast<int>(p_.blocks.size()));
        const int c = cls(p_.blocks[b]);
        const Loc from = loc_[b];
        ++stats_.proposed;

        int layer = from.layer;
        if (rng_.uniform() < prm_.interlayer_move_prob) {
            std::vector<int> others;
            for (int l = 0; l < g_.layer_count; ++l)
                if (l != from.layer && !by_layer_[c][l].empty())
                    others.push_back(l);
            if (!others.empty()) {
                layer = others[rng_.below(static_cast<int>(others.size()))];
                ++stats_.cross_layer;
            }
        }
        const auto &cand = by_layer_[c][layer];
        if (cand.size() < 2 && layer == from.layer)
            return false;
        Loc to = slots_[c][cand[rng_.below(static_cast<int>(cand.size()))]];
        if (to == from)
            return false;

        const int other = occ_[key(to)];
        std::vector<int> nets = block_nets_[b];
        if (other >= 0)
            for (int n : block_nets_[other])
                if (std::find(nets.begin(), nets.end(), n) == nets.end())
                    nets.push_back(n);

        auto apply = [&](const Loc &lb, const Loc &lo) {
            loc_[b] = lb;
            if (other >= 0)
                loc_[other] = lo;
        };
        apply(to, from);
        double delta = 0;
        std::vector<double> fresh(nets.size());
        for (size_t i = 0; i < nets.size(); ++i) {
            fresh[i] = net_cost(p_.nets[nets[i]], loc_, prm_.lambda);
            delta += fresh[i] - net_cost_[nets[i]];
        }
        bool accept = delta <= 0 || (t > 0 && rng_.uniform() < std::exp(-delta / t));
        if (!accept) {
            apply(from, to);
            return false;
        }
        occ_[key(from)] = other;
        occ_[key(to)] = b;
        for (size_t i = 0; i < nets.size(); ++i)
            net_cost_[nets[i]] = fresh[i];
        cost_ += delta;
        ++stats_.accepted;
        if (delta_out)
            *delta_out = delta;
        return true;
    }

    const PackedNetlist &p_;
    const RoutingResourceGraph &g_;
    Rng rng_;
    PlaceParams prm_;
    std::vector<Loc> slots_[2];
    std::vector<std::vector<int>> by_layer_[2];
    std::vector<int> occ_;
    std::vector<std::vector<int>> block_nets_;
    std::vector<Loc> loc_;
    std::vector<double> net_cost_;
    double cost_ = 0;
    PlaceStats stats_;
};

} // namespace

Placement place(const PackedNetlist &p, const RoutingResourceGraph &g, uint64_t seed, const PlaceParams &params)
{
    if (params.interlayer_move_prob < 0 || params.interlayer_move_prob > 1)
        throw Error("interlayer move probability must lie in [0, 1]");
    if (p.blocks.empty())
        return {};
    Annealer a(p, g, seed, params);
    return a.run();
}

void check_placement(const PackedNetlist &p, const RoutingResourceGraph &g, const Placement &pl)
{
    if (pl.loc.size() != p.blocks.size())
        throw Error("placement does not cover every block");
    std::vector<int> used(static_cast<size_t>(g.layer_count) * g.width * g.height * kIoPadsPerTile, -1);
    for (size_t b = 0; b < p.blocks.size(); ++b) {
        const Loc &l = pl.loc[b];
        if (l.layer < 0 || l.layer >= g.layer_count || l.x < 0 || l.x >= g.width || l.y < 0 || l.y >= g.height)
            throw Error(fmt::format("block '{}' is off the grid", p.blocks[b].name));
        BlockKind k = g.tile(l.layer, l.x, l.y).kind;
        bool clb = p.blocks[b].kind == PlaceBlock::Clb;
        if ((clb && k != BlockKind::CLB) || (!clb && (k != BlockKind::IO || l.sub < 0 || l.sub >= kIoPadsPerTile)))
            throw Error(fmt::format("block '{}' sits on an incompatible {} tile", p.blocks[b].name, to_string(k)));
        size_t key = ((static_cast<size_t>(l.layer) * g.height + l.y) * g.width + l.x) * kIoPadsPerTile + l.sub;
        if (used[key] >= 0)
            throw Error(fmt::format("blocks '{}' and '{}' share a slot", p.blocks[used[key]].name, p.blocks[b].name));
        used[key] = static_cast<int>(b);
    }
}

} // namespace fabric3d
