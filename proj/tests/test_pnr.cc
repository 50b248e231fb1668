#include "fabric3d/pack.h"
#include "fabric3d/place.h"
#include "fabric3d/route.h"
#include "fabric3d/timing.h"
#include "support.h"

#include <doctest.h>
#include <algorithm>
#include <fmt/format.h>
#include <limits>
#include <map>
#include <set>

using namespace fabric3d;
using namespace fabric3d::testing;

namespace {

// Clusters joined by two-terminal nets, enough for the placer and router.
PackedNetlist hand_packed(int clusters, const std::vector<std::pair<int, int>> &nets)
{
    PackedNetlist p;
    for (int c = 0; c < clusters; ++c)
        p.blocks.push_back({PlaceBlock::Clb, c, fmt::format("clb{}", c)});
    std::map<int, int> next_pin;
    for (auto [a, b] : nets) {
        PackedNet n;
        n.name = fmt::format("n{}", p.nets.size());
        n.driver = {a, next_pin[a]++};
        n.sinks.push_back({b, -1});
        p.nets.push_back(n);
    }
    return p;
}

double hpwl_oracle(const PackedNetlist &p, const std::vector<Loc> &loc, double lambda)
{
    double total = 0;
    for (const PackedNet &n : p.nets) {
        std::vector<Loc> pts{loc[n.driver.block]};
        for (const Terminal &t : n.sinks)
            pts.push_back(loc[t.block]);
        auto span = [&](auto f) {
            auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [&](auto &a, auto &b) { return f(a) < f(b); });
            return f(*hi) - f(*lo);
        };
        total += span([](const Loc &l) { return l.x; }) + span([](const Loc &l) { return l.y; }) +
                 lambda * span([](const Loc &l) { return l.layer; });
    }
    return total;
}

// Minimum cost over every injective assignment of the blocks to the slots.
double exhaustive_optimum(const PackedNetlist &p, const std::vector<Loc> &slots)
{
    double best = std::numeric_limits<double>::infinity();
    std::vector<Loc> loc(p.blocks.size());
    std::vector<bool> used(slots.size());
    auto rec = [&](auto &&self, size_t b) -> void {
        if (b == p.blocks.size()) {
            best = std::min(best, hpwl_oracle(p, loc, 1.0));
            return;
        }
        for (size_t s = 0; s < slots.size(); ++s)
            if (!used[s]) {
                used[s] = true;
                loc[b] = slots[s];
                self(self, b + 1);
                used[s] = false;
            }
    };
    rec(rec, 0);
    return best;
}

RoutingResourceGraph grid_of(const ArchSpec &spec) { return make_3d(spec); }

std::string lut_name(const PackedNetlist &p, const Ble &b) { return p.logic.signals[b.lut_output]; }

// Chain a -> l1 -> ... -> ln, output ln.
std::string chain_blif(int n)
{
    std::string s = ".model chain\n.inputs a\n.outputs l" + std::to_string(n) + "\n";
    for (int i = 1; i <= n; ++i)
        s += fmt::format(".names {} l{}\n1 1\n", i == 1 ? "a" : "l" + std::to_string(i - 1), i);
    return s + ".end\n";
}

struct Run
{
    PackedNetlist packed;
    Placement pl;
    RoutingResult r;
};

Run run_small(const ArchSpec &spec, const RoutingResourceGraph &g, uint64_t seed, int luts, int latches)
{
    RandomNetlistParams np;
    np.luts = luts;
    np.latches = latches;
    np.inputs = 3 + static_cast<int>(seed % 3);
    np.outputs = 2 + static_cast<int>(seed % 2);
    Run out;
    out.packed = pack(random_netlist(np, seed), spec);
    out.pl = place(out.packed, g, seed);
    out.r = route(out.packed, out.pl, g, DelayModel::from_spec(spec));
    return out;
}

} // namespace

TEST_CASE("pack: cluster counts")
{
    const ArchSpec big = make_arch({.w = 5, .h = 5, .N = 10});
    CHECK(pack(blif(kAnd2), big).clusters.size() == 1);

    std::string indep = ".model m\n.inputs a\n.outputs";
    for (int i = 0; i < 11; ++i)
        indep += fmt::format(" y{}", i);
    indep += "\n";
    for (int i = 0; i < 11; ++i)
        indep += fmt::format(".names a y{}\n{} 1\n", i, i % 2);
    const PackedNetlist p = pack(blif(indep + ".end\n"), big);
    CHECK(p.clusters.size() == 2);
}

TEST_CASE("pack: a chain pairs adjacent LUTs")
{
    const ArchSpec spec = make_arch({.w = 4, .h = 4, .N = 2});
    const PackedNetlist p = pack(blif(chain_blif(4)), spec);
    REQUIRE(p.clusters.size() == 2);
    std::set<std::set<std::string>> got;
    for (const Cluster &c : p.clusters) {
        std::set<std::string> s;
        for (const Ble &b : c.bles)
            s.insert(lut_name(p, b));
        got.insert(s);
    }
    // Every way of splitting the chain into two pairs; only the one made of
    // adjacent links keeps both internal nets inside a cluster.
    const std::vector<std::set<std::set<std::string>>> splits{
        {{"l1", "l2"}, {"l3", "l4"}}, {{"l1", "l3"}, {"l2", "l4"}}, {{"l1", "l4"}, {"l2", "l3"}}};
    auto absorbed = [](const std::set<std::set<std::string>> &s) {
        int n = 0;
        for (const auto &pair : s)
            for (int i = 1; i < 4; ++i)
                n += pair.count("l" + std::to_string(i)) && pair.count("l" + std::to_string(i + 1));
        return n;
    };
    int best = 0;
    for (const auto &s : splits)
        best = std::max(best, absorbed(s));
    CHECK(absorbed(got) == best);
    CHECK(got == splits[0]);
}

TEST_CASE("pack: capacity errors")
{
    const ArchSpec one_clb = make_arch({.w = 3, .h = 3});
    CHECK_THROWS_AS(pack(blif(".model m\n.inputs a\n.outputs y z\n.names a y\n1 1\n.names a z\n0 1\n.end\n"), one_clb),
                    Error);
    CHECK_NOTHROW(pack(blif(kAnd2), one_clb));
    const ArchSpec k2 = make_arch({.w = 3, .h = 3, .K = 2});
    CHECK_THROWS_AS(pack(blif(".model m\n.inputs a b c\n.outputs y\n.names a b c y\n111 1\n.end\n"), k2), Error);
}

TEST_CASE("pack: every LUT and latch lands in exactly one cluster")
{
    const ArchSpec spec = make_arch({.w = 8, .h = 8, .N = 4});
    for (const char *b : {"adder4", "counter4", "fsm6", "seq30", "comb24"}) {
        const LogicNetlist n = load_blif(std::string(FABRIC3D_SOURCE_DIR) + "/benchmarks/" + b + ".blif");
        const PackedNetlist p = pack(n, spec);
        std::vector<int> lut_seen(n.luts.size()), latch_seen(n.latches.size());
        for (const Cluster &c : p.clusters) {
            CHECK(static_cast<int>(c.bles.size()) <= spec.cluster_size);
            CHECK(static_cast<int>(c.inputs.size()) <= (spec.lut_size * (spec.cluster_size + 1) + 1) / 2);
            for (const Ble &ble : c.bles) {
                if (ble.lut >= 0)
                    ++lut_seen[ble.lut];
                if (ble.latch >= 0)
                    ++latch_seen[ble.latch];
                CHECK(ble.table.size() == (size_t{1} << ble.inputs.size()));
            }
        }
        for (int s : lut_seen)
            CHECK(s == 1);
        for (int s : latch_seen)
            CHECK(s == 1);
    }
}

TEST_CASE("place: tiny grids reach the exhaustive optimum")
{
    const RoutingResourceGraph g2 = grid_of(make_arch({.w = 2, .h = 2}));
    SUBCASE("single cluster")
    {
        const PackedNetlist p = hand_packed(1, {});
        CHECK(place(p, g2, 1).cost == 0);
    }
    SUBCASE("two clusters, one net")
    {
        const PackedNetlist p = hand_packed(2, {{0, 1}});
        const Placement pl = place(p, g2, 3);
        CHECK(exhaustive_optimum(p, clb_slots(g2)) == 1);
        CHECK(pl.cost == 1);
        CHECK(hpwl_oracle(p, pl.loc, 1.0) == 1);
    }
    SUBCASE("four clusters in a ring")
    {
        const PackedNetlist p = hand_packed(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
        const Placement pl = place(p, g2, 5);
        CHECK(pl.cost == exhaustive_optimum(p, clb_slots(g2)));
    }
    SUBCASE("two layers")
    {
        const RoutingResourceGraph g3 = grid_of(make_arch({.w = 2, .h = 2, .layers = 2, .type = "SB"}));
        REQUIRE(clb_slots(g3).size() == 8);
        for (uint64_t seed : {1, 2, 3}) {
            const PackedNetlist p =
                hand_packed(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}, {1, 3}, {2, 4}});
            const Placement pl = place(p, g3, seed, {.inner_num = 30});
            check_placement(p, g3, pl);
            CHECK(pl.cost == doctest::Approx(hpwl_oracle(p, pl.loc, 1.0)));
            CHECK(pl.cost == exhaustive_optimum(p, clb_slots(g3)));
        }
    }
}

TEST_CASE("place: deterministic, legal and greedy at zero temperature")
{
    const ArchSpec spec = make_arch({.w = 8, .h = 8, .layers = 2, .N = 4, .type = "CB"});
    const RoutingResourceGraph g = grid_of(spec);
    const PackedNetlist p = pack(load_blif(std::string(FABRIC3D_SOURCE_DIR) + "/benchmarks/seq44.blif"), spec);
    const Placement a = place(p, g, 11);
    const Placement b = place(p, g, 11);
    CHECK(a.loc == b.loc);
    CHECK(a.cost == b.cost);
    CHECK(place(p, g, 12).loc != a.loc);
    check_placement(p, g, a);
    CHECK(a.cost == doctest::Approx(hpwl_oracle(p, a.loc, 1.0)));
    CHECK(a.stats.zero_temp_max_delta <= 0.0);

    Placement broken = a;
    broken.loc[1] = broken.loc[0];
    CHECK_THROWS_AS(check_placement(p, g, broken), Error);
}

TEST_CASE("place: cross-layer move fraction")
{
    const ArchSpec spec = make_arch({.w = 8, .h = 8, .layers = 2, .N = 4, .type = "SB"});
    const RoutingResourceGraph g = grid_of(spec);
    const PackedNetlist p = pack(load_blif(std::string(FABRIC3D_SOURCE_DIR) + "/benchmarks/comb56.blif"), spec);
    const Placement pl = place(p, g, 2);
    REQUIRE(pl.stats.proposed >= 10000);
    const double frac = static_cast<double>(pl.stats.cross_layer) / static_cast<double>(pl.stats.proposed);
    CHECK(frac == doctest::Approx(0.10).epsilon(0.2));

    const Placement none = place(p, g, 2, {.interlayer_move_prob = 0.0});
    CHECK(none.stats.cross_layer == 0);
    CHECK_THROWS_AS(place(p, g, 2, {.interlayer_move_prob = 1.5}), Error);
}

TEST_CASE("route: same-tile net stays short")
{
    const ArchSpec spec = make_arch({.w = 2, .h = 2, .N = 2});
    const RoutingResourceGraph g = grid_of(spec);
    const PackedNetlist p = hand_packed(1, {{0, 0}});
    const Placement pl = place(p, g, 1);
    const RoutingResult r = route(p, pl, g, DelayModel::from_spec(spec), {.timing_driven = false});
    CHECK(r.success);
    CHECK(r.wirelength >= 1);
    CHECK(r.wirelength <= 2);
    CHECK(check_routing(r, g, net_terminals(p, pl, g)).empty());
}

TEST_CASE("route: capacity pigeonhole is unroutable")
{
    // 16 diagonal nets need at least two wires each; a 2x2 grid at W=1 has 16.
    const ArchSpec spec = make_arch({.w = 2, .h = 2, .W = 1, .N = 4});
    const RoutingResourceGraph g = grid_of(spec);
    int wires = 0;
    for (const RRNode &n : g.nodes)
        wires += n.is_wire();
    REQUIRE(wires == 16);
    std::vector<std::pair<int, int>> nets;
    for (int c = 0; c < 4; ++c)
        for (int k = 0; k < 4; ++k)
            nets.push_back({c, 3 - c});
    const PackedNetlist p = hand_packed(4, nets);
    Placement pl;
    pl.loc = {{0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 1, 1, 0}};
    check_placement(p, g, pl);
    try {
        route(p, pl, g, DelayModel::from_spec(spec), {.max_iters = 8, .timing_driven = false});
        FAIL("expected an unroutable error");
    } catch (const UnroutableError &e) {
        CHECK(std::string(e.what()).find("unroutable") != std::string::npos);
    }
}

TEST_CASE("route: legality over random instances")
{
    const char *types[] = {"None2D", "CB", "CBO", "SB", "Hybrid", "HybridO"};
    int checked = 0;
    for (int t = 0; t < 6; ++t) {
        const bool flat = t == 0;
        const ArchSpec spec = make_arch({.w = 6,
                                         .h = 6,
                                         .layers = flat ? 1 : 2,
                                         .W = 12,
                                         .N = 2,
                                         .type = types[t],
                                         .pct = 50,
                                         .in = {-1, 0, 1, 2},
                                         .out = {2, 1, 0, -1}});
        const RoutingResourceGraph g = grid_of(spec);
        for (uint64_t seed = 1; seed <= 17; ++seed) {
            INFO(std::string(types[t]), " seed ", seed);
            const Run run = run_small(spec, g, seed * 7 + t, 6 + static_cast<int>(seed % 10), static_cast<int>(seed % 3));
            REQUIRE(run.r.success);
            const auto problems = check_routing(run.r, g, net_terminals(run.packed, run.pl, g));
            CHECK(problems.empty());
            for (size_t v = 0; v < g.nodes.size(); ++v)
                REQUIRE(run.r.occupancy[v] <= g.nodes[v].capacity);
            ++checked;
        }
    }
    CHECK(checked >= 100);
}

TEST_CASE("route: the checker catches corrupted trees")
{
    const ArchSpec spec = make_arch({.w = 6, .h = 6, .layers = 2, .W = 10, .N = 2, .type = "CB"});
    const RoutingResourceGraph g = grid_of(spec);
    const Run run = run_small(spec, g, 4, 14, 1);
    const auto terms = net_terminals(run.packed, run.pl, g);
    REQUIRE(check_routing(run.r, g, terms).empty());

    // Index of a net whose tree has an interior wire.
    size_t ni = 0;
    while (ni < run.r.nets.size() && run.r.nets[ni].nodes.size() < 4)
        ++ni;
    REQUIRE(ni < run.r.nets.size());

    SUBCASE("shared wire")
    {
        RoutingResult r = run.r;
        const size_t other = ni == 0 ? 1 : 0;
        RouteTree &t = r.nets[other];
        t.nodes.push_back(r.nets[ni].nodes[2]);
        t.edges.push_back(r.nets[ni].edges[2]);
        CHECK(!check_routing(r, g, terms).empty());
    }
    SUBCASE("dropped node")
    {
        RoutingResult r = run.r;
        r.nets[ni].nodes.erase(r.nets[ni].nodes.begin() + 1);
        r.nets[ni].edges.erase(r.nets[ni].edges.begin() + 1);
        CHECK(!check_routing(r, g, terms).empty());
    }
    SUBCASE("missing sink")
    {
        RoutingResult r = run.r;
        r.nets[ni].nodes.pop_back();
        r.nets[ni].edges.pop_back();
        CHECK(!check_routing(r, g, terms).empty());
    }
    SUBCASE("bogus edge")
    {
        RoutingResult r = run.r;
        r.nets[ni].edges[1] = r.nets[ni].edges[2];
        CHECK(!check_routing(r, g, terms).empty());
    }
}

TEST_CASE("sta: single LUT costs the LUT delay")
{
    const ArchSpec spec = make_arch({.w = 3, .h = 3});
    const PackedNetlist p = pack(blif(kAnd2), spec);
    DelayModel m;
    m.lut_ps = 1000;
    const StaResult r = sta_from_delays(p, {}, m);
    CHECK(r.cpd_ps == 1000);
    REQUIRE(r.critical_path.size() >= 2);
    CHECK(r.critical_path.back() == "po:y");
}

TEST_CASE("sta: hand-built path")
{
    const DelayModel d = DelayModel::from_spec(make_arch({}));
    TimingGraph tg;
    const int a = tg.add_node("a"), b = tg.add_node("b"), c = tg.add_node("c"), e = tg.add_node("e", true);
    tg.add_arc(a, b, 100);
    tg.add_arc(b, c, d.base_switch_ps);
    tg.add_arc(c, e, d.vertical_ps);
    tg.add_arc(a, e, 300);
    const TimingAnalysis ta = analyze_timing(tg);
    CHECK(ta.cpd_ps == doctest::Approx(422.4).epsilon(1e-4));
    CHECK(ta.critical_path == std::vector<int>{a, b, c, e});
    CHECK(ta.required[e] == doctest::Approx(ta.arrival[e]));

    TimingGraph loop;
    const int x = loop.add_node("x"), y = loop.add_node("y", true);
    loop.add_arc(x, y, 1);
    loop.add_arc(y, x, 1);
    CHECK_THROWS_AS(analyze_timing(loop), Error);
}

TEST_CASE("sta: monotone in the vertical delay ratio at fixed routing")
{
    const ArchSpec spec = make_arch({.w = 6, .h = 6, .layers = 2, .W = 10, .N = 2, .type = "Hybrid"});
    const RoutingResourceGraph g = grid_of(spec);
    const DelayModel base = DelayModel::from_spec(spec);
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        const Run run = run_small(spec, g, seed, 16, 2);
        double prev = -1;
        for (double rho : {0.0, 0.5, 0.739, 1.0, 2.0, 5.0, 10.0}) {
            const double cpd = sta(run.r, run.packed, g, base.with_vertical_ratio(rho)).cpd_ps;
            CHECK(cpd >= prev);
            prev = cpd;
        }
        CHECK(sta(run.r, run.packed, g, base.with_vertical_ratio(0.5)).cpd_ps <=
              sta(run.r, run.packed, g, base.with_vertical_ratio(10)).cpd_ps);
    }
}

TEST_CASE("place, route and sta are pure in the seed")
{
    const ArchSpec spec = make_arch({.w = 6, .h = 6, .layers = 2, .W = 10, .N = 2, .type = "SB", .pct = 50});
    const RoutingResourceGraph g = grid_of(spec);
    const Run a = run_small(spec, g, 9, 18, 2);
    const Run b = run_small(spec, g, 9, 18, 2);
    CHECK(a.pl.loc == b.pl.loc);
    CHECK(a.r.wirelength == b.r.wirelength);
    CHECK(a.r.iterations == b.r.iterations);
    for (size_t i = 0; i < a.r.nets.size(); ++i)
        CHECK(a.r.nets[i].nodes == b.r.nets[i].nodes);
    const DelayModel m = DelayModel::from_spec(spec);
    CHECK(sta(a.r, a.packed, g, m).cpd_ps == sta(b.r, b.packed, g, m).cpd_ps);
}
