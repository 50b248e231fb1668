#include "fabric3d/common.h"
#include "fabric3d/routing.h"
#include "fabric3d/vertical.h"
#include "support.h"

#include <doctest.h>
#include <map>
#include <set>

using namespace fabric3d;
using namespace fabric3d::testing;

namespace {

int wrap(int v, int W) { return ((v % W) + W) % W; }

ArchSpec single_site(ArchOpts o, SiteCoord site)
{
    ArchSpec s = make_arch(o);
    s.vertical.placement = SitePlacement::CustomList;
    s.vertical.custom_sites = {site};
    REQUIRE(validate(s).empty());
    return s;
}

std::map<std::pair<NodeKey, NodeKey>, int> edge_multiset(const RoutingResourceGraph &g)
{
    std::map<std::pair<NodeKey, NodeKey>, int> m;
    for (const auto &k : edge_keys(g))
        ++m[k];
    return m;
}

} // namespace

TEST_CASE("track map examples")
{
    TrackMap t = vertical_track_map(SBPattern{}, 4, 2);
    CHECK(t.output == std::array<int, 4>{2, 2, 2, 2});
    CHECK(t.input == std::array<int, 4>{2, 2, 2, 2});
    t = vertical_track_map(SBPattern{{0, 1, 2, 3}, {1, 2, 3, 4}}, 4, 0);
    CHECK(t.output == std::array<int, 4>{1, 2, 3, 0});
    CHECK(t.input == std::array<int, 4>{0, 1, 2, 3});
    t = vertical_track_map(SBPattern{{-2, -1, 1, 2}, {0, 0, 0, 0}}, 8, 0);
    CHECK(t.input == std::array<int, 4>{6, 7, 1, 2});
}

TEST_CASE("track map is total and matches the modular formula")
{
    long checked = 0;
    for (int W = 2; W <= 16; ++W)
        for (int code = 0; code < 7 * 7 * 7 * 7; ++code) {
            std::array<int, 4> p{};
            for (int j = 0, c = code; j < 4; ++j, c /= 7)
                p[j] = c % 7 - 3;
            const SBPattern pat{p, {p[3], p[2], p[1], p[0]}};
            for (int k = 0; k < W; ++k) {
                const TrackMap t = vertical_track_map(pat, W, k);
                for (int j = 0; j < 4; ++j) {
                    REQUIRE(t.input[j] == wrap(pat.input[j] + k, W));
                    REQUIRE(t.output[j] == wrap(pat.output[j] + k, W));
                }
                ++checked;
            }
        }
    CHECK(checked > 0);
}

TEST_CASE("named patterns")
{
    CHECK(named_patterns().size() == 8);
    CHECK(named_pattern("subset") == SBPattern{});
    CHECK(named_pattern("symmetric-offset")->input == std::array<int, 4>{-2, -1, 1, 2});
    CHECK(!named_pattern("nope"));
}

TEST_CASE("site counts round half up")
{
    CHECK(target_site_count(100, 25) == 25);
    CHECK(target_site_count(48, 25) == 12);
    CHECK(target_site_count(50, 25) == 13);
    CHECK(target_site_count(20, 25) == 5);
    CHECK(target_site_count(0, 25) == 0);
}

TEST_CASE("site planning strategies")
{
    ArchOpts o{.w = 4, .h = 4, .layers = 2, .type = "SB"};
    for (const char *p : {"RepeatedInterval", "Rows", "Columns", "Core", "Perimeter", "Random"}) {
        o.placement = p;
        o.pct = 100;
        CHECK(plan_sites(make_arch(o), 7).sites.size() == 25);
    }

    SUBCASE("repeated interval keeps the even checkerboard prefix")
    {
        o.placement = "RepeatedInterval";
        o.pct = 48;
        std::vector<SiteCoord> want;
        for (int y = 0; y <= 4; ++y)
            for (int x = 0; x <= 4; ++x)
                if ((x + y) % 2 == 0 && want.size() < 12)
                    want.push_back({x, y});
        const SitePlan plan = plan_sites(make_arch(o), 1);
        CHECK(plan.sites == want);
        CHECK(plan.realized_percentage == doctest::Approx(48.0));
    }
    SUBCASE("perimeter stays on the border")
    {
        o.placement = "Perimeter";
        o.pct = 20;
        const SitePlan plan = plan_sites(make_arch(o), 1);
        CHECK(plan.sites.size() == 5);
        for (const SiteCoord &c : plan.sites)
            CHECK((c.x == 0 || c.x == 4 || c.y == 0 || c.y == 4));
    }
    SUBCASE("core stays central")
    {
        o.placement = "Core";
        o.pct = 36;
        const SitePlan plan = plan_sites(make_arch(o), 1);
        CHECK(plan.sites.size() == 9);
        for (const SiteCoord &c : plan.sites)
            CHECK(std::max(std::abs(c.x - 2), std::abs(c.y - 2)) <= 1);
    }
    SUBCASE("random is seeded")
    {
        o.placement = "Random";
        o.pct = 40;
        const ArchSpec s = make_arch(o);
        CHECK(plan_sites(s, 3).sites == plan_sites(s, 3).sites);
        const auto sites = plan_sites(s, 3).sites;
        CHECK(sites.size() == 10);
        CHECK(std::set<SiteCoord>(sites.begin(), sites.end()).size() == 10);
    }
    SUBCASE("custom list is bounds-checked")
    {
        ArchSpec s = make_arch(o);
        s.vertical.placement = SitePlacement::CustomList;
        s.vertical.custom_sites = {{1, 1}, {5, 0}};
        CHECK_THROWS_AS(plan_sites(s, 1), Error);
        s.vertical.custom_sites = {{1, 1}, {1, 1}};
        CHECK_THROWS_AS(plan_sites(s, 1), Error);
        s.vertical.custom_sites = {{4, 4}, {0, 1}};
        CHECK(plan_sites(s, 1).sites.size() == 2);
    }
}

TEST_CASE("None2D leaves the graph untouched")
{
    const ArchSpec s = make_arch({.w = 4, .h = 4, .W = 6});
    const RoutingResourceGraph base = build_base_rrg(s);
    CHECK(serialize_rrg(extend_to_3d(base, s, plan_sites(s, 1))) == serialize_rrg(base));
    CHECK(count_vertical(base).total() == 0);
}

TEST_CASE("single 3D switch block with two tracks")
{
    const ArchSpec s = single_site({.w = 4, .h = 4, .layers = 2, .W = 2, .type = "SB"}, {2, 2});
    const RoutingResourceGraph g = make_3d(s);
    long chanz = 0;
    for (const RRNode &n : g.nodes)
        if (n.kind == NodeKind::ChanZ) {
            ++chanz;
            CHECK(n.xlo == 2);
            CHECK(n.ylo == 2);
        }
    CHECK(chanz == 8);
    CHECK(chanz_pairs(g).size() == 4);
    const VerticalCounts v = count_vertical(g);
    CHECK(v.total() == 4);
    CHECK(v.sb == 4);
    CHECK(v.per_grid == doctest::Approx(0.25));
}

TEST_CASE("CHANZ pairs point the right way")
{
    const ArchSpec s = make_arch({.w = 4, .h = 3, .layers = 3, .W = 4, .type = "SB", .pct = 50});
    const RoutingResourceGraph g = make_3d(s);
    const auto pairs = chanz_pairs(g);
    CHECK(!pairs.empty());
    for (const ChanzPair &p : pairs) {
        const RRNode &a = g.nodes[p.source], &b = g.nodes[p.sink];
        CHECK((a.dir == Direction::AboveInc || a.dir == Direction::UnderDec));
        if (a.dir == Direction::AboveInc)
            CHECK(b.layer == a.layer + 1);
        else
            CHECK(b.layer == a.layer - 1);
        CHECK(p.upward == (a.dir == Direction::AboveInc));
        CHECK(g.find_edge(p.source, p.sink) >= 0);
    }
}

TEST_CASE("extension is additive")
{
    for (const char *type : {"CB", "CB-O", "SB", "Hybrid", "Hybrid-O"}) {
        const ArchSpec s = make_arch({.w = 4, .h = 4, .layers = 2, .W = 6, .N = 2, .type = type, .pct = 60});
        const RoutingResourceGraph base = build_base_rrg(s);
        const RoutingResourceGraph g = extend_to_3d(base, s, plan_sites(s, 1));
        REQUIRE(g.nodes.size() >= base.nodes.size());
        for (size_t i = 0; i < base.nodes.size(); ++i)
            CHECK(g.nodes[i] == base.nodes[i]);
        for (size_t e = 0; e < base.edges.size(); ++e)
            CHECK(g.edges[e] == base.edges[e]);
    }
}

TEST_CASE("hybrid is the union of CB and SB")
{
    for (auto [hy, cb] : {std::pair{"Hybrid", "CB"}, std::pair{"Hybrid-O", "CB-O"}}) {
        ArchOpts o{.w = 4, .h = 4, .layers = 2, .W = 6, .N = 2, .pct = 50, .in = {1, 0, -1, 2}};
        o.type = hy;
        const ArchSpec sh = make_arch(o);
        o.type = cb;
        const ArchSpec sc = make_arch(o);
        o.type = "SB";
        const ArchSpec ss = make_arch(o);
        const auto h = edge_multiset(make_3d(sh)), c = edge_multiset(make_3d(sc)), s = edge_multiset(make_3d(ss)),
                   b = edge_multiset(build_base_rrg(ss));
        auto sum = c;
        for (const auto &[k, n] : s)
            sum[k] += n;
        for (const auto &[k, n] : b)
            sum[k] -= n;
        CHECK(h == sum);
        for (const auto &[k, n] : c)
            CHECK(h.at(k) >= n);
        const long tot_h = count_vertical(make_3d(sh)).total();
        CHECK(tot_h == count_vertical(make_3d(sc)).total() + count_vertical(make_3d(ss)).total());
    }
}

TEST_CASE("vertical counts grow with the site percentage")
{
    for (const char *type : {"SB", "Hybrid"}) {
        long prev = -1;
        for (int pct = 0; pct <= 100; pct += 10) {
            const ArchSpec s = make_arch({.w = 4, .h = 4, .layers = 2, .W = 8, .type = type, .pct = pct});
            const SitePlan plan = plan_sites(s, 1);
            const VerticalCounts v = count_vertical(make_3d(s));
            CHECK(v.total() >= prev);
            CHECK(v.sb == static_cast<long>(plan.sites.size()) * 2 * 8);
            prev = v.total();
        }
    }
}

TEST_CASE("CB connects every pin across the layer boundary")
{
    const ArchSpec s = make_arch({.w = 4, .h = 4, .layers = 2, .W = 8, .N = 2, .type = "CB"});
    const RoutingResourceGraph g = make_3d(s);
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const RRNode &n = g.nodes[i];
        bool cross = false;
        if (n.kind == NodeKind::Ipin)
            for (int e : g.fanin(i))
                cross |= g.crosses_layers(e);
        else if (n.kind == NodeKind::Opin)
            for (int e : g.fanout(i))
                cross |= g.crosses_layers(e);
        else
            continue;
        CHECK_MESSAGE(cross, "pin " << i);
    }
    const VerticalCounts v = count_vertical(g);
    CHECK(v.pin_in > 0);
    CHECK(v.pin_out > 0);
    CHECK(v.sb == 0);
}

TEST_CASE("vertical edge delay scales with the ratio")
{
    for (double r : {0.5, 2.0}) {
        const ArchSpec s = make_arch({.w = 3, .h = 3, .layers = 2, .W = 4, .type = "SB", .ratio = r});
        const RoutingResourceGraph g = make_3d(s);
        const DelayModel m = DelayModel::from_spec(s);
        CHECK(m.vertical_ps == doctest::Approx(r * m.base_switch_ps));
        for (const ChanzPair &p : chanz_pairs(g))
            CHECK(g.edges[g.find_edge(p.source, p.sink)].delay_ps >= m.vertical_ps);
    }
}

TEST_CASE("layer crossings")
{
    const ArchSpec s = single_site({.w = 4, .h = 4, .layers = 2, .W = 2, .type = "SB"}, {2, 2});
    const RoutingResourceGraph g = make_3d(s);
    const ChanzPair p = chanz_pairs(g).front();
    const int feed = g.edges[g.fanin(p.source).front()].src;
    RouteTree t;
    t.name = "n";
    t.source = feed;
    t.nodes = {feed, p.source, p.sink};
    t.edges = {-1, g.find_edge(feed, p.source), g.find_edge(p.source, p.sink)};
    t.sinks = {p.sink};
    RoutingResult r;
    r.nets = {t};
    CHECK(count_layer_crossings(r, g) == doctest::Approx(1.0));

    RouteTree planar;
    planar.source = feed;
    planar.nodes = {feed};
    planar.edges = {-1};
    const int next = g.edges[g.fanout(feed).front()].dst;
    if (g.nodes[next].layer == g.nodes[feed].layer) {
        planar.nodes.push_back(next);
        planar.edges.push_back(g.fanout(feed).front());
        planar.sinks = {next};
        r.nets = {planar};
        CHECK(count_layer_crossings(r, g) == doctest::Approx(0.0));
        r.nets = {planar, t, t};
        CHECK(count_layer_crossings(r, g) == doctest::Approx(2.0 / 3.0));
    }
}
