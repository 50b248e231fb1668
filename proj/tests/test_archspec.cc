#include "fabric3d/arch.h"
#include "fabric3d/common.h"
#include "support.h"

#include <doctest.h>
#include <set>

using namespace fabric3d;
using namespace fabric3d::testing;

namespace {

const char *kMinimal = R"({
  "grid": {"width": 4, "height": 4},
  "layers": {"count": 2},
  "routing": {"channel_width": 8, "segments": [{"length": 1, "tracks": 8}], "planar_sb": "Subset"},
  "logic": {"lut_size": 4, "cluster_size": 1},
  "vertical": {"type": "SB", "sb_percentage": 100, "pattern": {"input": [0,0,0,0], "output": [0,0,0,0]}}
})";

// Materializes every configuration under the counting model and counts the
// distinct ones.
size_t brute_force_space(const std::vector<ConnectionType> &types, int lo, int hi, const std::vector<int> &pcts)
{
    std::set<std::vector<int>> seen;
    const int r = hi - lo + 1;
    for (ConnectionType t : types) {
        if (t == ConnectionType::CB || t == ConnectionType::CBO) {
            seen.insert({static_cast<int>(t)});
            continue;
        }
        if (!pattern_bearing(t) || r <= 0)
            continue;
        long combos = 1;
        for (int i = 0; i < 8; ++i)
            combos *= r;
        for (int p : pcts)
            for (long c = 0; c < combos; ++c) {
                std::vector<int> cfg{static_cast<int>(t), p};
                long v = c;
                for (int i = 0; i < 8; ++i) {
                    cfg.push_back(lo + static_cast<int>(v % r));
                    v /= r;
                }
                seen.insert(cfg);
            }
    }
    return seen.size();
}

} // namespace

TEST_CASE("minimal document fills defaults")
{
    const ArchSpec s = parse_arch(kMinimal);
    CHECK(s.grid_width == 4);
    CHECK(s.layer_count == 2);
    CHECK(s.channel_width == 8);
    CHECK(s.vertical.type == ConnectionType::SB);
    CHECK(s.planar_sb == PlanarPattern::Subset);
    CHECK(s.vertical_delay_ratio == doctest::Approx(0.739));
    CHECK(s.base_switch_delay * 1e12 == doctest::Approx(185.4).epsilon(1e-3));
    CHECK(s.vertical_delay() * 1e12 == doctest::Approx(137.0));
}

TEST_CASE("vertical connectivity needs two layers")
{
    ArchOpts o;
    o.type = "SB";
    o.layers = 1;
    try {
        make_arch(o);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(std::string(e.what()).find("requires") != std::string::npos);
    }
}

TEST_CASE("mixed segment lengths summing to the channel width")
{
    const char *doc = R"({"grid": {"width": 8, "height": 8}, "layers": {"count": 1},
      "routing": {"channel_width": 300, "segments": [{"length": 4, "tracks": 260}, {"length": 16, "tracks": 40}]},
      "logic": {"lut_size": 6, "cluster_size": 10}})";
    const ArchSpec s = parse_arch(doc);
    CHECK(s.channel_width == 300);
    REQUIRE(s.segments.size() == 2);
    CHECK(s.segments[1].length == 16);
}

TEST_CASE("validate reports each broken invariant")
{
    ArchSpec s = make_arch({});
    CHECK(validate(s).empty());

    ArchSpec bad = s;
    bad.segments = {{1, bad.channel_width - 1}};
    auto v = validate(bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("channel width mismatch") != std::string::npos);

    bad = make_arch({.layers = 2, .type = "SB"});
    bad.vertical.placement = SitePlacement::CustomList;
    CHECK(validate(bad).size() == 1);

    bad = s;
    bad.vertical_delay_ratio = 0;
    CHECK(!validate(bad).empty());
}

TEST_CASE("reader errors carry positions and names")
{
    CHECK_THROWS_AS(parse_arch("{\"grid\": {\"width\": 4,, }"), ParseError);
    try {
        parse_arch("{\n  \"grid\": {\"width\": 4\n");
        FAIL("expected an error");
    } catch (const ParseError &e) {
        CHECK(e.line() > 0);
    }
    std::string doc = kMinimal;
    doc.replace(doc.find("\"sb_percentage\": 100"), 20, "\"sb_percentage\": 150");
    CHECK_THROWS_AS(parse_arch(doc), ParseError);
    doc = kMinimal;
    doc.replace(doc.find("\"logic\""), 7, "\"logik\"");
    CHECK_THROWS_AS(parse_arch(doc), ParseError);
}

TEST_CASE("parse/serialize round trip is stable")
{
    for (const char *type : {"None2D", "CB", "CB-O", "SB", "Hybrid", "Hybrid-O"}) {
        ArchOpts o;
        o.type = type;
        o.layers = std::string(type) == "None2D" ? 1 : 3;
        o.in = {-2, -1, 1, 2};
        o.out = {1, 2, 3, 4};
        o.placement = "Perimeter";
        o.pct = 37;
        const ArchSpec a = make_arch(o);
        const std::string text = serialize_arch(a);
        const ArchSpec b = parse_arch(text);
        CHECK(a == b);
        CHECK(serialize_arch(b) == text);
        CHECK(spec_hash(a) == spec_hash(b));
    }
    CHECK(spec_hash(make_arch({.W = 8})) != spec_hash(make_arch({.W = 10})));
}

TEST_CASE("golden corpus documents validate")
{
    for (const char *f : {"arch/desk3d_cb.json", "arch/desk3d_sb.json", "arch/baseline2d.json"})
        CHECK(validate(load_arch(std::string(FABRIC3D_SOURCE_DIR) + "/" + f)).empty());
}

TEST_CASE("default layout: IO ring without corners around CLBs")
{
    const ArchSpec s = make_arch({.w = 5, .h = 4});
    CHECK(s.tile_kind(0, 0, 0) == BlockKind::RoutingOnly);
    CHECK(s.tile_kind(0, 4, 3) == BlockKind::RoutingOnly);
    CHECK(s.tile_kind(0, 0, 1) == BlockKind::IO);
    CHECK(s.tile_kind(0, 2, 0) == BlockKind::IO);
    CHECK(s.tile_kind(0, 2, 2) == BlockKind::CLB);
    const ArchSpec small = make_arch({.w = 2, .h = 2});
    CHECK(small.tile_kind(0, 0, 0) == BlockKind::CLB);
}

TEST_CASE("design-space count")
{
    const std::vector<ConnectionType> all{ConnectionType::CB, ConnectionType::CBO, ConnectionType::SB,
                                          ConnectionType::Hybrid, ConnectionType::HybridO};
    std::vector<int> pcts;
    for (int p = 1; p <= 100; ++p)
        pcts.push_back(p);
    CHECK(count_design_space({all, -3, 3, pcts}) == 1729440302);
    CHECK(count_design_space({{ConnectionType::CB}, -3, 3, pcts}) == 1);
    CHECK(count_design_space({{ConnectionType::SB}, 0, 0, {100}}) == 1);
    CHECK(count_design_space({}) == 0);

    SUBCASE("agrees with materialized enumeration for small ranges")
    {
        for (int size = 1; size <= 3; ++size) {
            const std::vector<int> few{10, 20};
            CHECK(count_design_space({all, 0, size - 1, few}) == brute_force_space(all, 0, size - 1, few));
            CHECK(count_design_space({{ConnectionType::Hybrid}, -1, size - 2, {5}}) ==
                  brute_force_space({ConnectionType::Hybrid}, -1, size - 2, {5}));
        }
    }
    SUBCASE("additive over disjoint type sets")
    {
        const DesignSpaceBounds a{{ConnectionType::CB, ConnectionType::SB}, -2, 2, {1, 2, 3}};
        const DesignSpaceBounds b{{ConnectionType::Hybrid, ConnectionType::CBO}, -2, 2, {1, 2, 3}};
        DesignSpaceBounds u = a;
        u.types.insert(u.types.end(), b.types.begin(), b.types.end());
        CHECK(count_design_space(u) == count_design_space(a) + count_design_space(b));
    }
    SUBCASE("exceeds 64 bits without overflow")
    {
        const auto big = count_design_space({all, -1000, 1000, pcts});
        CHECK(big > boost::multiprecision::cpp_int(UINT64_MAX));
    }
}

TEST_CASE("custom site CSV")
{
    const auto s = parse_site_csv("x,y\n0,0\n3,2\n");
    REQUIRE(s.size() == 2);
    CHECK(s[1] == SiteCoord{3, 2});
    CHECK_THROWS_AS(parse_site_csv("x,y\n1\n"), ParseError);
}
