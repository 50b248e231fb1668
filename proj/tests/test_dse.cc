#include "fabric3d/flow.h"
#include "fabric3d/plot.h"
#include "fabric3d/report.h"
#include "fabric3d/sweep.h"
#include "support.h"

#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <regex>

using namespace fabric3d;
using namespace fabric3d::testing;
namespace fs = std::filesystem;

namespace {

const std::string kBench = std::string(FABRIC3D_SOURCE_DIR) + "/benchmarks/";

ReportRow row(std::string bench, std::string cfg, uint64_t seed, double wl, double cpd, bool ok = true)
{
    ReportRow r;
    r.benchmark = std::move(bench);
    r.config_id = std::move(cfg);
    r.seed = seed;
    r.wl = wl;
    r.cpd_ps = cpd;
    r.ok = ok;
    if (!ok)
        r.error = "failed";
    return r;
}

// Linear interpolation between order statistics, written from the definition.
double type7(std::vector<double> x, double p)
{
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1) * p;
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

size_t count(const std::string &s, const std::string &needle)
{
    size_t n = 0;
    for (size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1))
        ++n;
    return n;
}

struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string &tag)
        : path(fs::temp_directory_path() / fmt::format("fabric3d_{}_{}", tag, ::getpid()))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string &name, const std::string &text) const
    {
        std::ofstream(path / name) << text;
        return (path / name).string();
    }
};

std::string manifest(const std::vector<std::string> &names)
{
    std::string m = "name,blif,vectors\n";
    for (const std::string &n : names)
        m += fmt::format("{},{}{}.blif,0\n", n, kBench, n);
    return m;
}

Benchmark bench(const std::string &name)
{
    Benchmark b;
    b.name = name;
    b.path = kBench + name + ".blif";
    b.netlist = load_blif(b.path);
    return b;
}

FlowOptions untimed()
{
    FlowOptions o;
    o.measure_time = false;
    return o;
}

ArchOpts sb_opts()
{
    ArchOpts o;
    o.w = o.h = 6;
    o.layers = 2;
    o.W = 12;
    o.N = 4;
    o.type = "SB";
    o.pct = 100;
    o.in = {-1, 0, 1, 2};
    o.out = {2, 1, 0, -1};
    return o;
}

} // namespace

TEST_CASE("csv roundtrip and quoting")
{
    std::vector<ReportRow> rows{row("b1", "SB", 1, 120, 1234.5), row("b2", "CB", 2, 7, 0.25)};
    rows[0].route_iters = 4;
    rows[0].route_ms = 12.125;
    rows[0].vert_total = 36;
    rows[0].vert_per_grid = 0.5625;
    rows[0].crossings = 3.25;
    rows[1].ok = false;
    rows[1].error = "grid too small, \"3x3\"\nhas 1 CLB";
    const std::string text = write_csv(rows);
    CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(text.find("\"grid too small, \"\"3x3\"\"\nhas 1 CLB\"") != std::string::npos);
    const auto back = read_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(write_csv(back) == text);
    CHECK(back[1].error == rows[1].error);
    CHECK_FALSE(back[1].ok);
    CHECK(back[0].vert_per_grid == 0.5625);
    CHECK(back[0].wl == 120);

    CHECK(write_csv({}) == std::string(kCsvHeader) + "\n");
    CHECK_THROWS_AS(read_csv("benchmark,config\n"), ParseError);
    CHECK_THROWS_AS(read_csv(std::string(kCsvHeader) + "\nb,SB,1,2\n"), ParseError);
    CHECK_THROWS_AS(read_csv(std::string(kCsvHeader) + "\nb,SB,1,2,3,4,5,6,7,8,maybe,\n"), ParseError);
    CHECK_THROWS_AS(read_csv(std::string(kCsvHeader) + "\nb,SB,1,2,3,4,5,6,7,8,ok,\"open\n"), ParseError);
}

TEST_CASE("rows sort by config, benchmark, seed")
{
    std::vector<ReportRow> rows{row("b", "SB", 2, 1, 1), row("a", "SB", 1, 1, 1), row("b", "CB", 1, 1, 1),
                                row("b", "SB", 1, 1, 1)};
    sort_rows(rows);
    std::vector<std::string> got;
    for (const ReportRow &r : rows)
        got.push_back(fmt::format("{}/{}/{}", r.config_id, r.benchmark, r.seed));
    CHECK(got == std::vector<std::string>{"CB/b/1", "SB/a/1", "SB/b/1", "SB/b/2"});
}

TEST_CASE("geomean")
{
    CHECK(geomean({4, 9}) == doctest::Approx(6));
    CHECK(geomean({2, 2, 2}) == doctest::Approx(2));
    CHECK(geomean({1, 10, 100}) == doctest::Approx(10));
    CHECK_THROWS(geomean({1, 0}));
    CHECK(geomean({}) == 0);
}

TEST_CASE("summary against hand-computed means")
{
    // Baseline: A over seeds {100, 400} -> 200, B -> 50; overall sqrt(200*50) = 100.
    // X: A {50, 200} -> 100, B 25 -> overall 50; C fails in X and is dropped.
    std::vector<ReportRow> rows{row("A", "2D", 1, 100, 1000), row("A", "2D", 2, 400, 1000),
                                row("B", "2D", 1, 50, 4000),  row("C", "2D", 1, 10, 10),
                                row("A", "X", 1, 50, 500),    row("A", "X", 2, 200, 500),
                                row("B", "X", 1, 25, 8000),   row("C", "X", 1, 0, 0, false)};
    const auto s = summarize(rows, "2D");
    REQUIRE(s.size() == 2);
    const SummaryLine &base = s[0].config_id == "2D" ? s[0] : s[1];
    const SummaryLine &x = s[0].config_id == "X" ? s[0] : s[1];
    CHECK(base.wl_ratio == doctest::Approx(1));
    CHECK(base.wl_reduction_pct == doctest::Approx(0).epsilon(1e-12));
    CHECK(x.benchmarks == 2);
    CHECK(x.failed_rows == 1);
    CHECK(x.wl_geomean == doctest::Approx(50));
    CHECK(x.wl_ratio == doctest::Approx(0.5));
    CHECK(x.wl_reduction_pct == doctest::Approx(50));
    // CPD: baseline sqrt(1000*4000) = 2000, X sqrt(500*8000) = 2000.
    CHECK(x.cpd_ratio == doctest::Approx(1));
    CHECK(x.cpd_reduction_pct == doctest::Approx(0).epsilon(1e-12));
    CHECK(format_summary(s, "2D").rfind("baseline 2D\n", 0) == 0);

    CHECK_THROWS_AS(summarize(rows, "3D"), Error);
}

TEST_CASE("opposite per-benchmark ratios cancel and scaling is invisible")
{
    std::vector<ReportRow> rows{row("A", "2D", 1, 10, 10), row("B", "2D", 1, 10, 10), row("A", "X", 1, 5, 3),
                                row("B", "X", 1, 20, 7)};
    const auto s = summarize(rows, "2D");
    for (const SummaryLine &l : s)
        if (l.config_id == "X")
            CHECK(l.wl_ratio == doctest::Approx(1));

    for (ReportRow &r : rows) {
        r.wl *= 3.7;
        r.cpd_ps *= 0.01;
    }
    const auto t = summarize(rows, "2D");
    for (size_t i = 0; i < s.size(); ++i) {
        CHECK(t[i].wl_ratio == doctest::Approx(s[i].wl_ratio));
        CHECK(t[i].cpd_ratio == doctest::Approx(s[i].cpd_ratio));
    }
}

TEST_CASE("quantiles follow the linear order-statistic rule")
{
    CHECK(quantile7({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
    CHECK(quantile7({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile7({1, 2, 3, 4}, 0.75) == doctest::Approx(3.25));
    CHECK(quantile7({5}, 0.3) == 5);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(1 + rng() % 40);
        for (double &x : v)
            x = static_cast<double>(rng() % 1000) / 7.0;
        std::vector<double> s = v;
        std::sort(s.begin(), s.end());
        for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0})
            CHECK(quantile7(s, p) == doctest::Approx(type7(v, p)));
        const BoxStats b = box_stats(v);
        CHECK(b.min == s.front());
        CHECK(b.max == s.back());
        CHECK(b.q1 == doctest::Approx(type7(v, 0.25)));
        CHECK(b.median == doctest::Approx(type7(v, 0.5)));
        CHECK(b.q3 == doctest::Approx(type7(v, 0.75)));
    }
}

TEST_CASE("plot helpers")
{
    CHECK(plot_kind_from("line") == PlotKind::Line);
    CHECK(plot_kind_from("box") == PlotKind::Box);
    CHECK(plot_kind_from("bar") == PlotKind::Bar);
    CHECK_FALSE(plot_kind_from("pie"));

    std::string fam;
    CHECK(ratio_of("SB_p50_r0.5", &fam) == 0.5);
    CHECK(fam == "SB_p50");
    CHECK(ratio_of("CB_r10") == 10);
    CHECK_FALSE(ratio_of("SB_p50"));

    ReportRow r = row("a", "SB", 1, 12, 34);
    r.vert_total = 5;
    CHECK(metric_value(r, "wl") == 12);
    CHECK(metric_value(r, "cpd_ps") == 34);
    CHECK(metric_value(r, "vert_total") == 5);
    CHECK_THROWS(metric_value(r, "area"));
}

TEST_CASE("plots draw what the report holds")
{
    std::vector<ReportRow> rows;
    for (double ratio : {0.5, 1.0, 2.0, 5.0, 10.0})
        rows.push_back(row("a", fmt::format("SB_r{}", ratio), 1, 100, 1000 + 100 * ratio));
    const std::string line = render_plot(rows, PlotKind::Line, "cpd_ps");
    CHECK(count(line, "<circle") == 5);
    CHECK(count(line, "<polyline") == 1);
    CHECK(render_plot(rows, PlotKind::Line, "cpd_ps") == line);

    std::vector<ReportRow> box;
    std::vector<double> vals;
    for (uint64_t s = 1; s <= 23; ++s) {
        const double v = 50 + static_cast<double>((s * 37) % 29);
        vals.push_back(v);
        box.push_back(row("a", "SB", s, v, 1));
    }
    box.push_back(row("b", "SB", 99, 1e9, 1, false)); // failed rows are not drawn
    const std::string svg = render_plot(box, PlotKind::Box, "wl");
    const std::regex title(R"(<title>SB: min (\S+) q1 (\S+) median (\S+) q3 (\S+) max (\S+)</title>)");
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, title));
    std::sort(vals.begin(), vals.end());
    const double want[5] = {vals.front(), type7(vals, 0.25), type7(vals, 0.5), type7(vals, 0.75), vals.back()};
    for (int i = 0; i < 5; ++i)
        CHECK(std::stod(m[i + 1].str()) == doctest::Approx(want[i]).epsilon(1e-5));

    const std::string bar = render_plot(box, PlotKind::Bar, "wl");
    CHECK(bar.find("<svg") != std::string::npos);

    std::vector<ReportRow> failed{row("a", "SB", 1, 0, 0, false)};
    CHECK_THROWS_WITH(render_plot(failed, PlotKind::Bar, "wl"), doctest::Contains("nothing to plot"));
    CHECK_THROWS(render_plot({row("a", "SB", 1, 1, 1)}, PlotKind::Line, "wl"));
}

TEST_CASE("experiment parsing expands the sweep")
{
    TempDir dir("parse");
    dir.write("m.csv", manifest({"and2"}));
    const std::string arch = arch_json(sb_opts());
    const std::string doc = fmt::format(R"({{"benchmarks": "m.csv", "seeds": [1, 2], "baseline": "base",
        "configs": [{{"id": "base", "arch": {0}}}],
        "sweep": {{"arch": {0}, "type": ["None2D", "CB", "SB"], "sb_percentage": [25, 100],
                   "vertical_delay_ratio": [0.5, 2]}}}})",
                                        arch);
    const ExperimentConfig cfg = parse_experiment(doc, dir.path.string());
    std::vector<std::string> ids;
    for (const SweepConfig &c : cfg.configs)
        ids.push_back(c.id);
    // None2D takes neither axis; CB only the ratio; SB both.
    CHECK(ids == std::vector<std::string>{"base", "None", "CB_r0.5", "CB_r2", "SB_p25_r0.5", "SB_p25_r2",
                                          "SB_p100_r0.5", "SB_p100_r2"});
    CHECK(cfg.configs[5].spec.vertical.sb_percentage == 25);
    CHECK(cfg.configs[5].spec.vertical_delay_ratio == 2);
    CHECK(cfg.seeds == std::vector<uint64_t>{1, 2});
    REQUIRE(cfg.benchmarks.size() == 1);
    CHECK(cfg.benchmarks[0].name == "and2");

    auto bad = [&](const std::string &body) { return parse_experiment(body, dir.path.string()); };
    CHECK_THROWS_WITH(bad(fmt::format(R"({{"benchmarks": "m.csv", "configs": [{{"id": "a", "arch": {0}}},
        {{"id": "a", "arch": {0}}}]}})",
                                      arch)),
                      doctest::Contains("duplicate"));
    CHECK_THROWS(bad(fmt::format(R"({{"benchmarks": "m.csv", "seeds": [], "configs": [{{"id": "a", "arch": {}}}]}})",
                                 arch)));
    CHECK_THROWS(bad(fmt::format(
        R"({{"benchmarks": "m.csv", "baseline": "zz", "configs": [{{"id": "a", "arch": {}}}]}})", arch)));
    CHECK_THROWS(bad(R"({"benchmarks": "m.csv"})"));
    CHECK_THROWS(bad(fmt::format(R"({{"benchmarks": "m.csv", "colour": 1, "configs": [{{"id": "a", "arch": {}}}]}})",
                                 arch)));
    CHECK_THROWS_AS(bad("{"), ParseError);
}

TEST_CASE("manifest loading")
{
    TempDir dir("manifest");
    dir.write("a.blif", kAnd2);
    const auto b = load_manifest(dir.write("m.csv", "name,blif,vectors\nx,a.blif,12\n"));
    REQUIRE(b.size() == 1);
    CHECK(b[0].name == "x");
    CHECK(b[0].vectors == 12);
    CHECK(b[0].netlist.luts.size() == 1);
    CHECK(load_manifest(dir.write("e.csv", "name,blif,vectors\n")).empty());
    CHECK_THROWS(load_manifest(dir.write("bad.csv", "name,blif,vectors\nx,missing.blif,1\n")));
}

TEST_CASE("single flows")
{
    ArchOpts o;
    o.w = o.h = 4;
    const Fabric planar = build_fabric(make_arch(o));
    const FlowResult a = run_flow(planar, "2D", bench("and2"), 1, untimed());
    CHECK(a.row.ok);
    CHECK(a.row.wl >= 1);
    CHECK(a.row.crossings == 0);
    CHECK(a.row.vert_total == 0);
    CHECK(a.row.cpd_ps > 0);

    const Fabric sb = build_fabric(make_arch(sb_opts()));
    const FlowResult c = run_flow(sb, "SB", bench("counter4"), 1, untimed());
    REQUIRE(c.row.ok);
    CHECK(c.row.vert_total > 0);
    CHECK(c.row.vert_per_grid > 0);
    CHECK(c.row.crossings >= 0);
    const FlowResult c2 = run_flow(sb, "SB", bench("counter4"), 1, untimed());
    CHECK(write_csv({c.row}) == write_csv({c2.row}));

    // Fixed routing, swept vertical delay: CPD never falls as vias get slower.
    double prev = 0;
    for (double ratio : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        ArchSpec s = sb.spec;
        s.vertical_delay_ratio = ratio;
        s.vertical_delay_seconds.reset();
        const double cpd = sta(c.routing, c.packed, sb.graph, DelayModel::from_spec(s)).cpd_ps;
        CHECK(cpd >= prev - 1e-9);
        prev = cpd;
    }

    ArchOpts tiny;
    tiny.w = tiny.h = 3;
    const Fabric small = build_fabric(make_arch(tiny));
    const FlowResult f = run_flow(small, "tiny", bench("comb12"), 1, untimed());
    CHECK_FALSE(f.row.ok);
    CHECK_FALSE(f.row.error.empty());
    CHECK(f.row.wl == 0);
}

TEST_CASE("sweeps conserve rows and ignore thread count")
{
    TempDir dir("sweep");
    dir.write("m.csv", manifest({"and2", "counter4", "comb12"}));
    ArchOpts tiny;
    tiny.w = tiny.h = 3;
    const std::string doc = fmt::format(R"({{"benchmarks": "m.csv", "seeds": [1, 2, 3], "measure_time": false,
        "configs": [{{"id": "tiny", "arch": {}}}],
        "sweep": {{"arch": {}, "type": ["CB", "SB"]}}}})",
                                        arch_json(tiny), arch_json(sb_opts()));
    ExperimentConfig cfg = parse_experiment(doc, dir.path.string());
    REQUIRE(cfg.configs.size() == 3);

    std::string first;
    for (int par : {1, 4, 8}) {
        cfg.parallelism = par;
        int seen = 0;
        const auto rows = run_sweep(cfg, [&](const ReportRow &) { ++seen; });
        CHECK(rows.size() == 3 * 3 * 3);
        CHECK(seen == 27);
        const std::string csv = write_csv(rows);
        if (first.empty())
            first = csv;
        CHECK(csv == first);
    }
    const auto rows = read_csv(first);
    int failed = 0;
    for (const ReportRow &r : rows) {
        failed += !r.ok;
        CHECK((r.ok || r.config_id == "tiny"));
    }
    // The 3x3 device holds a single cluster, so only and2 fits there.
    CHECK(failed == 6);

    dir.write("empty.csv", "name,blif,vectors\n");
    ExperimentConfig none = parse_experiment(
        fmt::format(R"({{"benchmarks": "empty.csv", "configs": [{{"id": "a", "arch": {}}}]}})", arch_json(tiny)),
        dir.path.string());
    CHECK(write_csv(run_sweep(none)) == std::string(kCsvHeader) + "\n");
}
