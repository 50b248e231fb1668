// fabric3d: command-line front end for building, routing and sweeping
// multi-layer FPGA fabrics.

#include "fabric3d/arch.h"
#include "fabric3d/bitstream.h"
#include "fabric3d/blif.h"
#include "fabric3d/common.h"
#include "fabric3d/fabric.h"
#include "fabric3d/flow.h"
#include "fabric3d/plot.h"
#include "fabric3d/report.h"
#include "fabric3d/rrg.h"
#include "fabric3d/sweep.h"
#include "fabric3d/vertical.h"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <iostream>

using namespace fabric3d;

namespace {

void emit(const std::string &path, const std::string &text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_file(path, text);
}

int failed_exit(const std::vector<ReportRow> &rows, bool allow)
{
    const auto bad = std::count_if(rows.begin(), rows.end(), [](const ReportRow &r) { return !r.ok; });
    if (bad)
        std::cerr << fmt::format("{} of {} runs failed\n", bad, rows.size());
    return bad && !allow ? 1 : 0;
}

std::vector<ConnectionType> parse_types(const std::vector<std::string> &names)
{
    std::vector<ConnectionType> out;
    for (const std::string &n : names) {
        auto t = connection_type_from(n);
        if (!t)
            throw Error(fmt::format("unknown connection type '{}'", n));
        out.push_back(*t);
    }
    return out;
}

// "1..100" or "5" or "1,5,9".
std::vector<int> parse_int_list(const std::string &s)
{
    std::vector<int> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t end = s.find(',', start);
        if (end == std::string::npos)
            end = s.size();
        const std::string item = s.substr(start, end - start);
        if (auto dots = item.find(".."); dots != std::string::npos) {
            const int lo = std::stoi(item.substr(0, dots)), hi = std::stoi(item.substr(dots + 2));
            for (int v = lo; v <= hi; ++v)
                out.push_back(v);
        } else if (!item.empty()) {
            out.push_back(std::stoi(item));
        }
        start = end + 1;
    }
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Multi-layer FPGA architecture exploration"};
    app.require_subcommand(1);
    int rc = 0;

    // arch validate
    auto *arch = app.add_subcommand("arch", "Architecture documents")->require_subcommand(1);
    auto *arch_validate = arch->add_subcommand("validate", "Check an architecture document");
    std::string arch_path;
    arch_validate->add_option("arch", arch_path, "Architecture JSON")->required();
    arch_validate->callback([&] {
        const ArchSpec spec = load_arch(arch_path);
        const auto errs = validate(spec);
        for (const std::string &e : errs)
            std::cout << "error: " << e << "\n";
        if (errs.empty())
            std::cout << fmt::format("ok {} layers={} grid={}x{} W={} type={} hash={}\n", arch_path, spec.layer_count,
                                     spec.grid_width, spec.grid_height, spec.channel_width,
                                     to_string(spec.vertical.type), hex64(spec_hash(spec)));
        rc = errs.empty() ? 0 : 1;
    });

    // rrg build|dump
    auto *rrg = app.add_subcommand("rrg", "Routing resource graphs")->require_subcommand(1);
    uint64_t site_seed = 1;
    std::string out_path;
    auto *rrg_build = rrg->add_subcommand("build", "Build the 3D graph and print its census");
    rrg_build->add_option("arch", arch_path, "Architecture JSON")->required();
    rrg_build->add_option("--site-seed", site_seed, "Seed for Random 3D switch-block placement");
    rrg_build->add_option("-o,--out", out_path, "Also write the serialized graph here");
    rrg_build->callback([&] {
        const Fabric f = build_fabric(load_arch(arch_path), site_seed);
        const NodeCensus c = node_census(f.graph);
        std::cout << fmt::format("nodes {} edges {}\n", c.total(), f.graph.edges.size());
        for (int k = 0; k < kNodeKindCount; ++k)
            std::cout << fmt::format("  {} {}\n", to_string(static_cast<NodeKind>(k)), c.counts[k]);
        std::cout << fmt::format("3d sites {} ({:.2f}%)\n", f.plan.sites.size(), f.plan.realized_percentage);
        std::cout << fmt::format("vertical pin_in {} pin_out {} sb {} total {} per_grid {:.4f}\n", f.counts.pin_in,
                                 f.counts.pin_out, f.counts.sb, f.counts.total(), f.counts.per_grid);
        if (!out_path.empty())
            write_file(out_path, serialize_rrg(f.graph));
    });
    auto *rrg_dump = rrg->add_subcommand("dump", "Write the serialized 3D graph");
    rrg_dump->add_option("arch", arch_path, "Architecture JSON")->required();
    rrg_dump->add_option("--site-seed", site_seed, "Seed for Random 3D switch-block placement");
    rrg_dump->add_option("-o,--out", out_path, "Output file (default stdout)");
    rrg_dump->callback([&] {
        const Fabric f = build_fabric(load_arch(arch_path), site_seed);
        emit(out_path, serialize_rrg(f.graph));
    });

    // flow run
    auto *flow = app.add_subcommand("flow", "Single place-and-route runs")->require_subcommand(1);
    auto *flow_run = flow->add_subcommand("run", "Pack, place, route and time one benchmark");
    std::string blif_path, config_id = "cli", artifacts;
    uint64_t seed = 1;
    bool no_time = false, allow_failures = false;
    double ratio = -1;
    flow_run->add_option("--arch", arch_path, "Architecture JSON")->required();
    flow_run->add_option("--blif", blif_path, "Benchmark BLIF")->required();
    flow_run->add_option("--seed", seed, "Placement seed");
    flow_run->add_option("--site-seed", site_seed, "Seed for Random 3D switch-block placement");
    flow_run->add_option("--config-id", config_id, "Config id written in the row");
    flow_run->add_option("--vertical-delay-ratio", ratio, "Override the vertical delay ratio");
    flow_run->add_option("--artifacts", artifacts, "Directory for the route dump and bitstream");
    flow_run->add_option("-o,--out", out_path, "CSV output (default stdout)");
    flow_run->add_flag("--no-time", no_time, "Report route_ms as 0");
    flow_run->add_flag("--allow-failures", allow_failures, "Exit 0 even if the run failed");
    flow_run->callback([&] {
        ArchSpec spec = load_arch(arch_path);
        if (ratio >= 0) {
            spec.vertical_delay_ratio = ratio;
            spec.vertical_delay_seconds.reset();
        }
        const Fabric f = build_fabric(spec, site_seed, !artifacts.empty());
        Benchmark b;
        b.path = blif_path;
        b.netlist = load_blif(blif_path);
        b.name = std::filesystem::path(blif_path).stem().string();
        FlowOptions opts;
        opts.measure_time = !no_time;
        opts.artifact_dir = artifacts;
        const FlowResult r = run_flow(f, config_id, b, seed, opts);
        emit(out_path, write_csv({r.row}));
        if (!r.row.ok)
            std::cerr << "error: " << r.row.error << "\n";
        rc = failed_exit({r.row}, allow_failures);
    });

    // sweep run
    auto *sweep = app.add_subcommand("sweep", "Parameter sweeps")->require_subcommand(1);
    auto *sweep_run = sweep->add_subcommand("run", "Run every config x benchmark x seed");
    std::string exp_path, out_dir;
    int parallelism = 0;
    std::vector<uint64_t> seeds;
    bool quiet = false;
    sweep_run->add_option("experiment", exp_path, "Experiment JSON")->required();
    sweep_run->add_option("-j,--parallelism", parallelism, "Worker threads (overrides the document)");
    sweep_run->add_option("--seeds", seeds, "Seed list (overrides the document)");
    sweep_run->add_option("--output", out_dir, "Output directory (overrides the document)");
    sweep_run->add_option("-o,--out", out_path, "CSV path (default <output>/report.csv, or stdout)");
    sweep_run->add_flag("--no-time", no_time, "Report route_ms as 0 for byte-reproducible CSVs");
    sweep_run->add_flag("--allow-failures", allow_failures, "Exit 0 even if some runs failed");
    sweep_run->add_flag("-q,--quiet", quiet, "No per-run progress on stderr");
    sweep_run->callback([&] {
        ExperimentConfig cfg = load_experiment(exp_path);
        if (parallelism > 0)
            cfg.parallelism = parallelism;
        if (!seeds.empty())
            cfg.seeds = seeds;
        if (!out_dir.empty())
            cfg.output_dir = out_dir;
        if (no_time)
            cfg.measure_time = false;
        SweepProgress progress;
        if (!quiet)
            progress = [](const ReportRow &r) {
                std::cerr << fmt::format("{} {} seed={} {}\n", r.config_id, r.benchmark, r.seed,
                                         r.ok ? fmt::format("wl={} cpd={:.1f}ps", r.wl, r.cpd_ps) : "FAIL " + r.error);
            };
        const auto rows = run_sweep(cfg, progress);
        const std::string csv = write_csv(rows);
        if (out_path.empty() && !cfg.output_dir.empty()) {
            std::filesystem::create_directories(cfg.output_dir);
            write_file(cfg.output_dir + "/report.csv", csv);
            if (!cfg.baseline.empty())
                write_file(cfg.output_dir + "/summary.csv", format_summary(summarize(rows, cfg.baseline), cfg.baseline));
        } else {
            emit(out_path, csv);
        }
        rc = failed_exit(rows, allow_failures);
    });

    // report summarize|plot
    auto *report = app.add_subcommand("report", "Report post-processing")->require_subcommand(1);
    std::string csv_path, baseline, kind = "bar", metric = "wl";
    auto *rep_sum = report->add_subcommand("summarize", "Geomean WL/CPD normalized to a baseline config");
    rep_sum->add_option("report", csv_path, "Report CSV")->required();
    rep_sum->add_option("--baseline", baseline, "Baseline config id")->required();
    rep_sum->add_option("-o,--out", out_path, "Output (default stdout)");
    rep_sum->callback([&] {
        const auto rows = read_csv(read_file(csv_path));
        emit(out_path, format_summary(summarize(rows, baseline), baseline));
    });
    auto *rep_plot = report->add_subcommand("plot", "Render an SVG plot");
    rep_plot->add_option("report", csv_path, "Report CSV")->required();
    rep_plot->add_option("--kind", kind, "bar, line or box")->check(CLI::IsMember({"bar", "line", "box"}));
    rep_plot->add_option("--metric", metric, "wl, cpd_ps, route_ms, route_iters, crossings, vert_total, vert_per_grid");
    rep_plot->add_option("-o,--out", out_path, "SVG output (default stdout)");
    rep_plot->callback([&] {
        const auto rows = read_csv(read_file(csv_path));
        emit(out_path, render_plot(rows, *plot_kind_from(kind), metric));
    });

    // space count
    auto *space = app.add_subcommand("space", "Design-space cardinality")->require_subcommand(1);
    auto *space_count = space->add_subcommand("count", "Count distinct vertical configurations");
    std::vector<std::string> type_names{"CB", "CB-O", "SB", "Hybrid", "Hybrid-O"};
    int index_lo = -3, index_hi = 3;
    std::string pcts = "1..100";
    space_count->add_option("--types", type_names, "Connection types")->delimiter(',');
    space_count->add_option("--index-lo", index_lo, "Lowest pattern integer");
    space_count->add_option("--index-hi", index_hi, "Highest pattern integer");
    space_count->add_option("--percentages", pcts, "Percentage levels, e.g. 1..100 or 25,50,100");
    space_count->callback([&] {
        DesignSpaceBounds b;
        b.types = parse_types(type_names);
        b.index_lo = index_lo;
        b.index_hi = index_hi;
        b.percentages = parse_int_list(pcts);
        std::cout << count_design_space(b).str() << "\n";
    });

    // fabric emit
    auto *fab = app.add_subcommand("fabric", "Fabric netlists")->require_subcommand(1);
    auto *fab_emit = fab->add_subcommand("emit", "Write the hierarchical structural netlist");
    fab_emit->add_option("arch", arch_path, "Architecture JSON")->required();
    fab_emit->add_option("--site-seed", site_seed, "Seed for Random 3D switch-block placement");
    fab_emit->add_option("-o,--out", out_dir, "Output directory")->required();
    fab_emit->callback([&] {
        const Fabric f = build_fabric(load_arch(arch_path), site_seed, true);
        const auto problems = audit_coverage(*f.model, f.graph);
        for (const std::string &p : problems)
            std::cerr << "audit: " << p << "\n";
        const auto docs = emit_netlist(*f.model);
        std::filesystem::create_directories(out_dir);
        for (const NetlistDocument &d : docs)
            write_file(out_dir + "/" + d.name, d.text);
        write_file(out_dir + "/manifest.txt", netlist_manifest(docs));
        std::cout << fmt::format("{} documents, {} config bits, {} muxes\n", docs.size(), f.model->config_bits,
                                 f.model->mux_count());
        rc = problems.empty() ? 0 : 1;
    });

    // bitstream verify
    auto *bits = app.add_subcommand("bitstream", "Bitstreams")->require_subcommand(1);
    auto *bits_verify = bits->add_subcommand("verify", "Round-trip a benchmark through the programmed fabric");
    int vectors = 200;
    bits_verify->add_option("--arch", arch_path, "Architecture JSON")->required();
    bits_verify->add_option("--blif", blif_path, "Benchmark BLIF")->required();
    bits_verify->add_option("--seed", seed, "Placement and vector seed");
    bits_verify->add_option("--vectors", vectors, "Random input vectors");
    bits_verify->callback([&] {
        const RoundtripReport r = verify_roundtrip(load_arch(arch_path), load_blif(blif_path), seed, vectors);
        std::cout << r.verdict << "\n" << r.dump;
        rc = r.pass ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what();
        if (e.line())
            std::cerr << " (line " << e.line() << ")";
        std::cerr << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
