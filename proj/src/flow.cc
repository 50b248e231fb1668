#include "fabric3d/flow.h"

#include "fabric3d/bitstream.h"
#include "fabric3d/common.h"
#include "fabric3d/fabric.h"
#include "fabric3d/routing.h"

#include <chrono>
#include <filesystem>
#include <fmt/format.h>

namespace fabric3d {

Fabric build_fabric(const ArchSpec &spec, uint64_t site_seed, bool with_model)
{
    if (auto errs = validate(spec); !errs.empty())
        throw Error("invalid architecture: " + errs.front());
    Fabric f;
    f.spec = spec;
    f.plan = plan_sites(spec, site_seed);
    f.graph = extend_to_3d(build_base_rrg(spec), spec, f.plan);
    f.counts = count_vertical(f.graph);
    if (with_model)
        f.model = std::make_shared<const FabricModel>(annotate(f.graph, spec));
    return f;
}

std::vector<Benchmark> load_manifest(const std::string &path)
{
    const std::string text = read_file(path);
    const std::filesystem::path dir = std::filesystem::path(path).parent_path();
    std::vector<Benchmark> out;
    int line_no = 0;
    size_t pos = 0;
    bool header = true;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos)
            nl = text.size();
        const std::string_view line = trim(std::string_view(text).substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<std::string> f;
        size_t s = 0;
        while (true) {
            const size_t c = line.find(',', s);
            f.emplace_back(trim(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s)));
            if (c == std::string_view::npos)
                break;
            s = c + 1;
        }
        if (header) {
            if (f.size() < 2 || f[0] != "name" || f[1] != "blif")
                throw ParseError("manifest header must start with name,blif", line_no);
            header = false;
            continue;
        }
        if (f.size() < 2 || f.size() > 3)
            throw ParseError("expected name,blif[,vectors]", line_no);
        Benchmark b;
        b.name = f[0];
        std::filesystem::path p(f[1]);
        b.path = (p.is_absolute() ? p : dir / p).string();
        if (f.size() == 3 && !f[2].empty()) {
            try {
                b.vectors = std::stoi(f[2]);
            } catch (const std::exception &) {
                throw ParseError(fmt::format("bad vector count '{}'", f[2]), line_no);
            }
        }
        try {
            b.netlist = load_blif(b.path);
        } catch (const ParseError &e) {
            throw Error(fmt::format("{}:{}: {}", b.path, e.line(), e.what()));
        }
        out.push_back(std::move(b));
    }
    if (header)
        throw ParseError("empty manifest", 1);
    return out;
}

FlowResult run_flow(const Fabric &fabric, const std::string &config_id, const Benchmark &bench, uint64_t seed,
                    const FlowOptions &opts)
{
    FlowResult res;
    ReportRow &row = res.row;
    row.benchmark = bench.name;
    row.config_id = config_id;
    row.seed = seed;
    row.vert_total = fabric.counts.total();
    row.vert_per_grid = fabric.counts.per_grid;
    try {
        const DelayModel model = DelayModel::from_spec(fabric.spec);
        res.packed = pack(bench.netlist, fabric.spec);
        res.placement = place(res.packed, fabric.graph, seed, opts.place);

        const auto t0 = std::chrono::steady_clock::now();
        try {
            res.routing = route(res.packed, res.placement, fabric.graph, model, opts.route);
        } catch (const UnroutableError &) {
            row.route_iters = opts.route.max_iters;
            throw;
        }
        const auto t1 = std::chrono::steady_clock::now();
        if (opts.measure_time)
            row.route_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        res.timing = sta(res.routing, res.packed, fabric.graph, model);
        row.wl = res.routing.wirelength;
        row.cpd_ps = res.timing.cpd_ps;
        row.route_iters = res.routing.iterations;
        row.heap_pops = res.routing.heap_pops;
        row.crossings = count_layer_crossings(res.routing, fabric.graph);

        if (!opts.artifact_dir.empty()) {
            std::filesystem::create_directories(opts.artifact_dir);
            const std::string stem = fmt::format("{}/{}_s{}", opts.artifact_dir, bench.name, seed);
            write_file(stem + ".route", write_route_dump(res.routing, fabric.graph, row.cpd_ps));
            if (fabric.model) {
                Bitstream bs = generate_bitstream(res.routing, res.placement, res.packed, *fabric.model);
                bs.benchmark = bench.name;
                write_file(stem + ".bit", write_bitstream_text(bs));
            }
        }
        row.ok = true;
    } catch (const std::exception &e) {
        row.ok = false;
        row.error = e.what();
        row.wl = row.cpd_ps = row.route_ms = row.crossings = 0;
    }
    return res;
}

} // namespace fabric3d
