#include "fabric3d/sweep.h"

#include "fabric3d/common.h"
#include "fabric3d/vertical.h"

#include <atomic>
#include <filesystem>
#include <fmt/format.h>
#include <json.hpp>
#include <mutex>
#include <set>
#include <thread>

namespace fabric3d {

namespace {

using json = nlohmann::json;

std::string resolve(const std::string &base_dir, const std::string &p)
{
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? p : (std::filesystem::path(base_dir) / path).string();
}

ArchSpec arch_from(const json &v, const std::string &base_dir)
{
    if (v.is_string())
        return load_arch(resolve(base_dir, v.get<std::string>()));
    if (v.is_object())
        return parse_arch(v.dump());
    throw Error("'arch' must be a path or an object");
}

template <class T>
std::vector<T> axis(const json &sweep, const char *key)
{
    if (!sweep.contains(key))
        return {};
    const json &v = sweep.at(key);
    if (!v.is_array() || v.empty())
        throw Error(fmt::format("sweep axis '{}' must be a non-empty array", key));
    return v.get<std::vector<T>>();
}

struct PatternChoice
{
    std::string name;
    SBPattern pattern;
};

std::vector<PatternChoice> pattern_axis(const json &sweep)
{
    std::vector<PatternChoice> out;
    if (!sweep.contains("pattern"))
        return out;
    const json &v = sweep.at("pattern");
    if (!v.is_array() || v.empty())
        throw Error("sweep axis 'pattern' must be a non-empty array");
    for (const json &p : v) {
        if (p.is_string()) {
            const std::string name = p.get<std::string>();
            auto pat = named_pattern(name);
            if (!pat)
                throw Error(fmt::format("unknown pattern '{}'", name));
            out.push_back({name, *pat});
        } else if (p.is_object()) {
            PatternChoice c;
            c.name = p.at("name").get<std::string>();
            c.pattern.input = p.at("input").get<std::array<int, 4>>();
            c.pattern.output = p.at("output").get<std::array<int, 4>>();
            out.push_back(c);
        } else {
            throw Error("pattern entries must be names or {name,input,output} objects");
        }
    }
    return out;
}

std::string ratio_tag(double r) { return fmt::format("{}", r); }

void expand_sweep(const json &sweep, const std::string &base_dir, std::vector<SweepConfig> &out)
{
    if (!sweep.contains("arch"))
        throw Error("sweep block needs a base 'arch'");
    const ArchSpec base = arch_from(sweep.at("arch"), base_dir);

    std::vector<ConnectionType> types;
    for (const std::string &t : axis<std::string>(sweep, "type")) {
        auto ct = connection_type_from(t);
        if (!ct)
            throw Error(fmt::format("unknown connection type '{}'", t));
        types.push_back(*ct);
    }
    if (types.empty())
        types.push_back(base.vertical.type);
    const auto pcts = axis<int>(sweep, "sb_percentage");
    std::vector<SitePlacement> places;
    for (const std::string &s : axis<std::string>(sweep, "sb_placement")) {
        auto sp = site_placement_from(s);
        if (!sp)
            throw Error(fmt::format("unknown site placement '{}'", s));
        places.push_back(*sp);
    }
    const auto pats = pattern_axis(sweep);
    const auto ratios = axis<double>(sweep, "vertical_delay_ratio");

    // Axes that do not apply to a type are left out of its product.
    for (ConnectionType t : types) {
        ArchSpec s0 = base;
        s0.vertical.type = t;
        const bool sb = s0.vertical.uses_sb(), pat = pattern_bearing(t), vert = t != ConnectionType::None2D;
        const std::vector<int> p_ax = sb && !pcts.empty() ? pcts : std::vector<int>{-1};
        const std::vector<SitePlacement> pl_ax =
            sb && !places.empty() ? places : std::vector<SitePlacement>{SitePlacement::CustomList};
        const std::vector<PatternChoice> pat_ax = pat && !pats.empty() ? pats : std::vector<PatternChoice>{{}};
        const std::vector<double> r_ax = vert && !ratios.empty() ? ratios : std::vector<double>{-1};
        for (int p : p_ax)
            for (SitePlacement pl : pl_ax)
                for (const PatternChoice &pc : pat_ax)
                    for (double r : r_ax) {
                        SweepConfig c;
                        c.spec = s0;
                        c.id = std::string(to_string(t));
                        if (p >= 0) {
                            c.spec.vertical.sb_percentage = p;
                            c.id += fmt::format("_p{}", p);
                        }
                        if (sb && !places.empty()) {
                            c.spec.vertical.placement = pl;
                            c.id += "_" + std::string(to_string(pl));
                        }
                        if (!pc.name.empty()) {
                            c.spec.vertical.pattern = pc.pattern;
                            c.id += "_pat" + pc.name;
                        }
                        if (r >= 0) {
                            c.spec.vertical_delay_ratio = r;
                            c.spec.vertical_delay_seconds.reset();
                            c.id += "_r" + ratio_tag(r);
                        }
                        out.push_back(std::move(c));
                    }
    }
}

} // namespace

ExperimentConfig parse_experiment(std::string_view text, const std::string &base_dir)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(e.what());
    }
    static const std::set<std::string> known{"benchmarks", "seeds",      "parallelism",  "baseline",
                                             "configs",    "sweep",      "measure_time", "site_seed",
                                             "artifacts",  "bitstreams", "output", "route",        "place"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!known.count(it.key()))
            throw Error(fmt::format("unknown experiment key '{}'", it.key()));

    ExperimentConfig cfg;
    try {
        if (!doc.contains("benchmarks"))
            throw Error("experiment needs a 'benchmarks' manifest");
        cfg.benchmarks = load_manifest(resolve(base_dir, doc.at("benchmarks").get<std::string>()));
        if (doc.contains("seeds"))
            cfg.seeds = doc.at("seeds").get<std::vector<uint64_t>>();
        if (cfg.seeds.empty())
            throw Error("'seeds' is empty");
        cfg.parallelism = doc.value("parallelism", 1);
        if (cfg.parallelism < 1)
            throw Error("'parallelism' must be at least 1");
        cfg.measure_time = doc.value("measure_time", true);
        cfg.site_seed = doc.value("site_seed", uint64_t{1});
        if (doc.contains("output"))
            cfg.output_dir = resolve(base_dir, doc.at("output").get<std::string>());
        cfg.artifacts = doc.value("artifacts", true);
        cfg.bitstreams = doc.value("bitstreams", true);
        if (doc.contains("route")) {
            const json &r = doc.at("route");
            cfg.flow.route.max_iters = r.value("max_iters", cfg.flow.route.max_iters);
            cfg.flow.route.timing_driven = r.value("timing_driven", cfg.flow.route.timing_driven);
        }
        if (doc.contains("place")) {
            const json &p = doc.at("place");
            cfg.flow.place.inner_num = p.value("inner_num", cfg.flow.place.inner_num);
            cfg.flow.place.interlayer_move_prob = p.value("interlayer_move_prob", cfg.flow.place.interlayer_move_prob);
        }
        if (doc.contains("configs"))
            for (const json &c : doc.at("configs"))
                cfg.configs.push_back({c.at("id").get<std::string>(), arch_from(c.at("arch"), base_dir)});
        if (doc.contains("sweep"))
            expand_sweep(doc.at("sweep"), base_dir, cfg.configs);
        cfg.baseline = doc.value("baseline", std::string());
    } catch (const json::exception &e) {
        throw Error(fmt::format("experiment: {}", e.what()));
    }
    if (cfg.configs.empty())
        throw Error("experiment defines no configurations");
    std::set<std::string> ids;
    for (const SweepConfig &c : cfg.configs) {
        if (!ids.insert(c.id).second)
            throw Error(fmt::format("duplicate config id '{}'", c.id));
        if (auto errs = validate(c.spec); !errs.empty())
            throw Error(fmt::format("config '{}': {}", c.id, errs.front()));
    }
    if (!cfg.baseline.empty() && !ids.count(cfg.baseline))
        throw Error(fmt::format("baseline '{}' is not a configured id", cfg.baseline));
    return cfg;
}

ExperimentConfig load_experiment(const std::string &path)
{
    return parse_experiment(read_file(path), std::filesystem::path(path).parent_path().string());
}

std::vector<ReportRow> run_sweep(const ExperimentConfig &cfg, const SweepProgress &progress)
{
    const bool artifacts = cfg.artifacts && !cfg.output_dir.empty();
    const bool want_model = artifacts && cfg.bitstreams;
    std::vector<Fabric> fabrics;
    fabrics.reserve(cfg.configs.size());
    for (const SweepConfig &c : cfg.configs)
        fabrics.push_back(build_fabric(c.spec, cfg.site_seed, want_model));

    struct Job
    {
        size_t config, bench;
        uint64_t seed;
    };
    std::vector<Job> jobs;
    for (size_t c = 0; c < cfg.configs.size(); ++c)
        for (size_t b = 0; b < cfg.benchmarks.size(); ++b)
            for (uint64_t s : cfg.seeds)
                jobs.push_back({c, b, s});

    std::vector<ReportRow> rows(jobs.size());
    std::atomic<size_t> next{0};
    std::mutex report_mu;
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            const Job &j = jobs[i];
            FlowOptions opts = cfg.flow;
            opts.measure_time = cfg.measure_time;
            if (artifacts)
                opts.artifact_dir = cfg.output_dir + "/artifacts/" + cfg.configs[j.config].id;
            rows[i] = run_flow(fabrics[j.config], cfg.configs[j.config].id, cfg.benchmarks[j.bench], j.seed, opts).row;
            if (progress) {
                std::lock_guard lock(report_mu);
                progress(rows[i]);
            }
        }
    };
    const int n = std::max(1, std::min<int>(cfg.parallelism, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t)
        pool.emplace_back(worker);
    worker();
    for (std::thread &t : pool)
        t.join();
    sort_rows(rows);
    return rows;
}

} // namespace fabric3d
