#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fabric3d {

// One (benchmark, config, seed) outcome. Failed rows keep the error text and
// zero metrics.
struct ReportRow
{
    std::string benchmark;
    std::string config_id;
    uint64_t seed = 0;
    double wl = 0;
    double cpd_ps = 0;
    int route_iters = 0;
    double route_ms = 0;
    long vert_total = 0;
    double vert_per_grid = 0;
    double crossings = 0;
    bool ok = false;
    std::string error;
    long heap_pops = 0; // router work; not part of the CSV
};

inline constexpr std::string_view kCsvHeader =
    "benchmark,config_id,seed,wl,cpd_ps,route_iters,route_ms,vert_total,vert_per_grid,crossings,status,error";

// Sorted by config id, benchmark, seed.
void sort_rows(std::vector<ReportRow> &rows);
std::string write_csv(const std::vector<ReportRow> &rows);
std::vector<ReportRow> read_csv(std::string_view text);

struct SummaryLine
{
    std::string config_id;
    int benchmarks = 0; // benchmarks compared against the baseline
    int failed_rows = 0;
    double wl_geomean = 0;
    double cpd_geomean = 0;
    double wl_ratio = 0; // relative to the baseline over the same benchmarks
    double cpd_ratio = 0;
    double wl_reduction_pct = 0; // (1 - ratio) * 100
    double cpd_reduction_pct = 0;
};

// Per config: geometric mean over seeds per benchmark, then over the
// benchmarks that succeeded both here and in the baseline. Throws if the
// baseline config is absent.
std::vector<SummaryLine> summarize(const std::vector<ReportRow> &rows, const std::string &baseline);
std::string format_summary(const std::vector<SummaryLine> &lines, const std::string &baseline);

double geomean(const std::vector<double> &values);

} // namespace fabric3d
