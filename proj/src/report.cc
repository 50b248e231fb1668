#include "fabric3d/report.h"

#include "fabric3d/common.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <set>
#include <tuple>

namespace fabric3d {

void sort_rows(std::vector<ReportRow> &rows)
{
    std::stable_sort(rows.begin(), rows.end(), [](const ReportRow &a, const ReportRow &b) {
        return std::tie(a.config_id, a.benchmark, a.seed) < std::tie(b.config_id, b.benchmark, b.seed);
    });
}

namespace {

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

// RFC 4180 records; quoted fields may span lines.
std::vector<std::vector<std::string>> parse_records(std::string_view text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted)
        throw ParseError("unterminated quoted field", static_cast<int>(rows.size()) + 1);
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class T>
T parse_num(const std::string &s, int line, const char *what)
{
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(fmt::format("bad {} '{}'", what, s), line);
    return v;
}

} // namespace

std::string write_csv(const std::vector<ReportRow> &rows)
{
    std::string out(kCsvHeader);
    out += "\n";
    for (const ReportRow &r : rows)
        out += fmt::format("{},{},{},{},{:.3f},{},{:.3f},{},{:.6f},{:.6f},{},{}\n", csv_field(r.benchmark),
                           csv_field(r.config_id), r.seed, r.wl, r.cpd_ps, r.route_iters, r.route_ms, r.vert_total,
                           r.vert_per_grid, r.crossings, r.ok ? "ok" : "fail", csv_field(r.error));
    return out;
}

std::vector<ReportRow> read_csv(std::string_view text)
{
    auto recs = parse_records(text);
    if (recs.empty())
        throw ParseError("empty report", 1);
    std::string header;
    for (size_t i = 0; i < recs[0].size(); ++i)
        header += (i ? "," : "") + recs[0][i];
    if (header != kCsvHeader)
        throw ParseError("unexpected report header", 1);
    std::vector<ReportRow> rows;
    for (size_t i = 1; i < recs.size(); ++i) {
        const auto &f = recs[i];
        const int line = static_cast<int>(i) + 1;
        if (f.size() != 12)
            throw ParseError(fmt::format("expected 12 fields, found {}", f.size()), line);
        ReportRow r;
        r.benchmark = f[0];
        r.config_id = f[1];
        r.seed = parse_num<uint64_t>(f[2], line, "seed");
        r.wl = parse_num<double>(f[3], line, "wl");
        r.cpd_ps = parse_num<double>(f[4], line, "cpd_ps");
        r.route_iters = parse_num<int>(f[5], line, "route_iters");
        r.route_ms = parse_num<double>(f[6], line, "route_ms");
        r.vert_total = parse_num<long>(f[7], line, "vert_total");
        r.vert_per_grid = parse_num<double>(f[8], line, "vert_per_grid");
        r.crossings = parse_num<double>(f[9], line, "crossings");
        if (f[10] != "ok" && f[10] != "fail")
            throw ParseError(fmt::format("bad status '{}'", f[10]), line);
        r.ok = f[10] == "ok";
        r.error = f[11];
        rows.push_back(std::move(r));
    }
    return rows;
}

double geomean(const std::vector<double> &values)
{
    if (values.empty())
        return 0.0;
    double s = 0;
    for (double v : values) {
        if (!(v > 0))
            throw Error(fmt::format("geometric mean needs positive values, got {}", v));
        s += std::log(v);
    }
    return std::exp(s / static_cast<double>(values.size()));
}

std::vector<SummaryLine> summarize(const std::vector<ReportRow> &rows, const std::string &baseline)
{
    // config -> benchmark -> per-seed values
    std::map<std::string, std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>> ok;
    std::map<std::string, int> failed;
    std::set<std::string> configs;
    for (const ReportRow &r : rows) {
        configs.insert(r.config_id);
        if (!r.ok) {
            ++failed[r.config_id];
            continue;
        }
        auto &slot = ok[r.config_id][r.benchmark];
        slot.first.push_back(r.wl);
        slot.second.push_back(r.cpd_ps);
    }
    if (!configs.count(baseline))
        throw Error(fmt::format("baseline config '{}' not in report", baseline));
    const auto &base = ok[baseline];

    std::vector<SummaryLine> out;
    for (const std::string &c : configs) {
        SummaryLine s;
        s.config_id = c;
        s.failed_rows = failed[c];
        std::vector<double> wl, cpd, bwl, bcpd;
        for (const auto &[bench, v] : ok[c]) {
            auto it = base.find(bench);
            if (it == base.end())
                continue;
            wl.push_back(geomean(v.first));
            cpd.push_back(geomean(v.second));
            bwl.push_back(geomean(it->second.first));
            bcpd.push_back(geomean(it->second.second));
        }
        s.benchmarks = static_cast<int>(wl.size());
        if (!wl.empty()) {
            s.wl_geomean = geomean(wl);
            s.cpd_geomean = geomean(cpd);
            s.wl_ratio = s.wl_geomean / geomean(bwl);
            s.cpd_ratio = s.cpd_geomean / geomean(bcpd);
            s.wl_reduction_pct = (1.0 - s.wl_ratio) * 100.0;
            s.cpd_reduction_pct = (1.0 - s.cpd_ratio) * 100.0;
        }
        out.push_back(s);
    }
    return out;
}

std::string format_summary(const std::vector<SummaryLine> &lines, const std::string &baseline)
{
    std::string out = fmt::format("baseline {}\n", baseline);
    out += "config_id,benchmarks,failed_rows,wl_geomean,cpd_geomean_ps,wl_ratio,cpd_ratio,wl_reduction_pct,cpd_reduction_pct\n";
    for (const SummaryLine &s : lines)
        out += fmt::format("{},{},{},{:.4f},{:.3f},{:.6f},{:.6f},{:.3f},{:.3f}\n", csv_field(s.config_id), s.benchmarks,
                           s.failed_rows, s.wl_geomean, s.cpd_geomean, s.wl_ratio, s.cpd_ratio, s.wl_reduction_pct,
                           s.cpd_reduction_pct);
    return out;
}

} // namespace fabric3d
