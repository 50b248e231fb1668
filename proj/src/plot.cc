#include "fabric3d/plot.h"

#include "fabric3d/common.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <set>

namespace fabric3d {

std::optional<PlotKind> plot_kind_from(std::string_view s)
{
    if (s == "bar")
        return PlotKind::Bar;
    if (s == "line")
        return PlotKind::Line;
    if (s == "box")
        return PlotKind::Box;
    return std::nullopt;
}

double metric_value(const ReportRow &r, std::string_view metric)
{
    if (metric == "wl")
        return r.wl;
    if (metric == "cpd_ps")
        return r.cpd_ps;
    if (metric == "route_ms")
        return r.route_ms;
    if (metric == "route_iters")
        return r.route_iters;
    if (metric == "crossings")
        return r.crossings;
    if (metric == "vert_total")
        return static_cast<double>(r.vert_total);
    if (metric == "vert_per_grid")
        return r.vert_per_grid;
    throw Error(fmt::format("unknown metric '{}'", metric));
}

std::string metric_label(std::string_view metric)
{
    if (metric == "wl")
        return "routed wirelength (tiles)";
    if (metric == "cpd_ps")
        return "critical path delay (ps)";
    if (metric == "route_ms")
        return "routing time (ms)";
    if (metric == "route_iters")
        return "router iterations (count)";
    if (metric == "crossings")
        return "layer crossings per net (count)";
    if (metric == "vert_total")
        return "vertical connections (count)";
    if (metric == "vert_per_grid")
        return "vertical connections per grid (count)";
    throw Error(fmt::format("unknown metric '{}'", metric));
}

double quantile7(const std::vector<double> &sorted, double p)
{
    if (sorted.empty())
        throw Error("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    return {quantile7(values, 0.0), quantile7(values, 0.25), quantile7(values, 0.5), quantile7(values, 0.75),
            quantile7(values, 1.0)};
}

std::optional<double> ratio_of(const std::string &config_id, std::string *family)
{
    size_t start = 0;
    while (start <= config_id.size()) {
        size_t end = config_id.find('_', start);
        if (end == std::string::npos)
            end = config_id.size();
        if (start > 0 && end - start > 1 && config_id[start] == 'r') {
            double v = 0;
            const char *b = config_id.data() + start + 1, *e = config_id.data() + end;
            auto [p, ec] = std::from_chars(b, e, v);
            if (ec == std::errc() && p == e) {
                if (family)
                    *family = config_id.substr(0, start - 1) + config_id.substr(end);
                return v;
            }
        }
        start = end + 1;
    }
    return std::nullopt;
}

namespace {

// Geometric mean when every value is positive, arithmetic otherwise.
double aggregate(const std::vector<double> &v)
{
    if (std::all_of(v.begin(), v.end(), [](double x) { return x > 0; }))
        return geomean(v);
    double s = 0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

const char *kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                          "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

const char *color(size_t i) { return kPalette[i % std::size(kPalette)]; }

// Upper axis bound: 1, 2 or 5 times a power of ten, at least `v`.
double nice_ceiling(double v)
{
    if (!(v > 0))
        return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= v * (1 - 1e-12))
            return m * mag;
    return 10.0 * mag;
}

std::string fmt_tick(double v)
{
    std::string s = fmt::format("{:.6g}", v);
    return s;
}

class Canvas
{
  public:
    static constexpr double W = 880, H = 520, L = 90, R = 200, T = 40, B = 130;

    Canvas(std::string title, std::string xlabel, std::string ylabel, double ymin, double ymax)
        : ymin_(ymin), ymax_(ymax)
    {
        out_ = fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
                           "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                           W, H, W, H);
        out_ += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", W, H);
        out_ += fmt::format("<text x=\"{:.2f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                            L + pw() / 2, xml_escape(title));
        // axes
        out_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", L,
                            T, T + ph());
        out_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n", L,
                            T + ph(), L + pw());
        for (int i = 0; i <= 5; ++i) {
            const double v = ymin_ + (ymax_ - ymin_) * i / 5.0;
            const double y = py(v);
            out_ += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n",
                                L, y, L + pw(), y);
            out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", L - 6, y + 4,
                                fmt_tick(v));
        }
        out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", L + pw() / 2,
                            H - 12, xml_escape(xlabel));
        out_ += fmt::format("<text x=\"18\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">"
                            "{}</text>\n",
                            T + ph() / 2, T + ph() / 2, xml_escape(ylabel));
    }

    static double pw() { return W - L - R; }
    static double ph() { return H - T - B; }
    double py(double v) const { return T + ph() * (1.0 - (v - ymin_) / (ymax_ - ymin_)); }

    void xtick(double x, std::string_view label, bool rotate)
    {
        out_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", x,
                            T + ph(), T + ph() + 4);
        if (rotate)
            out_ += fmt::format("<text x=\"{0:.2f}\" y=\"{1:.2f}\" text-anchor=\"end\" "
                                "transform=\"rotate(-40 {0:.2f} {1:.2f})\">{2}</text>\n",
                                x, T + ph() + 16, xml_escape(label));
        else
            out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x,
                                T + ph() + 18, xml_escape(label));
    }

    void legend(const std::vector<std::string> &names)
    {
        for (size_t i = 0; i < names.size(); ++i) {
            const double y = T + 10 + 18.0 * static_cast<double>(i);
            out_ += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
                                W - R + 16, y - 10, color(i));
            out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", W - R + 34, y, xml_escape(names[i]));
        }
    }

    void raw(const std::string &s) { out_ += s; }
    std::string finish() { return out_ + "</svg>\n"; }

  private:
    double ymin_, ymax_;
    std::string out_;
};

std::string bar_plot(const std::vector<ReportRow> &rows, std::string_view metric)
{
    std::set<std::string> benches, configs;
    std::map<std::pair<std::string, std::string>, std::vector<double>> vals;
    for (const ReportRow &r : rows) {
        benches.insert(r.benchmark);
        configs.insert(r.config_id);
        vals[{r.config_id, r.benchmark}].push_back(metric_value(r, metric));
    }
    double top = 0;
    std::map<std::pair<std::string, std::string>, double> agg;
    for (const auto &[k, v] : vals)
        top = std::max(top, agg[k] = aggregate(v));
    Canvas c(metric_label(metric) + " per benchmark", "benchmark", metric_label(metric), 0, nice_ceiling(top));
    const std::vector<std::string> cfg(configs.begin(), configs.end());
    const double group = Canvas::pw() / static_cast<double>(benches.size());
    const double bw = group * 0.8 / static_cast<double>(cfg.size());
    size_t bi = 0;
    for (const std::string &b : benches) {
        const double x0 = Canvas::L + group * static_cast<double>(bi) + group * 0.1;
        for (size_t ci = 0; ci < cfg.size(); ++ci) {
            auto it = agg.find({cfg[ci], b});
            if (it == agg.end())
                continue;
            const double y = c.py(it->second);
            c.raw(fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\">"
                              "<title>{} {}: {:.6g}</title></rect>\n",
                              x0 + bw * static_cast<double>(ci), y, bw, c.py(0) - y, color(ci), xml_escape(cfg[ci]),
                              xml_escape(b), it->second));
        }
        c.xtick(x0 + group * 0.4, b, true);
        ++bi;
    }
    c.legend(cfg);
    return c.finish();
}

std::string line_plot(const std::vector<ReportRow> &rows, std::string_view metric)
{
    // family -> ratio -> benchmark -> values
    std::map<std::string, std::map<double, std::map<std::string, std::vector<double>>>> data;
    for (const ReportRow &r : rows) {
        std::string fam;
        auto ratio = ratio_of(r.config_id, &fam);
        if (!ratio)
            continue;
        data[fam][*ratio][r.benchmark].push_back(metric_value(r, metric));
    }
    if (data.empty())
        throw Error("line plot needs configs with a vertical delay ratio (_r<ratio>) in their ids");
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    double xmin = INFINITY, xmax = -INFINITY, top = 0;
    for (const auto &[fam, by_ratio] : data)
        for (const auto &[ratio, by_bench] : by_ratio) {
            std::vector<double> per;
            for (const auto &[b, v] : by_bench)
                per.push_back(aggregate(v));
            const double y = aggregate(per);
            series[fam].push_back({ratio, y});
            xmin = std::min(xmin, ratio);
            xmax = std::max(xmax, ratio);
            top = std::max(top, y);
        }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    Canvas c(metric_label(metric) + " vs vertical delay", "vertical delay (x base switch delay)", metric_label(metric),
             0, nice_ceiling(top));
    auto px = [&](double x) { return Canvas::L + Canvas::pw() * (0.05 + 0.9 * (x - xmin) / (xmax - xmin)); };
    std::set<double> ticks;
    for (const auto &[fam, pts] : series)
        for (auto [x, y] : pts)
            ticks.insert(x);
    for (double x : ticks)
        c.xtick(px(x), fmt_tick(x), false);
    std::vector<std::string> names;
    size_t i = 0;
    for (const auto &[fam, pts] : series) {
        std::string poly;
        for (auto [x, y] : pts)
            poly += fmt::format("{}{:.2f},{:.2f}", poly.empty() ? "" : " ", px(x), c.py(y));
        c.raw(fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", poly, color(i)));
        for (auto [x, y] : pts)
            c.raw(fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"><title>{} r={}: {:.6g}</title>"
                              "</circle>\n",
                              px(x), c.py(y), color(i), xml_escape(fam), x, y));
        names.push_back(fam);
        ++i;
    }
    c.legend(names);
    return c.finish();
}

std::string box_plot(const std::vector<ReportRow> &rows, std::string_view metric)
{
    std::map<std::string, std::vector<double>> vals;
    for (const ReportRow &r : rows)
        vals[r.config_id].push_back(metric_value(r, metric));
    std::map<std::string, BoxStats> stats;
    double top = 0;
    for (const auto &[k, v] : vals) {
        stats[k] = box_stats(v);
        top = std::max(top, stats[k].max);
    }
    Canvas c(metric_label(metric) + " distribution", "configuration", metric_label(metric), 0, nice_ceiling(top));
    const double slot = Canvas::pw() / static_cast<double>(stats.size());
    size_t i = 0;
    for (const auto &[k, s] : stats) {
        const double cx = Canvas::L + slot * (static_cast<double>(i) + 0.5);
        const double hw = std::min(30.0, slot * 0.3);
        c.raw(fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", cx,
                          c.py(s.max), c.py(s.min)));
        c.raw(fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" "
                          "stroke=\"black\"><title>{}: min {:.6g} q1 {:.6g} median {:.6g} q3 {:.6g} max {:.6g}</title>"
                          "</rect>\n",
                          cx - hw, c.py(s.q3), 2 * hw, c.py(s.q1) - c.py(s.q3), color(i), xml_escape(k), s.min, s.q1,
                          s.median, s.q3, s.max));
        for (double v : {s.median, s.min, s.max})
            c.raw(fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\" "
                              "stroke-width=\"{}\"/>\n",
                              cx - hw, c.py(v), cx + hw, c.py(v), v == s.median ? 2 : 1));
        c.xtick(cx, k, true);
        ++i;
    }
    return c.finish();
}

} // namespace

std::string render_plot(const std::vector<ReportRow> &rows, PlotKind kind, std::string_view metric)
{
    metric_label(metric); // validates the name
    std::vector<ReportRow> ok;
    for (const ReportRow &r : rows)
        if (r.ok)
            ok.push_back(r);
    if (ok.empty())
        throw Error("nothing to plot: report has no successful rows");
    switch (kind) {
    case PlotKind::Bar: return bar_plot(ok, metric);
    case PlotKind::Line: return line_plot(ok, metric);
    case PlotKind::Box: return box_plot(ok, metric);
    }
    throw Error("unknown plot kind");
}

} // namespace fabric3d
