#pragma once

#include "fabric3d/report.h"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fabric3d {

enum class PlotKind
{
    Bar,  // metric per benchmark, one bar per config
    Line, // metric against vertical delay ratio, one line per config family
    Box,  // metric distribution per config
};

std::optional<PlotKind> plot_kind_from(std::string_view s);

// Metrics a plot can show: wl, cpd_ps, route_ms, route_iters, crossings,
// vert_total, vert_per_grid.
double metric_value(const ReportRow &r, std::string_view metric);
std::string metric_label(std::string_view metric);

// Hyndman-Fan type 7 (linear between order statistics). `sorted` must be
// ascending and non-empty; p in [0, 1].
double quantile7(const std::vector<double> &sorted, double p);

struct BoxStats
{
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};
BoxStats box_stats(std::vector<double> values);

// Parses the "_r<ratio>" component of a config id. Returns the id without it
// in `family`.
std::optional<double> ratio_of(const std::string &config_id, std::string *family = nullptr);

// SVG document. Only successful rows are drawn; throws if there are none or
// if a line plot finds no ratio axis.
std::string render_plot(const std::vector<ReportRow> &rows, PlotKind kind, std::string_view metric);

} // namespace fabric3d
