#pragma once

#include "fabric3d/arch.h"
#include "fabric3d/rrg.h"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace fabric3d {

// 3D switch-block sites, shared by every adjacent layer pair.
struct SitePlan
{
    std::vector<SiteCoord> sites; // row-major (y, then x)
    int total_sites = 0;
    double realized_percentage = 0;
};

// Number of 3D sites for an integer percentage, rounded half up.
int target_site_count(int percentage, int total_sites);

SitePlan plan_sites(const ArchSpec &spec, uint64_t seed);

// Planar track per side (left, bottom, right, top) for vertical track k.
// `input`: tracks selected onto the upward/downward via. `output`: tracks the
// via fans out to on the receiving layer.
struct TrackMap
{
    std::array<int, 4> input{};
    std::array<int, 4> output{};
};

TrackMap vertical_track_map(const SBPattern &pattern, int width, int k);

struct NamedPattern
{
    std::string_view name;
    SBPattern pattern;
};
// The studied 3D switch-block patterns: subset, off-by-one-output,
// revolving-offset, revolving-input, revolving-output, direction-match,
// symmetric-offset, random.
const std::vector<NamedPattern> &named_patterns();
std::optional<SBPattern> named_pattern(std::string_view name);

struct ChanzPair
{
    int source = -1;
    int sink = -1;
    SiteCoord site;
    int k = 0;
    bool upward = true;
};

RoutingResourceGraph extend_to_3d(const RoutingResourceGraph &base, const ArchSpec &spec, const SitePlan &plan);

// Pairs in node order of their source halves.
std::vector<ChanzPair> chanz_pairs(const RoutingResourceGraph &g);

struct VerticalCounts
{
    long pin_in = 0;
    long pin_out = 0;
    long sb = 0;
    double per_grid = 0;
    long total() const { return pin_in + pin_out + sb; }
};

VerticalCounts count_vertical(const RoutingResourceGraph &g);

} // namespace fabric3d
