#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fabric3d {

enum class BlockKind { CLB, DSP, BRAM, IO, RoutingOnly };
enum class LayerClass { Homogeneous, NonLogicHetero, LogicHetero };
enum class PlanarPattern { Wilton, Subset };
enum class ConnectionType { None2D, CB, CBO, SB, Hybrid, HybridO, Custom };
enum class SitePlacement { RepeatedInterval, Rows, Columns, Core, Perimeter, Random, CustomList };

std::string_view to_string(BlockKind k);
std::string_view to_string(LayerClass c);
std::string_view to_string(PlanarPattern p);
std::string_view to_string(ConnectionType t);
std::string_view to_string(SitePlacement p);

// Accept the canonical spelling plus the hyphenated aliases ("CB-O", "Hybrid-O", "2D").
std::optional<BlockKind> block_kind_from(std::string_view s);
std::optional<LayerClass> layer_class_from(std::string_view s);
std::optional<PlanarPattern> planar_pattern_from(std::string_view s);
std::optional<ConnectionType> connection_type_from(std::string_view s);
std::optional<SitePlacement> site_placement_from(std::string_view s);

bool has_logic(BlockKind k);

struct Segment
{
    int length = 1;
    int tracks = 0;
    bool operator==(const Segment &) const = default;
};

// Vertical connection pattern of a 3D switch block. Entries are indexed
// left, bottom, right, top and taken modulo the channel width at use time.
struct SBPattern
{
    std::array<int, 4> input{0, 0, 0, 0};
    std::array<int, 4> output{0, 0, 0, 0};
    bool operator==(const SBPattern &) const = default;
};

struct SiteCoord
{
    int x = 0;
    int y = 0;
    bool operator==(const SiteCoord &) const = default;
    auto operator<=>(const SiteCoord &) const = default;
};

// Selective vertical connectivity for ConnectionType::Custom. Empty pin/track
// lists mean "all".
struct CustomRules
{
    bool cb_inputs = false;
    bool cb_outputs = false;
    bool sb = false;
    std::vector<int> pins;
    std::vector<int> tracks;
    bool operator==(const CustomRules &) const = default;
};

struct VerticalConfig
{
    ConnectionType type = ConnectionType::None2D;
    int sb_percentage = 100;
    SitePlacement placement = SitePlacement::RepeatedInterval;
    std::string custom_sites_file;
    std::vector<SiteCoord> custom_sites;
    SBPattern pattern;
    CustomRules custom;
    bool operator==(const VerticalConfig &) const = default;

    bool uses_cb_inputs() const;
    bool uses_cb_outputs() const;
    bool uses_sb() const;
};

struct LayerSpec
{
    LayerClass cls = LayerClass::Homogeneous;
    // One entry per grid column. Empty selects the default layout: perimeter
    // IO ring around CLBs when the grid is at least 3x3, all CLB otherwise.
    std::vector<BlockKind> columns;
    bool operator==(const LayerSpec &) const = default;
};

struct ArchSpec
{
    int grid_width = 0;
    int grid_height = 0;
    int layer_count = 1;
    std::vector<LayerSpec> layers;

    int channel_width = 0;
    std::vector<Segment> segments;
    PlanarPattern planar_sb = PlanarPattern::Wilton;
    double fc_in = 0.15;
    double fc_out = 0.10;

    int lut_size = 4;
    int cluster_size = 1;

    VerticalConfig vertical;

    // Delays in seconds, as written in the document.
    double vertical_delay_ratio = 0.739;
    std::optional<double> vertical_delay_seconds;
    double base_switch_delay = 137e-12 / 0.739;
    double wire_delay_per_tile = 10e-12;
    double lut_delay = 150e-12;
    double setup_time = 0.0;

    bool operator==(const ArchSpec &) const = default;

    LayerClass layer_class() const { return layers.empty() ? LayerClass::Homogeneous : layers.front().cls; }
    BlockKind tile_kind(int layer, int x, int y) const;
    double vertical_delay() const
    {
        return vertical_delay_seconds ? *vertical_delay_seconds : vertical_delay_ratio * base_switch_delay;
    }
    int fc_in_tracks() const;
    int fc_out_tracks() const;
    int sb_site_count() const { return (grid_width + 1) * (grid_height + 1); }
};

// Pin inventory of one tile kind.
struct TilePins
{
    int inputs = 0;
    int outputs = 0;
    // CLB/DSP/BRAM inputs are logically equivalent and share one sink class;
    // IO pads are independent, one class per pad.
    bool equivalent_inputs = true;
};

inline constexpr int kIoPadsPerTile = 2;
inline constexpr int kHardBlockInputs = 8;
inline constexpr int kHardBlockOutputs = 4;

TilePins tile_pins(const ArchSpec &spec, BlockKind kind);
int clb_input_count(int lut_size, int cluster_size);

// Parses an architecture document (JSON key-value tree) and validates it.
// The custom sites CSV is not read here; see load_arch().
ArchSpec parse_arch(std::string_view text);
// parse_arch() on a file, resolving custom_sites_file relative to it.
ArchSpec load_arch(const std::string &path);
std::string serialize_arch(const ArchSpec &spec);
std::vector<std::string> validate(const ArchSpec &spec);
uint64_t spec_hash(const ArchSpec &spec);

// "x,y" rows with a header line.
std::vector<SiteCoord> parse_site_csv(std::string_view text);

struct DesignSpaceBounds
{
    std::vector<ConnectionType> types;
    int index_lo = 0;
    int index_hi = -1;
    std::vector<int> percentages;
};

bool pattern_bearing(ConnectionType t);
boost::multiprecision::cpp_int count_design_space(const DesignSpaceBounds &bounds);

} // namespace fabric3d
