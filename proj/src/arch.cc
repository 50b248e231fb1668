#include "fabric3d/arch.h"

#include "fabric3d/common.h"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

namespace fabric3d {

using nlohmann::json;

namespace {

constexpr std::pair<BlockKind, std::string_view> kBlockNames[] = {
        {BlockKind::CLB, "CLB"}, {BlockKind::DSP, "DSP"}, {BlockKind::BRAM, "BRAM"},
        {BlockKind::IO, "IO"},   {BlockKind::RoutingOnly, "RoutingOnly"},
};
constexpr std::pair<LayerClass, std::string_view> kClassNames[] = {
        {LayerClass::Homogeneous, "Homogeneous"},
        {LayerClass::NonLogicHetero, "NonLogicHetero"},
        {LayerClass::LogicHetero, "LogicHetero"},
};
constexpr std::pair<PlanarPattern, std::string_view> kPlanarNames[] = {
        {PlanarPattern::Wilton, "Wilton"},
        {PlanarPattern::Subset, "Subset"},
};
constexpr std::pair<ConnectionType, std::string_view> kTypeNames[] = {
        {ConnectionType::None2D, "None"}, {ConnectionType::CB, "CB"},           {ConnectionType::CBO, "CBO"},
        {ConnectionType::SB, "SB"},       {ConnectionType::Hybrid, "Hybrid"}, {ConnectionType::HybridO, "HybridO"},
        {ConnectionType::Custom, "Custom"},
};
constexpr std::pair<SitePlacement, std::string_view> kPlacementNames[] = {
        {SitePlacement::RepeatedInterval, "RepeatedInterval"},
        {SitePlacement::Rows, "Rows"},
        {SitePlacement::Columns, "Columns"},
        {SitePlacement::Core, "Core"},
        {SitePlacement::Perimeter, "Perimeter"},
        {SitePlacement::Random, "Random"},
        {SitePlacement::CustomList, "CustomList"},
};

template <typename E, size_t N> std::string_view name_of(const std::pair<E, std::string_view> (&tab)[N], E v)
{
    for (auto &[e, n] : tab)
        if (e == v)
            return n;
    return "?";
}

template <typename E, size_t N>
std::optional<E> value_of(const std::pair<E, std::string_view> (&tab)[N], std::string_view s)
{
    for (auto &[e, n] : tab)
        if (n == s)
            return e;
    return std::nullopt;
}

} // namespace

std::string_view to_string(BlockKind k) { return name_of(kBlockNames, k); }
std::string_view to_string(LayerClass c) { return name_of(kClassNames, c); }
std::string_view to_string(PlanarPattern p) { return name_of(kPlanarNames, p); }
std::string_view to_string(ConnectionType t) { return name_of(kTypeNames, t); }
std::string_view to_string(SitePlacement p) { return name_of(kPlacementNames, p); }

std::optional<BlockKind> block_kind_from(std::string_view s) { return value_of(kBlockNames, s); }
std::optional<LayerClass> layer_class_from(std::string_view s) { return value_of(kClassNames, s); }
std::optional<PlanarPattern> planar_pattern_from(std::string_view s) { return value_of(kPlanarNames, s); }
std::optional<SitePlacement> site_placement_from(std::string_view s) { return value_of(kPlacementNames, s); }

std::optional<ConnectionType> connection_type_from(std::string_view s)
{
    if (s == "2D" || s == "None2D")
        return ConnectionType::None2D;
    if (s == "CB-O")
        return ConnectionType::CBO;
    if (s == "Hybrid-O")
        return ConnectionType::HybridO;
    return value_of(kTypeNames, s);
}

bool has_logic(BlockKind k) { return k == BlockKind::CLB || k == BlockKind::DSP || k == BlockKind::BRAM; }

bool VerticalConfig::uses_cb_inputs() const
{
    return type == ConnectionType::CB || type == ConnectionType::Hybrid ||
           (type == ConnectionType::Custom && custom.cb_inputs);
}

bool VerticalConfig::uses_cb_outputs() const
{
    return type == ConnectionType::CB || type == ConnectionType::CBO || type == ConnectionType::Hybrid ||
           type == ConnectionType::HybridO || (type == ConnectionType::Custom && custom.cb_outputs);
}

bool VerticalConfig::uses_sb() const
{
    return type == ConnectionType::SB || type == ConnectionType::Hybrid || type == ConnectionType::HybridO ||
           (type == ConnectionType::Custom && custom.sb);
}

BlockKind ArchSpec::tile_kind(int layer, int x, int y) const
{
    const LayerSpec &ls = layers.at(layer);
    if (!ls.columns.empty())
        return ls.columns.at(x);
    if (grid_width >= 3 && grid_height >= 3) {
        const bool edge_x = x == 0 || x == grid_width - 1;
        const bool edge_y = y == 0 || y == grid_height - 1;
        if (edge_x && edge_y)
            return BlockKind::RoutingOnly;
        if (edge_x || edge_y)
            return BlockKind::IO;
    }
    return BlockKind::CLB;
}

int ArchSpec::fc_in_tracks() const
{
    return std::max(1, static_cast<int>(std::ceil(fc_in * channel_width - 1e-9)));
}

int ArchSpec::fc_out_tracks() const
{
    return std::max(1, static_cast<int>(std::ceil(fc_out * channel_width - 1e-9)));
}

int clb_input_count(int lut_size, int cluster_size) { return (lut_size * (cluster_size + 1) + 1) / 2; }

TilePins tile_pins(const ArchSpec &spec, BlockKind kind)
{
    switch (kind) {
    case BlockKind::CLB:
        return {clb_input_count(spec.lut_size, spec.cluster_size), spec.cluster_size, true};
    case BlockKind::IO:
        return {kIoPadsPerTile, kIoPadsPerTile, false};
    case BlockKind::DSP:
    case BlockKind::BRAM:
        return {kHardBlockInputs, kHardBlockOutputs, true};
    case BlockKind::RoutingOnly:
        return {0, 0, true};
    }
    return {};
}

bool pattern_bearing(ConnectionType t)
{
    return t == ConnectionType::SB || t == ConnectionType::Hybrid || t == ConnectionType::HybridO;
}

// ---------------------------------------------------------------------------
// Document reader

namespace {

std::pair<int, int> line_col(std::string_view text, size_t byte)
{
    int line = 1, col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

class Reader
{
  public:
    Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {}

    void allow(std::initializer_list<std::string_view> keys) const
    {
        if (!j_.is_object())
            fail("expected an object");
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
                throw ParseError(fmt::format("unknown key '{}'", join(it.key())));
        }
    }

    bool has(const char *key) const { return j_.contains(key); }

    Reader child(const char *key) const
    {
        if (!j_.contains(key))
            throw ParseError(fmt::format("missing key '{}'", join(key)));
        return Reader(j_.at(key), join(key));
    }

    std::optional<Reader> opt_child(const char *key) const
    {
        if (!j_.contains(key))
            return std::nullopt;
        return Reader(j_.at(key), join(key));
    }

    int integer(const char *key, int lo, int hi) const
    {
        const json &v = value(key);
        if (!v.is_number_integer())
            throw ParseError(fmt::format("'{}' must be an integer", join(key)));
        long long x = v.get<long long>();
        if (x < lo || x > hi)
            throw ParseError(fmt::format("'{}' = {} is out of range [{}, {}]", join(key), x, lo, hi));
        return static_cast<int>(x);
    }

    double number(const char *key, double lo, double hi, bool open_lo = false) const
    {
        const json &v = value(key);
        if (!v.is_number())
            throw ParseError(fmt::format("'{}' must be a number", join(key)));
        double x = v.get<double>();
        if (!(x >= lo) || x > hi || (open_lo && x <= lo))
            throw ParseError(fmt::format("'{}' = {} is out of range", join(key), x));
        return x;
    }

    std::string string(const char *key) const
    {
        const json &v = value(key);
        if (!v.is_string())
            throw ParseError(fmt::format("'{}' must be a string", join(key)));
        return v.get<std::string>();
    }

    template <typename E> E enumeration(const char *key, std::optional<E> (*conv)(std::string_view)) const
    {
        std::string s = string(key);
        auto e = conv(s);
        if (!e)
            throw ParseError(fmt::format("'{}' has unknown value '{}'", join(key), s));
        return *e;
    }

    std::array<int, 4> quad(const char *key) const
    {
        const json &v = value(key);
        if (!v.is_array() || v.size() != 4)
            throw ParseError(fmt::format("'{}' must be an array of 4 integers", join(key)));
        std::array<int, 4> out{};
        for (size_t i = 0; i < 4; ++i) {
            if (!v[i].is_number_integer())
                throw ParseError(fmt::format("'{}' must be an array of 4 integers", join(key)));
            out[i] = v[i].get<int>();
        }
        return out;
    }

    std::vector<int> int_list(const char *key) const
    {
        const json &v = value(key);
        if (!v.is_array())
            throw ParseError(fmt::format("'{}' must be an array", join(key)));
        std::vector<int> out;
        for (auto &e : v) {
            if (!e.is_number_integer())
                throw ParseError(fmt::format("'{}' must contain integers", join(key)));
            out.push_back(e.get<int>());
        }
        return out;
    }

    bool boolean(const char *key) const
    {
        const json &v = value(key);
        if (!v.is_boolean())
            throw ParseError(fmt::format("'{}' must be a boolean", join(key)));
        return v.get<bool>();
    }

    const json &raw() const { return j_; }
    std::string join(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }
    [[noreturn]] void fail(const std::string &msg) const
    {
        throw ParseError(fmt::format("{}: {}", path_.empty() ? "<root>" : path_, msg));
    }

  private:
    const json &value(const char *key) const
    {
        if (!j_.contains(key))
            throw ParseError(fmt::format("missing key '{}'", join(key)));
        return j_.at(key);
    }

    const json &j_;
    std::string path_;
};

std::vector<BlockKind> parse_columns(const json &arr, const std::string &path)
{
    std::vector<BlockKind> out;
    for (auto &e : arr) {
        if (!e.is_string())
            throw ParseError(fmt::format("'{}' entries must be block kind strings", path));
        auto k = block_kind_from(e.get<std::string>());
        if (!k)
            throw ParseError(fmt::format("'{}' has unknown block kind '{}'", path, e.get<std::string>()));
        out.push_back(*k);
    }
    return out;
}

ArchSpec parse_unchecked(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error &e) {
        auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        std::string msg = e.what();
        // Strip nlohmann's "[json.exception.parse_error.101] " prefix.
        if (auto p = msg.find("] "); p != std::string::npos)
            msg = msg.substr(p + 2);
        throw ParseError("syntax error: " + msg, line, col);
    }

    ArchSpec spec;
    Reader root(doc, "");
    root.allow({"grid", "layers", "routing", "logic", "vertical", "timing"});

    Reader grid = root.child("grid");
    grid.allow({"width", "height"});
    spec.grid_width = grid.integer("width", 1, 4096);
    spec.grid_height = grid.integer("height", 1, 4096);

    Reader layers = root.child("layers");
    layers.allow({"count", "class", "columns"});
    spec.layer_count = layers.integer("count", 1, 64);
    std::vector<LayerClass> classes;
    if (layers.has("class")) {
        const json &c = layers.raw().at("class");
        if (c.is_array()) {
            for (auto &e : c) {
                auto v = e.is_string() ? layer_class_from(e.get<std::string>()) : std::nullopt;
                if (!v)
                    throw ParseError("'layers.class' has an unknown class entry");
                classes.push_back(*v);
            }
            if (static_cast<int>(classes.size()) != spec.layer_count)
                throw ParseError("'layers.class' list length must equal layers.count");
        } else {
            classes.assign(spec.layer_count, layers.enumeration<LayerClass>("class", layer_class_from));
        }
    } else {
        classes.assign(spec.layer_count, LayerClass::Homogeneous);
    }
    spec.layers.resize(spec.layer_count);
    for (int l = 0; l < spec.layer_count; ++l)
        spec.layers[l].cls = classes[l];
    if (layers.has("columns")) {
        const json &c = layers.raw().at("columns");
        if (!c.is_array())
            throw ParseError("'layers.columns' must be an array");
        bool nested = !c.empty() && c.front().is_array();
        if (nested) {
            if (static_cast<int>(c.size()) != spec.layer_count)
                throw ParseError("'layers.columns' must list one column array per layer");
            for (int l = 0; l < spec.layer_count; ++l)
                spec.layers[l].columns = parse_columns(c[l], fmt::format("layers.columns[{}]", l));
        } else {
            auto cols = parse_columns(c, "layers.columns");
            for (auto &ls : spec.layers)
                ls.columns = cols;
        }
    }

    Reader routing = root.child("routing");
    routing.allow({"channel_width", "segments", "planar_sb", "fc_in", "fc_out"});
    spec.channel_width = routing.integer("channel_width", 1, 100000);
    {
        const json &segs = routing.raw().contains("segments") ? routing.raw().at("segments") : json();
        if (segs.is_null()) {
            spec.segments = {{1, spec.channel_width}};
        } else {
            if (!segs.is_array() || segs.empty())
                throw ParseError("'routing.segments' must be a non-empty array");
            for (size_t i = 0; i < segs.size(); ++i) {
                Reader s(segs[i], fmt::format("routing.segments[{}]", i));
                s.allow({"length", "tracks"});
                spec.segments.push_back({s.integer("length", 1, 4096), s.integer("tracks", 1, 100000)});
            }
        }
    }
    if (routing.has("planar_sb"))
        spec.planar_sb = routing.enumeration<PlanarPattern>("planar_sb", planar_pattern_from);
    if (routing.has("fc_in"))
        spec.fc_in = routing.number("fc_in", 0.0, 1.0, true);
    if (routing.has("fc_out"))
        spec.fc_out = routing.number("fc_out", 0.0, 1.0, true);

    Reader logic = root.child("logic");
    logic.allow({"lut_size", "cluster_size"});
    spec.lut_size = logic.integer("lut_size", 1, 8);
    spec.cluster_size = logic.integer("cluster_size", 1, 64);

    if (auto v = root.opt_child("vertical")) {
        v->allow({"type", "sb_percentage", "sb_placement", "custom_sites_file", "pattern", "custom"});
        VerticalConfig &vc = spec.vertical;
        if (v->has("type"))
            vc.type = v->enumeration<ConnectionType>("type", connection_type_from);
        if (v->has("sb_percentage"))
            vc.sb_percentage = v->integer("sb_percentage", 0, 100);
        if (v->has("sb_placement"))
            vc.placement = v->enumeration<SitePlacement>("sb_placement", site_placement_from);
        if (v->has("custom_sites_file"))
            vc.custom_sites_file = v->string("custom_sites_file");
        if (auto p = v->opt_child("pattern")) {
            p->allow({"input", "output"});
            if (p->has("input"))
                vc.pattern.input = p->quad("input");
            if (p->has("output"))
                vc.pattern.output = p->quad("output");
        }
        if (auto c = v->opt_child("custom")) {
            c->allow({"cb_inputs", "cb_outputs", "sb", "pins", "tracks"});
            if (c->has("cb_inputs"))
                vc.custom.cb_inputs = c->boolean("cb_inputs");
            if (c->has("cb_outputs"))
                vc.custom.cb_outputs = c->boolean("cb_outputs");
            if (c->has("sb"))
                vc.custom.sb = c->boolean("sb");
            if (c->has("pins"))
                vc.custom.pins = c->int_list("pins");
            if (c->has("tracks"))
                vc.custom.tracks = c->int_list("tracks");
        }
    }

    if (auto t = root.opt_child("timing")) {
        t->allow({"vertical_delay_ratio", "vertical_delay_seconds", "base_switch_delay", "wire_delay_per_tile",
                  "lut_delay", "setup_time"});
        if (t->has("vertical_delay_ratio") && t->has("vertical_delay_seconds"))
            throw ParseError("'timing' takes vertical_delay_ratio or vertical_delay_seconds, not both");
        if (t->has("base_switch_delay"))
            spec.base_switch_delay = t->number("base_switch_delay", 0.0, 1.0, true);
        if (t->has("vertical_delay_ratio"))
            spec.vertical_delay_ratio = t->number("vertical_delay_ratio", 0.0, 1e6, true);
        if (t->has("vertical_delay_seconds"))
            spec.vertical_delay_seconds = t->number("vertical_delay_seconds", 0.0, 1.0, true);
        if (t->has("wire_delay_per_tile"))
            spec.wire_delay_per_tile = t->number("wire_delay_per_tile", 0.0, 1.0);
        if (t->has("lut_delay"))
            spec.lut_delay = t->number("lut_delay", 0.0, 1.0);
        if (t->has("setup_time"))
            spec.setup_time = t->number("setup_time", 0.0, 1.0);
    }
    return spec;
}

void throw_if_invalid(const ArchSpec &spec)
{
    auto v = validate(spec);
    if (!v.empty()) {
        std::string msg = v.front();
        for (size_t i = 1; i < v.size(); ++i)
            msg += "; " + v[i];
        throw ParseError(msg);
    }
}

} // namespace

ArchSpec parse_arch(std::string_view text)
{
    ArchSpec spec = parse_unchecked(text);
    throw_if_invalid(spec);
    return spec;
}

ArchSpec load_arch(const std::string &path)
{
    ArchSpec spec = parse_unchecked(read_file(path));
    if (!spec.vertical.custom_sites_file.empty()) {
        std::filesystem::path p(spec.vertical.custom_sites_file);
        if (p.is_relative())
            p = std::filesystem::path(path).parent_path() / p;
        spec.vertical.custom_sites = parse_site_csv(read_file(p.string()));
    }
    throw_if_invalid(spec);
    return spec;
}

std::vector<std::string> validate(const ArchSpec &spec)
{
    std::vector<std::string> out;
    if (spec.grid_width < 1 || spec.grid_height < 1)
        out.push_back("grid dimensions must be positive");
    if (spec.layer_count < 1)
        out.push_back("layer count must be at least 1");
    if (static_cast<int>(spec.layers.size()) != spec.layer_count)
        out.push_back(fmt::format("layer list has {} entries for {} layers", spec.layers.size(), spec.layer_count));

    int track_sum = 0;
    for (auto &s : spec.segments) {
        if (s.length < 1 || s.tracks < 1)
            out.push_back("segment length and track count must be positive");
        track_sum += s.tracks;
    }
    if (spec.segments.empty() || track_sum != spec.channel_width)
        out.push_back(fmt::format("channel width mismatch: segments provide {} tracks, channel_width is {}", track_sum,
                                  spec.channel_width));

    if (spec.lut_size < 1 || spec.lut_size > 8)
        out.push_back("lut_size must be in [1, 8]");
    if (spec.cluster_size < 1)
        out.push_back("cluster_size must be positive");
    if (!(spec.fc_in > 0 && spec.fc_in <= 1) || !(spec.fc_out > 0 && spec.fc_out <= 1))
        out.push_back("fc_in and fc_out must be in (0, 1]");

    const VerticalConfig &vc = spec.vertical;
    if (vc.type != ConnectionType::None2D && spec.layer_count < 2)
        out.push_back("vertical connectivity requires ≥2 layers");
    if (vc.sb_percentage < 0 || vc.sb_percentage > 100)
        out.push_back("sb_percentage must be in [0, 100]");
    bool has_custom = !vc.custom_sites.empty() || !vc.custom_sites_file.empty();
    if (vc.placement == SitePlacement::CustomList && !has_custom)
        out.push_back("sb_placement CustomList requires custom sites");
    if (vc.placement != SitePlacement::CustomList && has_custom)
        out.push_back("custom sites are only allowed with sb_placement CustomList");
    if (vc.type == ConnectionType::Custom) {
        for (int t : vc.custom.tracks)
            if (t < 0 || t >= spec.channel_width)
                out.push_back(fmt::format("custom rule track {} does not exist", t));
        for (int p : vc.custom.pins)
            if (p < 0)
                out.push_back(fmt::format("custom rule pin {} does not exist", p));
    }

    if (!(spec.vertical_delay_ratio > 0))
        out.push_back("vertical_delay_ratio must be positive");
    if (spec.vertical_delay_seconds && !(*spec.vertical_delay_seconds > 0))
        out.push_back("vertical delay must be positive");
    if (!(spec.base_switch_delay >= 0) || !(spec.wire_delay_per_tile >= 0) || !(spec.lut_delay >= 0) ||
        !(spec.setup_time >= 0))
        out.push_back("delays must be non-negative");

    // Layer organisation.
    if (static_cast<int>(spec.layers.size()) == spec.layer_count && spec.layer_count >= 1 && spec.grid_width >= 1 &&
        spec.grid_height >= 1) {
        LayerClass cls = spec.layers.front().cls;
        bool mixed = false;
        for (auto &ls : spec.layers)
            if (ls.cls != cls)
                mixed = true;
        if (mixed)
            out.push_back("mixed layer classes: exactly one class per architecture");

        bool drawable = true;
        for (size_t l = 0; l < spec.layers.size(); ++l) {
            const auto &cols = spec.layers[l].columns;
            if (!cols.empty() && static_cast<int>(cols.size()) != spec.grid_width) {
                out.push_back(fmt::format("layer {} block mix is not drawable: {} columns on a grid {} wide", l,
                                          cols.size(), spec.grid_width));
                drawable = false;
            }
        }
        if (drawable && !mixed) {
            auto layer_has_logic = [&](int l) {
                for (int y = 0; y < spec.grid_height; ++y)
                    for (int x = 0; x < spec.grid_width; ++x)
                        if (has_logic(spec.tile_kind(l, x, y)))
                            return true;
                return false;
            };
            auto layer_routing_only = [&](int l) {
                for (int y = 0; y < spec.grid_height; ++y)
                    for (int x = 0; x < spec.grid_width; ++x)
                        if (spec.tile_kind(l, x, y) != BlockKind::RoutingOnly)
                            return false;
                return true;
            };
            switch (cls) {
            case LayerClass::Homogeneous:
                for (int l = 1; l < spec.layer_count; ++l)
                    if (spec.layers[l].columns != spec.layers[0].columns) {
                        out.push_back("homogeneous layers must be identical");
                        break;
                    }
                for (int l = 0; l < spec.layer_count; ++l)
                    if (layer_routing_only(l)) {
                        out.push_back("homogeneous layers may not be routing-only");
                        break;
                    }
                break;
            case LayerClass::NonLogicHetero: {
                bool any = false;
                for (int l = 0; l < spec.layer_count; ++l)
                    any = any || layer_has_logic(l);
                if (!any)
                    out.push_back("non-logic heterogeneous stack has no logic layer");
                break;
            }
            case LayerClass::LogicHetero:
                for (int l = 0; l < spec.layer_count; ++l)
                    if (!layer_has_logic(l)) {
                        out.push_back(fmt::format("logic heterogeneous layer {} carries no logic", l));
                        break;
                    }
                break;
            }
        }
    }
    return out;
}

std::string serialize_arch(const ArchSpec &spec)
{
    json doc;
    doc["grid"] = {{"width", spec.grid_width}, {"height", spec.grid_height}};

    json layers;
    layers["count"] = spec.layer_count;
    bool mixed = false;
    for (auto &ls : spec.layers)
        mixed = mixed || ls.cls != spec.layer_class();
    if (mixed) {
        json cls = json::array();
        for (auto &ls : spec.layers)
            cls.push_back(std::string(to_string(ls.cls)));
        layers["class"] = cls;
    } else {
        layers["class"] = std::string(to_string(spec.layer_class()));
    }
    bool uniform_cols = true;
    for (auto &ls : spec.layers)
        uniform_cols = uniform_cols && ls.columns == spec.layers.front().columns;
    auto cols_json = [](const std::vector<BlockKind> &cols) {
        json a = json::array();
        for (auto k : cols)
            a.push_back(std::string(to_string(k)));
        return a;
    };
    if (!spec.layers.empty()) {
        if (uniform_cols) {
            if (!spec.layers.front().columns.empty())
                layers["columns"] = cols_json(spec.layers.front().columns);
        } else {
            json a = json::array();
            for (auto &ls : spec.layers)
                a.push_back(cols_json(ls.columns));
            layers["columns"] = a;
        }
    }
    doc["layers"] = layers;

    json segs = json::array();
    for (auto &s : spec.segments)
        segs.push_back({{"length", s.length}, {"tracks", s.tracks}});
    doc["routing"] = {{"channel_width", spec.channel_width},
                      {"segments", segs},
                      {"planar_sb", std::string(to_string(spec.planar_sb))},
                      {"fc_in", spec.fc_in},
                      {"fc_out", spec.fc_out}};
    doc["logic"] = {{"lut_size", spec.lut_size}, {"cluster_size", spec.cluster_size}};

    const VerticalConfig &vc = spec.vertical;
    json v;
    v["type"] = std::string(to_string(vc.type));
    v["sb_percentage"] = vc.sb_percentage;
    v["sb_placement"] = std::string(to_string(vc.placement));
    if (!vc.custom_sites_file.empty())
        v["custom_sites_file"] = vc.custom_sites_file;
    v["pattern"] = {{"input", vc.pattern.input}, {"output", vc.pattern.output}};
    if (vc.type == ConnectionType::Custom)
        v["custom"] = {{"cb_inputs", vc.custom.cb_inputs},
                       {"cb_outputs", vc.custom.cb_outputs},
                       {"sb", vc.custom.sb},
                       {"pins", vc.custom.pins},
                       {"tracks", vc.custom.tracks}};
    doc["vertical"] = v;

    json t;
    t["base_switch_delay"] = spec.base_switch_delay;
    if (spec.vertical_delay_seconds)
        t["vertical_delay_seconds"] = *spec.vertical_delay_seconds;
    else
        t["vertical_delay_ratio"] = spec.vertical_delay_ratio;
    t["wire_delay_per_tile"] = spec.wire_delay_per_tile;
    t["lut_delay"] = spec.lut_delay;
    t["setup_time"] = spec.setup_time;
    doc["timing"] = t;

    return doc.dump(2) + "\n";
}

uint64_t spec_hash(const ArchSpec &spec)
{
    uint64_t h = fnv1a64(serialize_arch(spec));
    for (auto &s : spec.vertical.custom_sites)
        h = fnv1a64(fmt::format("{},{};", s.x, s.y), h);
    return h;
}

std::vector<SiteCoord> parse_site_csv(std::string_view text)
{
    std::vector<SiteCoord> out;
    int line_no = 0;
    size_t pos = 0;
    bool header_seen = false;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;
        if (!header_seen) {
            header_seen = true;
            if (line != "x,y")
                throw ParseError("site list must start with header 'x,y'", line_no, 1);
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string_view::npos)
            throw ParseError("expected 'x,y'", line_no, 1);
        try {
            std::string xs(trim(line.substr(0, comma)));
            std::string ys(trim(line.substr(comma + 1)));
            size_t ix = 0, iy = 0;
            int x = std::stoi(xs, &ix);
            int y = std::stoi(ys, &iy);
            if (ix != xs.size() || iy != ys.size())
                throw std::invalid_argument("trailing");
            out.push_back({x, y});
        } catch (const std::logic_error &) {
            throw ParseError("malformed coordinate", line_no, 1);
        }
    }
    return out;
}

} // namespace fabric3d
