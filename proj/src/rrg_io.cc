#include "fabric3d/common.h"
#include "fabric3d/rrg.h"

#include <charconv>
#include <fmt/format.h>

namespace fabric3d {

std::string serialize_rrg(const RoutingResourceGraph &g)
{
    std::string out;
    out.reserve(64 * (g.nodes.size() + g.edges.size()) + 256);
    auto it = std::back_inserter(out);
    fmt::format_to(it, "rrg 1\n");
    fmt::format_to(it, "spec_hash {}\n", hex64(g.spec_hash));
    fmt::format_to(it, "grid {} {} {} {}\n", g.layer_count, g.width, g.height, g.channel_width);
    const DelayModel &d = g.delays;
    fmt::format_to(it, "delays {} {} {} {} {}\n", d.base_switch_ps, d.wire_per_tile_ps, d.vertical_ps, d.lut_ps,
                   d.setup_ps);
    fmt::format_to(it, "tiles {}\n", g.tiles.size());
    for (int l = 0; l < g.layer_count; ++l)
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x)
                fmt::format_to(it, "T {} {} {} {}\n", l, x, y, to_string(g.tile(l, x, y).kind));
    fmt::format_to(it, "nodes {}\n", g.nodes.size());
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const RRNode &n = g.nodes[i];
        fmt::format_to(it, "N {} {} {} {} {} {} {} {} {}\n", i, to_string(n.kind), n.layer, n.xlo, n.ylo, n.xhi, n.yhi,
                       n.ptc, to_string(n.dir));
    }
    fmt::format_to(it, "edges {}\n", g.edges.size());
    for (const RREdge &e : g.edges)
        fmt::format_to(it, "E {} {} {:.3f}\n", e.src, e.dst, e.delay_ps);
    out += "end\n";
    return out;
}

namespace {

class LineReader
{
  public:
    explicit LineReader(std::string_view text) : text_(text) {}

    // Next non-empty line split into fields; throws at end of input.
    std::vector<std::string> next()
    {
        while (pos_ < text_.size()) {
            size_t eol = text_.find('\n', pos_);
            if (eol == std::string_view::npos)
                eol = text_.size();
            std::string_view line = text_.substr(pos_, eol - pos_);
            pos_ = eol + 1;
            ++line_;
            auto f = split_ws(line);
            if (!f.empty())
                return f;
        }
        throw ParseError("unexpected end of document", line_ + 1);
    }

    int line() const { return line_; }

    [[noreturn]] void fail(const std::string &what) const { throw ParseError(what, line_); }

    void expect(const std::vector<std::string> &f, const char *tag, size_t fields)
    {
        if (f[0] != tag)
            fail(fmt::format("expected '{}', found '{}'", tag, f[0]));
        if (f.size() != fields)
            fail(fmt::format("'{}' line needs {} fields, found {}", tag, fields, f.size()));
    }

    long integer(const std::string &s) const
    {
        long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            fail(fmt::format("bad integer '{}'", s));
        return v;
    }

    double real(const std::string &s) const
    {
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            fail(fmt::format("bad number '{}'", s));
        return v;
    }

  private:
    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 0;
};

NodeKind parse_kind(const LineReader &r, const std::string &s)
{
    for (int k = 0; k < kNodeKindCount; ++k)
        if (to_string(static_cast<NodeKind>(k)) == s)
            return static_cast<NodeKind>(k);
    r.fail(fmt::format("unknown node kind '{}'", s));
}

Direction parse_dir(const LineReader &r, const std::string &s)
{
    for (int d = 0; d <= static_cast<int>(Direction::UnderDec); ++d)
        if (to_string(static_cast<Direction>(d)) == s)
            return static_cast<Direction>(d);
    r.fail(fmt::format("unknown direction '{}'", s));
}

} // namespace

RoutingResourceGraph deserialize_rrg(std::string_view text)
{
    LineReader r(text);
    RoutingResourceGraph g;

    auto f = r.next();
    r.expect(f, "rrg", 2);
    if (f[1] != "1")
        r.fail("unsupported version " + f[1]);

    f = r.next();
    r.expect(f, "spec_hash", 2);
    if (f[1].size() != 16 || f[1].find_first_not_of("0123456789abcdef") != std::string::npos)
        r.fail("bad spec hash");
    g.spec_hash = std::stoull(f[1], nullptr, 16);

    f = r.next();
    r.expect(f, "grid", 5);
    g.layer_count = static_cast<int>(r.integer(f[1]));
    g.width = static_cast<int>(r.integer(f[2]));
    g.height = static_cast<int>(r.integer(f[3]));
    g.channel_width = static_cast<int>(r.integer(f[4]));
    if (g.layer_count < 1 || g.width < 1 || g.height < 1 || g.channel_width < 1)
        r.fail("grid dimensions must be positive");

    f = r.next();
    r.expect(f, "delays", 6);
    g.delays.base_switch_ps = r.real(f[1]);
    g.delays.wire_per_tile_ps = r.real(f[2]);
    g.delays.vertical_ps = r.real(f[3]);
    g.delays.lut_ps = r.real(f[4]);
    g.delays.setup_ps = r.real(f[5]);

    f = r.next();
    r.expect(f, "tiles", 2);
    size_t nt = static_cast<size_t>(r.integer(f[1]));
    if (nt != static_cast<size_t>(g.layer_count) * g.width * g.height)
        r.fail("tile count does not match grid");
    g.tiles.resize(nt);
    for (int l = 0; l < g.layer_count; ++l)
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x) {
                f = r.next();
                r.expect(f, "T", 5);
                if (r.integer(f[1]) != l || r.integer(f[2]) != x || r.integer(f[3]) != y)
                    r.fail("tiles out of order");
                auto k = block_kind_from(f[4]);
                if (!k)
                    r.fail("unknown block kind '" + f[4] + "'");
                g.tile(l, x, y).kind = *k;
            }

    f = r.next();
    r.expect(f, "nodes", 2);
    long nn = r.integer(f[1]);
    if (nn < 0)
        r.fail("negative node count");
    g.nodes.reserve(nn);
    for (long i = 0; i < nn; ++i) {
        f = r.next();
        r.expect(f, "N", 10);
        if (r.integer(f[1]) != i)
            r.fail(fmt::format("node id {} out of sequence", f[1]));
        RRNode n;
        n.kind = parse_kind(r, f[2]);
        n.layer = static_cast<int>(r.integer(f[3]));
        n.xlo = static_cast<int>(r.integer(f[4]));
        n.ylo = static_cast<int>(r.integer(f[5]));
        n.xhi = static_cast<int>(r.integer(f[6]));
        n.yhi = static_cast<int>(r.integer(f[7]));
        n.ptc = static_cast<int>(r.integer(f[8]));
        n.dir = parse_dir(r, f[9]);
        if (n.layer < 0 || n.layer >= g.layer_count)
            r.fail("node layer out of range");
        bool pin = n.kind <= NodeKind::Opin;
        if (pin && (n.xlo < 0 || n.xlo >= g.width || n.ylo < 0 || n.ylo >= g.height))
            r.fail("pin node outside the grid");
        g.nodes.push_back(n);
    }

    f = r.next();
    r.expect(f, "edges", 2);
    long ne = r.integer(f[1]);
    if (ne < 0)
        r.fail("negative edge count");
    g.edges.reserve(ne);
    for (long i = 0; i < ne; ++i) {
        f = r.next();
        r.expect(f, "E", 4);
        RREdge e;
        e.src = static_cast<int>(r.integer(f[1]));
        e.dst = static_cast<int>(r.integer(f[2]));
        e.delay_ps = r.real(f[3]);
        if (e.src < 0 || e.src >= nn || e.dst < 0 || e.dst >= nn)
            r.fail("edge endpoint out of range");
        g.edges.push_back(e);
    }

    f = r.next();
    r.expect(f, "end", 1);
    g.finalize();
    return g;
}

} // namespace fabric3d
