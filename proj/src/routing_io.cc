#include "fabric3d/common.h"
#include "fabric3d/routing.h"
#include "fabric3d/rrg.h"

#include <charconv>
#include <fmt/format.h>
#include <unordered_map>

namespace fabric3d {

double routed_wirelength(const RoutingResourceGraph &g, const std::vector<RouteTree> &nets, double wz)
{
    double wl = 0;
    for (const RouteTree &t : nets)
        for (int v : t.nodes) {
            const RRNode &n = g.nodes[v];
            if (n.is_wire())
                wl += n.span();
            else if (n.kind == NodeKind::ChanZ && (n.dir == Direction::UnderInc || n.dir == Direction::AboveDec))
                wl += wz;
        }
    return wl;
}

double count_layer_crossings(const RoutingResult &r, const RoutingResourceGraph &g)
{
    long crossings = 0;
    long nets = 0;
    for (const RouteTree &t : r.nets) {
        if (t.sinks.empty())
            continue;
        ++nets;
        for (int e : t.edges)
            if (e >= 0 && g.crosses_layers(e))
                ++crossings;
    }
    return nets ? static_cast<double>(crossings) / nets : 0.0;
}

std::string write_route_dump(const RoutingResult &r, const RoutingResourceGraph &g, double cpd_ps)
{
    std::string out;
    for (const RouteTree &t : r.nets) {
        out += "NET " + t.name + ":";
        std::unordered_map<int, size_t> index;
        std::vector<std::vector<size_t>> kids(t.nodes.size());
        for (size_t i = 0; i < t.nodes.size(); ++i) {
            index[t.nodes[i]] = i;
            if (i > 0 && t.edges[i] >= 0)
                kids[index.at(g.edges[t.edges[i]].src)].push_back(i);
        }
        // Iterative depth-first walk; a revisited id restarts from a branch point.
        struct Frame
        {
            size_t node;
            size_t next;
        };
        std::vector<Frame> stack;
        if (!t.nodes.empty()) {
            out += fmt::format(" {}", t.nodes[0]);
            stack.push_back({0, 0});
        }
        bool resumed = false;
        while (!stack.empty()) {
            Frame &f = stack.back();
            if (f.next >= kids[f.node].size()) {
                stack.pop_back();
                resumed = true;
                continue;
            }
            if (resumed && f.next > 0)
                out += fmt::format(" {}", t.nodes[f.node]);
            resumed = false;
            size_t c = kids[f.node][f.next++];
            out += fmt::format(" {}", t.nodes[c]);
            stack.push_back({c, 0});
        }
        out += "\n";
    }
    out += fmt::format("SUMMARY wl={} cpd_ps={:.3f} crossings={:.6f} iterations={}\n", r.wirelength, cpd_ps,
                       count_layer_crossings(r, g), r.iterations);
    return out;
}

RoutingResult read_route_dump(std::string_view text, const RoutingResourceGraph &g)
{
    RoutingResult r;
    r.success = true;
    int lineno = 0;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++lineno;
        if (line.empty() || line.rfind("SUMMARY", 0) == 0)
            continue;
        auto f = split_ws(line);
        if (f.size() < 2 || f[0] != "NET" || f[1].empty() || f[1].back() != ':')
            throw ParseError("expected 'NET <name>: <ids>'", lineno);
        RouteTree t;
        t.name = f[1].substr(0, f[1].size() - 1);
        std::unordered_map<int, size_t> index;
        int cur = -1;
        for (size_t i = 2; i < f.size(); ++i) {
            int id = 0;
            auto [p, ec] = std::from_chars(f[i].data(), f[i].data() + f[i].size(), id);
            if (ec != std::errc() || p != f[i].data() + f[i].size() || id < 0 ||
                id >= static_cast<int>(g.nodes.size()))
                throw ParseError(fmt::format("bad node id '{}'", f[i]), lineno);
            if (index.count(id)) {
                cur = id;
                continue;
            }
            int e = -1;
            if (cur >= 0) {
                e = g.find_edge(cur, id);
                if (e < 0)
                    throw ParseError(fmt::format("no edge {} -> {} in the graph", cur, id), lineno);
            } else {
                t.source = id;
            }
            index[id] = t.nodes.size();
            t.nodes.push_back(id);
            t.edges.push_back(e);
            if (g.nodes[id].kind == NodeKind::Sink)
                t.sinks.push_back(id);
            cur = id;
        }
        r.nets.push_back(std::move(t));
    }
    r.occupancy.assign(g.nodes.size(), 0);
    for (const RouteTree &t : r.nets)
        for (int v : t.nodes)
            ++r.occupancy[v];
    r.wirelength = routed_wirelength(g, r.nets);
    return r;
}

} // namespace fabric3d
