#include "fabric3d/blif.h"

#include "fabric3d/common.h"

#include <algorithm>
#include <fmt/format.h>
#include <unordered_map>

namespace fabric3d {

int LogicNetlist::find_signal(std::string_view name) const
{
    auto it = signal_ids.find(std::string(name));
    return it == signal_ids.end() ? -1 : it->second;
}

int LogicNetlist::intern(const std::string &name)
{
    auto [it, fresh] = signal_ids.emplace(name, static_cast<int>(signals.size()));
    if (fresh)
        signals.push_back(name);
    return it->second;
}

int LogicNetlist::max_fanin() const
{
    size_t m = 0;
    for (const LutCell &c : luts)
        m = std::max(m, c.inputs.size());
    return static_cast<int>(m);
}

void LogicNetlist::finish()
{
    drivers.assign(signals.size(), Driver{});
    auto drive = [&](int sig, Driver::Kind k, int idx) {
        if (drivers[sig].kind != Driver::None)
            throw Error(fmt::format("signal '{}' has multiple drivers", signals[sig]));
        drivers[sig] = {k, idx};
    };
    for (size_t i = 0; i < inputs.size(); ++i)
        drive(inputs[i], Driver::Input, static_cast<int>(i));
    for (size_t i = 0; i < luts.size(); ++i)
        drive(luts[i].output, Driver::Lut, static_cast<int>(i));
    for (size_t i = 0; i < latches.size(); ++i)
        drive(latches[i].q, Driver::Latch, static_cast<int>(i));

    auto need = [&](int sig) {
        if (drivers[sig].kind == Driver::None)
            throw Error(fmt::format("signal '{}' is used but never driven", signals[sig]));
    };
    for (const LutCell &c : luts) {
        if (c.table.size() != (size_t{1} << c.inputs.size()))
            throw Error(fmt::format("LUT '{}' truth table has {} entries for {} inputs", signals[c.output],
                                    c.table.size(), c.inputs.size()));
        for (int s : c.inputs)
            need(s);
    }
    for (const Latch &l : latches)
        need(l.d);
    for (int s : outputs)
        need(s);

    // Kahn over LUT-to-LUT dependencies.
    std::vector<int> indeg(luts.size(), 0);
    std::vector<std::vector<int>> users(luts.size());
    for (size_t i = 0; i < luts.size(); ++i)
        for (int s : luts[i].inputs)
            if (drivers[s].kind == Driver::Lut) {
                ++indeg[i];
                users[drivers[s].index].push_back(static_cast<int>(i));
            }
    topo.clear();
    for (size_t i = 0; i < luts.size(); ++i)
        if (indeg[i] == 0)
            topo.push_back(static_cast<int>(i));
    for (size_t h = 0; h < topo.size(); ++h)
        for (int u : users[topo[h]])
            if (--indeg[u] == 0)
                topo.push_back(u);
    if (topo.size() != luts.size()) {
        for (size_t i = 0; i < luts.size(); ++i)
            if (indeg[i] > 0)
                throw Error(fmt::format("combinational cycle through '{}'", signals[luts[i].output]));
    }
}

namespace {

struct LogicalLine
{
    int line;
    std::vector<std::string> tok;
};

std::vector<LogicalLine> logical_lines(std::string_view text)
{
    std::vector<LogicalLine> out;
    std::string pending;
    int start = 0;
    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++lineno;
        if (size_t hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        if (!raw.empty() && raw.back() == '\r')
            raw.remove_suffix(1);
        bool cont = false;
        std::string_view body = trim(raw);
        if (!body.empty() && body.back() == '\\') {
            cont = true;
            body.remove_suffix(1);
        }
        if (pending.empty())
            start = lineno;
        pending += ' ';
        pending += body;
        if (cont)
            continue;
        auto tok = split_ws(pending);
        if (!tok.empty())
            out.push_back({start, std::move(tok)});
        pending.clear();
    }
    return out;
}

std::vector<uint8_t> expand_cover(const std::vector<std::pair<std::string, char>> &cover, size_t n, int line)
{
    std::vector<uint8_t> table(size_t{1} << n, 0);
    if (cover.empty())
        return table;
    char polarity = cover.front().second;
    for (const auto &[cube, val] : cover)
        if (val != polarity)
            throw ParseError("cover mixes on-set and off-set rows", line);
    for (size_t row = 0; row < table.size(); ++row) {
        bool hit = false;
        for (const auto &cv : cover) {
            const std::string &cube = cv.first;
            bool match = true;
            for (size_t i = 0; i < n && match; ++i) {
                int bit = static_cast<int>((row >> (n - 1 - i)) & 1);
                if (cube[i] != '-' && cube[i] - '0' != bit)
                    match = false;
            }
            if (match) {
                hit = true;
                break;
            }
        }
        table[row] = (polarity == '1') == hit;
    }
    return table;
}

} // namespace

LogicNetlist parse_blif(std::string_view text)
{
    LogicNetlist n;
    std::vector<LogicalLine> lines = logical_lines(text);
    std::unordered_map<int, int> driven_at; // signal -> line of its definition
    auto define = [&](int sig, int line) {
        auto [it, fresh] = driven_at.emplace(sig, line);
        if (!fresh)
            throw ParseError(fmt::format("signal '{}' has multiple drivers (first driven on line {})", n.signals[sig],
                                         it->second),
                             line);
    };
    std::vector<std::string> clock_names;
    bool seen_model = false;
    bool ended = false;

    size_t i = 0;
    while (i < lines.size() && !ended) {
        const LogicalLine &ll = lines[i];
        const std::string &cmd = ll.tok[0];
        if (cmd == ".model") {
            if (seen_model)
                throw ParseError("only a single .model is supported", ll.line);
            seen_model = true;
            n.model = ll.tok.size() > 1 ? ll.tok[1] : "top";
            ++i;
        } else if (cmd == ".inputs" || cmd == ".outputs") {
            for (size_t t = 1; t < ll.tok.size(); ++t) {
                int s = n.intern(ll.tok[t]);
                if (cmd == ".inputs")
                    n.inputs.push_back(s);
                else
                    n.outputs.push_back(s);
            }
            ++i;
        } else if (cmd == ".names") {
            if (ll.tok.size() < 2)
                throw ParseError(".names needs an output signal", ll.line);
            size_t fanin = ll.tok.size() - 2;
            if (fanin > 16)
                throw ParseError(fmt::format(".names with {} inputs exceeds the supported 16", fanin), ll.line);
            LutCell cell;
            for (size_t t = 1; t + 1 < ll.tok.size(); ++t)
                cell.inputs.push_back(n.intern(ll.tok[t]));
            cell.output = n.intern(ll.tok.back());
            define(cell.output, ll.line);
            std::vector<std::pair<std::string, char>> cover;
            ++i;
            for (; i < lines.size() && lines[i].tok[0][0] != '.'; ++i) {
                const LogicalLine &row = lines[i];
                std::string cube;
                std::string val;
                if (fanin == 0) {
                    if (row.tok.size() != 1)
                        throw ParseError("constant cover row must be a single value", row.line);
                    val = row.tok[0];
                } else {
                    if (row.tok.size() != 2)
                        throw ParseError("cover row must be '<cube> <value>'", row.line);
                    cube = row.tok[0];
                    val = row.tok[1];
                    if (cube.size() != fanin)
                        throw ParseError(fmt::format("cube '{}' has {} literals, expected {}", cube, cube.size(), fanin),
                                         row.line);
                    if (cube.find_first_not_of("01-") != std::string::npos)
                        throw ParseError(fmt::format("bad cube '{}'", cube), row.line);
                }
                if (val != "0" && val != "1")
                    throw ParseError(fmt::format("bad output value '{}'", val), row.line);
                cover.emplace_back(cube, val[0]);
            }
            cell.table = expand_cover(cover, fanin, ll.line);
            n.luts.push_back(std::move(cell));
        } else if (cmd == ".latch") {
            const auto &t = ll.tok;
            if (t.size() < 3 || t.size() > 6)
                throw ParseError(".latch expects: input output [type control] [init]", ll.line);
            Latch l;
            l.d = n.intern(t[1]);
            l.q = n.intern(t[2]);
            define(l.q, ll.line);
            std::string init = "3";
            if (t.size() == 4) {
                init = t[3];
            } else if (t.size() >= 5) {
                if (t[3] != "re")
                    throw ParseError(fmt::format("latch type '{}' unsupported; only rising-edge 're'", t[3]), ll.line);
                if (t[4] != "NIL")
                    clock_names.push_back(t[4]);
                if (t.size() == 6)
                    init = t[5];
            }
            if (init != "0" && init != "1" && init != "2" && init != "3")
                throw ParseError(fmt::format("bad latch init '{}'", init), ll.line);
            l.init = init == "1" ? 1 : 0;
            n.latches.push_back(l);
            ++i;
        } else if (cmd == ".end") {
            ended = true;
        } else {
            throw ParseError(fmt::format("unsupported directive '{}'", cmd), ll.line);
        }
    }
    if (!seen_model && n.signals.empty() && lines.empty())
        throw ParseError("empty document", 1);
    for (size_t j = i + 1; j < lines.size(); ++j)
        if (lines[j].tok[0] == ".model")
            throw ParseError("only a single .model is supported", lines[j].line);

    std::sort(clock_names.begin(), clock_names.end());
    clock_names.erase(std::unique(clock_names.begin(), clock_names.end()), clock_names.end());
    if (clock_names.size() > 1)
        throw ParseError(fmt::format("multiple clocks ('{}', '{}'); only one is supported", clock_names[0],
                                     clock_names[1]));
    if (!clock_names.empty()) {
        n.clock = clock_names[0];
        int clk = n.find_signal(n.clock);
        if (clk >= 0) {
            for (const LutCell &c : n.luts)
                if (std::find(c.inputs.begin(), c.inputs.end(), clk) != c.inputs.end() || c.output == clk)
                    throw ParseError(fmt::format("clock '{}' is also used as data", n.clock));
            for (const Latch &l : n.latches)
                if (l.d == clk)
                    throw ParseError(fmt::format("clock '{}' is also used as data", n.clock));
            if (std::find(n.outputs.begin(), n.outputs.end(), clk) != n.outputs.end())
                throw ParseError(fmt::format("clock '{}' is also used as data", n.clock));
            n.inputs.erase(std::remove(n.inputs.begin(), n.inputs.end(), clk), n.inputs.end());
        }
    }
    for (int s : n.inputs)
        if (auto it = driven_at.find(s); it != driven_at.end())
            throw ParseError(fmt::format("primary input '{}' is also driven inside the model", n.signals[s]),
                             it->second);
    try {
        n.finish();
    } catch (const ParseError &) {
        throw;
    } catch (const Error &e) {
        throw ParseError(e.what());
    }
    return n;
}

LogicNetlist load_blif(const std::string &path)
{
    try {
        return parse_blif(read_file(path));
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string write_blif(const LogicNetlist &n)
{
    std::string out;
    auto it = std::back_inserter(out);
    fmt::format_to(it, ".model {}\n", n.model.empty() ? "top" : n.model);
    out += ".inputs";
    for (int s : n.inputs)
        out += " " + n.signals[s];
    if (!n.clock.empty())
        out += " " + n.clock;
    out += "\n.outputs";
    for (int s : n.outputs)
        out += " " + n.signals[s];
    out += "\n";
    for (const Latch &l : n.latches)
        fmt::format_to(it, ".latch {} {} re {} {}\n", n.signals[l.d], n.signals[l.q],
                       n.clock.empty() ? "NIL" : n.clock, l.init);
    for (const LutCell &c : n.luts) {
        out += ".names";
        for (int s : c.inputs)
            out += " " + n.signals[s];
        out += " " + n.signals[c.output] + "\n";
        const size_t k = c.inputs.size();
        for (size_t row = 0; row < c.table.size(); ++row) {
            if (!c.table[row])
                continue;
            for (size_t i = 0; i < k; ++i)
                out += static_cast<char>('0' + ((row >> (k - 1 - i)) & 1));
            out += k ? " 1\n" : "1\n";
        }
    }
    out += ".end\n";
    return out;
}

} // namespace fabric3d
