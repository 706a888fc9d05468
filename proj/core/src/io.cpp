#include "dynagree/io.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include "dynagree/errors.hpp"

namespace dynagree {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw ConfigError("edge list, line " + std::to_string(line) + ": " + what);
}

int parse_int(std::string_view tok, int line) {
    int v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        parse_fail(line, "expected an integer, got '" + std::string(tok) + "'");
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<CommGraph> read_edge_lists(std::string_view text) {
    std::vector<CommGraph> graphs;
    int n = -1;
    bool in_record = false;
    Digraph current(1);

    auto flush = [&](int line) {
        if (!in_record) return;
        try {
            graphs.emplace_back(std::move(current));
        } catch (const ValidationError& e) {
            parse_fail(line, e.what());
        }
        in_record = false;
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = trim(text.substr(pos, eol - pos));
        const bool at_end = eol == text.size();
        pos = eol + 1;
        ++line_no;

        if (line.empty() || line.front() == '#') {
            flush(line_no);
            if (at_end) break;
            continue;
        }
        if (line.rfind("n=", 0) == 0) {
            if (n != -1) parse_fail(line_no, "duplicate n= header");
            n = parse_int(line.substr(2), line_no);
            if (n < 1) parse_fail(line_no, "n must be >= 1");
            if (at_end) break;
            continue;
        }
        if (n == -1) parse_fail(line_no, "edges before the n= header");
        const std::size_t sp = line.find(' ');
        if (sp == std::string_view::npos) parse_fail(line_no, "expected 'p q'");
        const int p = parse_int(trim(line.substr(0, sp)), line_no);
        const int q = parse_int(trim(line.substr(sp + 1)), line_no);
        if (p < 1 || p > n || q < 1 || q > n)
            parse_fail(line_no, "process out of range [1, " + std::to_string(n) + "]");
        if (!in_record) {
            current = Digraph::self_loops(n);
            in_record = true;
        }
        current.add_edge(p - 1, q - 1);
        if (at_end) break;
    }
    flush(line_no + 1);
    if (n == -1) throw ConfigError("edge list: missing n= header");
    if (graphs.empty()) throw ConfigError("edge list: no graphs");
    return graphs;
}

std::string write_edge_lists(std::span<const CommGraph> graphs) {
    if (graphs.empty()) throw DomainError("write_edge_lists: nothing to write");
    std::ostringstream os;
    os << "n=" << graphs.front().node_count() << "\n";
    bool first = true;
    for (const CommGraph& g : graphs) {
        if (!first) os << "\n";
        first = false;
        bool wrote = false;
        for (auto [p, q] : g.graph().edges())
            if (p != q) {
                os << p + 1 << " " << q + 1 << "\n";
                wrote = true;
            }
        // a graph with no off-diagonal links still needs a non-empty record;
        // a self-loop line is harmless since loading adds them anyway
        if (!wrote) os << "1 1\n";
    }
    return os.str();
}

void write_trace_csv(std::ostream& os, const ExecutionTrace& trace) {
    os << "round,process,value\n";
    for (int k = 0; k <= trace.rounds(); ++k)
        for (Process p = 0; p < trace.n(); ++p)
            os << k << ',' << p + 1 << ',' << format_double(trace.x[k][p]) << '\n';
}

void write_summary_csv(std::ostream& os, const ExecutionTrace& trace) {
    os << "round,delta\n";
    for (int k = 0; k <= trace.rounds(); ++k)
        os << k << ',' << format_double(trace.delta_history[k]) << '\n';
}

}  // namespace dynagree
