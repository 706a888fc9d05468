#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynagree/digraph.hpp"
#include "dynagree/engine.hpp"

namespace dynagree {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Edge-list file: a header line `n=<int>`, then one `p q` pair per line
/// (1-based), one graph per blank-line-separated record. Self-loops are
/// implicit and added on load; writing emits off-diagonal links only.
/// Parse errors report 1-based line numbers.
std::vector<CommGraph> read_edge_lists(std::string_view text);
std::string write_edge_lists(std::span<const CommGraph> graphs);

/// Full trace: header `round,process,value`, one row per (round, process),
/// processes 1-based.
void write_trace_csv(std::ostream& os, const ExecutionTrace& trace);

/// Summary: header `round,delta`.
void write_summary_csv(std::ostream& os, const ExecutionTrace& trace);

}  // namespace dynagree
