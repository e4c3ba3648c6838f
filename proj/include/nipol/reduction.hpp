#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nipol/core.hpp"

namespace nipol {

struct Graph {
    std::vector<std::string> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // vertex index pairs
};

// Text format: one "vertex NAME" or "edge NAME NAME" per line, '#' starts a
// comment. Self-loops and undeclared endpoints are errors; a repeated edge
// is a warning and is stored once.
std::optional<Graph> parse_graph(const std::string& text, std::vector<Diagnostic>& diagnostics);

// Builds a system that is insecure under source-aware information flow
// exactly when g is 3-colorable. One color-choice gadget per vertex and one
// color-difference gadget per edge are chained twice: once behind a hidden
// action h and once, with an everything-goes policy, in front of it; only
// the far end of the second chain shows agent L the label "1".
System generate_3col_system(const Graph& g);

// True when sys is byte-for-byte something generate_3col_system produces.
bool is_reduction_instance(const System& sys);

// Recovers the encoded graph from a generated system; empty for foreign input.
std::optional<Graph> decode_reduction_instance(const System& sys);

struct HidingPathResult {
    bool found = false;
    ActionSeq path;                     // run after the hidden action, from its target state
    std::vector<std::size_t> coloring;  // color per vertex when found
    Stats stats;
};

// Searches a generated system for a run that keeps the initial hidden
// action unknown to L yet reaches the end of the first chain. Such a run
// exists exactly when the encoded graph is 3-colorable, and its gadget
// choices spell out a valid coloring. Throws
// AnalysisError(ErrorKind::NotAReductionInstance) for foreign systems.
HidingPathResult has_hiding_path(const System& sys);

// Direct backtracking search; throws AnalysisError(ErrorKind::TooLarge)
// above 20 vertices.
std::optional<std::vector<std::size_t>> brute_force_3coloring(const Graph& g);

}  // namespace nipol
