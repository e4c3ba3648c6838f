#pragma once

#include <cstdint>

#include "nipol/core.hpp"

namespace nipol {

// Parses the line-oriented ".nipol" format and validates the result.
// Grammar (one declaration per line, '#' starts a comment, section order
// free):
//   agents NAME+
//   action NAME AGENT
//   state NAME [init]
//   step FROM ACTION TO
//   obs STATE AGENT LABEL
//   edge STATE SOURCE TARGET
// Returns nothing when any error diagnostic was produced.
std::optional<System> parse(std::string_view text, std::vector<Diagnostic>& diags);

// Canonical text form: sections in the order agents/action/state/step/obs/
// edge, declaration order within each, defaults (self-loop steps, "0"
// observations, reflexive policy edges) omitted, LF line endings.
// parse(serialize(sys)) reproduces sys exactly.
std::string serialize(const System& sys);

// Graphviz export: one HTML-table node per state showing the state name,
// per-agent observations and the non-reflexive local policy edges; policy
// edges listed in `faded` render gray italic with a "(useless)" tag.
// Transitions with equal endpoints merge into one edge with a comma-joined
// action label; self-loops are omitted.
std::string to_dot(const System& sys, const std::vector<PolicyEdge>& faded = {});

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

}  // namespace nipol
