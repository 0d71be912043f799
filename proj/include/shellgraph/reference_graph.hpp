#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "shellgraph/diagnostics.hpp"

namespace shellgraph {

// An exercise subgoal. States with an empty prerequisite set are reachable
// independently; prerequisites model a required sequence of actions.
struct State {
    std::string id;
    std::string label;
    std::vector<std::string> prerequisites;

    bool operator==(const State&) const = default;
};

// A command pattern between two states. `pattern` is the regex source text;
// matching means the regex finds a match anywhere in the input line unless
// the author anchors it. `declaration_index` is the 0-based order of
// appearance among edges and drives deterministic tie-breaking.
struct PatternEdge {
    std::string from;
    std::string to;
    std::string pattern;
    int declaration_index = 0;
    std::regex compiled;

    bool same_shape(const PatternEdge& o) const {
        return from == o.from && to == o.to && pattern == o.pattern &&
               declaration_index == o.declaration_index;
    }
};

// Instructor-authored solution graph, immutable after parse.
struct ReferenceGraph {
    std::vector<State> states;  // declaration order
    std::vector<PatternEdge> edges;  // declaration order
    std::string start_state;

    const State* find_state(std::string_view id) const;
    int state_index(std::string_view id) const;  // -1 when absent
};

bool same_graph(const ReferenceGraph& a, const ReferenceGraph& b);

struct ReferenceGraphResult {
    std::optional<ReferenceGraph> graph;  // set iff no error diagnostics
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return graph.has_value(); }
};

// Parses the reference-graph DOT subset: a digraph of node and edge
// statements with quoted attribute lists. Node attributes: `label`,
// `prereq` (comma-separated state ids), `start` ("true" on at most one
// node; defaults to the first declared node). Edge attribute: `pattern`
// (required). Subgraphs, ports, HTML labels, and default-attribute
// statements are rejected.
ReferenceGraphResult parse_reference_dot(std::string_view text);

// Canonical DOT form; parse_reference_dot(emit_reference_dot(g)) == g.
std::string emit_reference_dot(const ReferenceGraph& g);

// Structural diagnostics: states unreachable from the start by edges alone,
// prerequisite cycles, duplicate (from, to, pattern) edges, and patterns
// that match the empty string (warning). Empty result means clean.
std::vector<Diagnostic> validate(const ReferenceGraph& g);

}  // namespace shellgraph
