#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "shellgraph/log_ingest.hpp"
#include "shellgraph/reference_graph.hpp"

namespace shellgraph {

enum class MatchKind { Ok, MissingPrereq, Unmatched };

struct MatchOutcome {
    MatchKind kind = MatchKind::Unmatched;
    int edge_index = -1;  // into ReferenceGraph::edges, -1 when Unmatched
    std::vector<std::string> missing;  // unmet prerequisite ids, sorted
};

// Classifies one command against the whole graph. Every edge is a candidate
// regardless of where the student currently is; among matching edges, one
// whose target's prerequisites are all reached wins (lowest declaration
// index), otherwise the lowest-declaration-index match is reported with its
// unmet prerequisites, otherwise the command is unmatched.
MatchOutcome match_command(const CommandEvent& event, const ReferenceGraph& g,
                           const std::set<std::string>& reached);

enum class StateStatus { Unvisited, ReachedOk, ReachedMissingPrereq };

struct EdgeTraversal {
    int seq = 0;
    bool ok = true;  // false for a missing-prerequisite traversal
    bool operator==(const EdgeTraversal&) const = default;
};

// One deduplicated unmatched command: same whitespace-collapsed text hanging
// off the same attach point counts up instead of adding nodes.
struct RedNode {
    std::string text;
    int count = 0;
    std::string attach_point;
    int first_seq = 0;
    bool operator==(const RedNode&) const = default;
};

struct TraineeGraph {
    const ReferenceGraph* base = nullptr;  // must outlive the trainee graph
    std::string student_id;
    int total_events = 0;
    std::map<std::string, StateStatus> state_status;  // one entry per state
    std::vector<std::vector<EdgeTraversal>> edge_annotations;  // per edge
    std::vector<RedNode> extra_nodes;  // ordered by first_seq
    std::string palette_id = "default";
};

// Folds match_command over the trace in seq order, starting from
// reached = {start}. Both green and yellow matches insert the target state
// into the reached set; a later green match upgrades a yellow state but
// never the other way around. Unmatched commands attach to the target of
// the most recent match (the start state before any match).
TraineeGraph build_trainee_graph(const SessionTrace& trace,
                                 const ReferenceGraph& g);

// Event counts by classification; green + yellow + red == total_events.
int green_events(const TraineeGraph& tg);
int yellow_events(const TraineeGraph& tg);
int red_events(const TraineeGraph& tg);

}  // namespace shellgraph
