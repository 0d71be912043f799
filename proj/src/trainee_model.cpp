#include "shellgraph/trainee_model.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace shellgraph {

namespace {

// Collapses whitespace runs to single spaces and trims; used to deduplicate
// near-identical unmatched commands.
std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += c;
    }
    return out;
}

bool prerequisites_met(const ReferenceGraph& g, const std::string& target,
                       const std::set<std::string>& reached) {
    const State* state = g.find_state(target);
    if (!state) return true;
    return std::all_of(state->prerequisites.begin(),
                       state->prerequisites.end(),
                       [&](const std::string& p) { return reached.count(p); });
}

}  // namespace

MatchOutcome match_command(const CommandEvent& event, const ReferenceGraph& g,
                           const std::set<std::string>& reached) {
    int first_candidate = -1;
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const PatternEdge& e = g.edges[i];
        if (!std::regex_search(event.input_line, e.compiled)) continue;
        if (first_candidate < 0) first_candidate = static_cast<int>(i);
        // Edges are stored in declaration order, so the first candidate with
        // satisfied prerequisites is the lowest-index one.
        if (prerequisites_met(g, e.to, reached))
            return {MatchKind::Ok, static_cast<int>(i), {}};
    }
    if (first_candidate < 0) return {MatchKind::Unmatched, -1, {}};

    const PatternEdge& chosen = g.edges[static_cast<size_t>(first_candidate)];
    std::vector<std::string> missing;
    if (const State* target = g.find_state(chosen.to)) {
        for (const std::string& p : target->prerequisites)
            if (!reached.count(p)) missing.push_back(p);
    }
    std::sort(missing.begin(), missing.end());
    return {MatchKind::MissingPrereq, first_candidate, std::move(missing)};
}

TraineeGraph build_trainee_graph(const SessionTrace& trace,
                                 const ReferenceGraph& g) {
    TraineeGraph tg;
    tg.base = &g;
    tg.student_id = trace.student_id;
    tg.total_events = static_cast<int>(trace.events.size());
    tg.edge_annotations.resize(g.edges.size());
    for (const State& s : g.states) tg.state_status[s.id] = StateStatus::Unvisited;

    std::set<std::string> reached{g.start_state};
    std::string anchor = g.start_state;
    std::map<std::pair<std::string, std::string>, size_t> red_index;

    for (const CommandEvent& event : trace.events) {
        MatchOutcome outcome = match_command(event, g, reached);
        switch (outcome.kind) {
            case MatchKind::Ok: {
                const PatternEdge& e =
                    g.edges[static_cast<size_t>(outcome.edge_index)];
                tg.edge_annotations[static_cast<size_t>(outcome.edge_index)]
                    .push_back({event.seq, true});
                tg.state_status[e.to] = StateStatus::ReachedOk;
                reached.insert(e.to);
                anchor = e.to;
                break;
            }
            case MatchKind::MissingPrereq: {
                const PatternEdge& e =
                    g.edges[static_cast<size_t>(outcome.edge_index)];
                tg.edge_annotations[static_cast<size_t>(outcome.edge_index)]
                    .push_back({event.seq, false});
                // Yellow progress still counts as progress, but a state that
                // was already reached cleanly keeps its green status.
                if (tg.state_status[e.to] != StateStatus::ReachedOk)
                    tg.state_status[e.to] = StateStatus::ReachedMissingPrereq;
                reached.insert(e.to);
                anchor = e.to;
                break;
            }
            case MatchKind::Unmatched: {
                std::string key = normalize_whitespace(event.input_line);
                auto [it, inserted] =
                    red_index.try_emplace({key, anchor}, tg.extra_nodes.size());
                if (inserted)
                    tg.extra_nodes.push_back({key, 0, anchor, event.seq});
                ++tg.extra_nodes[it->second].count;
                break;
            }
        }
    }
    return tg;
}

int green_events(const TraineeGraph& tg) {
    int n = 0;
    for (const auto& annotations : tg.edge_annotations)
        for (const EdgeTraversal& t : annotations) n += t.ok ? 1 : 0;
    return n;
}

int yellow_events(const TraineeGraph& tg) {
    int n = 0;
    for (const auto& annotations : tg.edge_annotations)
        for (const EdgeTraversal& t : annotations) n += t.ok ? 0 : 1;
    return n;
}

int red_events(const TraineeGraph& tg) {
    int n = 0;
    for (const RedNode& r : tg.extra_nodes) n += r.count;
    return n;
}

}  // namespace shellgraph
