#include "shellgraph/graph_render.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dot_lexer.hpp"
#include "json.hpp"

namespace shellgraph {

namespace {

// UTF-8 multiplication sign for red-node count badges: "(x2)".
constexpr const char* kTimes = "\xC3\x97";

std::string red_node_id(const RedNode& r) {
    return "__unmatched_" + std::to_string(r.first_seq);
}

std::string seq_list(const std::vector<EdgeTraversal>& traversals) {
    std::string out;
    for (size_t i = 0; i < traversals.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(traversals[i].seq);
    }
    return out;
}

const std::string& status_fill(const Palette& palette, StateStatus status) {
    switch (status) {
        case StateStatus::ReachedOk:
            return palette.ok_color;
        case StateStatus::ReachedMissingPrereq:
            return palette.warn_color;
        default:
            return palette.neutral_color;
    }
}

}  // namespace

Palette default_palette() {
    return {"default", "green", "yellow", "red", "lightgray"};
}

Palette colorblind_palette() {
    return {"colorblind", "blue", "orange", "gray", "lightgray"};
}

std::optional<Palette> palette_by_id(std::string_view id) {
    if (id == "default") return default_palette();
    if (id == "colorblind") return colorblind_palette();
    return std::nullopt;
}

std::string emit_trainee_dot(const TraineeGraph& tg, const Palette& palette,
                             std::optional<int> split) {
    const ReferenceGraph& g = *tg.base;

    // One node statement per state (declaration order), then per red node
    // (first_seq order, which is creation order).
    struct NodeStmt {
        std::string text;
        bool visited;
    };
    std::vector<NodeStmt> nodes;
    nodes.reserve(g.states.size() + tg.extra_nodes.size());

    for (const State& s : g.states) {
        StateStatus status = tg.state_status.at(s.id);
        std::string stmt = dot::quote(s.id) + " [label=" +
                           dot::quote(s.label.empty() ? s.id : s.label) +
                           ", style=\"filled\", fillcolor=" +
                           dot::quote(status_fill(palette, status));
        if (s.id == g.start_state) stmt += ", penwidth=\"2\"";
        stmt += "];";
        nodes.push_back({std::move(stmt), status != StateStatus::Unvisited});
    }
    for (const RedNode& r : tg.extra_nodes) {
        std::string label = r.text;
        if (r.count > 1)
            label += " (" + std::string(kTimes) + std::to_string(r.count) + ")";
        std::string stmt = dot::quote(red_node_id(r)) + " [label=" +
                           dot::quote(label) +
                           ", shape=\"box\", style=\"filled\", fillcolor=" +
                           dot::quote(palette.error_color) + "];";
        nodes.push_back({std::move(stmt), true});
    }

    std::string out = "digraph trainee {\n";
    if (split && *split > 0) {
        // Consecutive clusters of at most `split` visited elements; unvisited
        // states ride along with their neighbors in declaration order.
        int cluster = 0;
        int in_cluster = 0;
        bool open = false;
        for (const NodeStmt& node : nodes) {
            if (!open) {
                out += "  subgraph cluster_" + std::to_string(cluster) +
                       " {\n    label=\"section " +
                       std::to_string(cluster + 1) + "\";\n";
                open = true;
            }
            out += "    " + node.text + "\n";
            if (node.visited && ++in_cluster >= *split) {
                out += "  }\n";
                open = false;
                in_cluster = 0;
                ++cluster;
            }
        }
        if (open) out += "  }\n";
    } else {
        for (const NodeStmt& node : nodes) out += "  " + node.text + "\n";
    }

    for (size_t i = 0; i < g.edges.size(); ++i) {
        const PatternEdge& e = g.edges[i];
        const std::vector<EdgeTraversal>& traversals = tg.edge_annotations[i];
        bool any_ok = std::any_of(traversals.begin(), traversals.end(),
                                  [](const EdgeTraversal& t) { return t.ok; });
        const std::string& color = traversals.empty()
                                       ? palette.neutral_color
                                       : (any_ok ? palette.ok_color
                                                 : palette.warn_color);
        std::string label = e.pattern;
        if (!traversals.empty()) label += " (" + seq_list(traversals) + ")";
        out += "  " + dot::quote(e.from) + " -> " + dot::quote(e.to) +
               " [label=" + dot::quote(label) + ", color=" +
               dot::quote(color) + "];\n";
    }
    for (const RedNode& r : tg.extra_nodes) {
        out += "  " + dot::quote(r.attach_point) + " -> " +
               dot::quote(red_node_id(r)) + " [color=" +
               dot::quote(palette.error_color) + ", style=\"dashed\"];\n";
    }
    out += "}\n";
    return out;
}

std::string emit_milestone_dot(const MilestoneGraph& mg,
                               const Palette& palette) {
    const MilestoneSpec& spec = *mg.spec;
    std::string out = "digraph milestone {\n";

    // Attempts grouped per milestone, already in ENTRY order within the
    // trace; regrouping keeps that order.
    std::vector<std::vector<const AttemptNode*>> per_milestone(
        spec.milestones.size());
    for (const AttemptNode& a : mg.attempts)
        per_milestone[static_cast<size_t>(a.milestone_index)].push_back(&a);

    auto template_id = [](int i) { return "m" + std::to_string(i); };
    auto attempt_id = [](const AttemptNode& a) {
        return "m" + std::to_string(a.milestone_index) + "_e" +
               std::to_string(a.entry);
    };
    auto summary_id = [](int i) { return "m" + std::to_string(i) + "_sum"; };

    for (const Milestone& m : spec.milestones) {
        const MilestoneSummary& summary =
            mg.summaries[static_cast<size_t>(m.index)];
        const std::string& template_fill = summary.attempt_count == 0
                                               ? palette.error_color
                                               : palette.neutral_color;
        out += "  " + dot::quote(template_id(m.index)) + " [label=" +
               dot::quote(m.description.empty() ? m.name : m.description) +
               ", shape=\"box\", style=\"filled\", fillcolor=" +
               dot::quote(template_fill) + "];\n";
        for (const AttemptNode* a : per_milestone[static_cast<size_t>(m.index)]) {
            out += "  " + dot::quote(attempt_id(*a)) + " [label=" +
                   dot::quote("ENTRY " + std::to_string(a->entry) + ": " +
                              a->command_text) +
                   ", style=\"filled\", fillcolor=" +
                   dot::quote(a->success ? palette.ok_color
                                         : palette.warn_color) +
                   "];\n";
        }
        std::string verdict = summary.achieved ? "ACHIEVED" : "NOT ACHIEVED";
        out += "  " + dot::quote(summary_id(m.index)) + " [label=" +
               dot::quote(verdict + " (" +
                          std::to_string(summary.attempt_count) +
                          " attempts)") +
               ", shape=\"box\", style=\"filled,rounded\", fillcolor=" +
               dot::quote(summary.achieved ? palette.ok_color
                                           : palette.error_color) +
               "];\n";
    }

    for (size_t i = 0; i + 1 < spec.milestones.size(); ++i) {
        out += "  " + dot::quote(template_id(static_cast<int>(i))) + " -> " +
               dot::quote(template_id(static_cast<int>(i) + 1)) +
               " [style=\"bold\"];\n";
    }
    for (const Milestone& m : spec.milestones) {
        std::string prev = template_id(m.index);
        for (const AttemptNode* a : per_milestone[static_cast<size_t>(m.index)]) {
            out += "  " + dot::quote(prev) + " -> " +
                   dot::quote(attempt_id(*a)) + ";\n";
            prev = attempt_id(*a);
        }
        out += "  " + dot::quote(prev) + " -> " +
               dot::quote(summary_id(m.index)) + ";\n";
    }
    out += "}\n";
    return out;
}

bool is_valid_dot(std::string_view text, std::string* error) {
    if (auto d = dot::check_structure(text)) {
        if (error) *error = format_diagnostic(*d);
        return false;
    }
    return true;
}

StudentSummary make_student_summary(const TraineeGraph* tg,
                                    const MilestoneGraph* mg) {
    if (!tg && !mg)
        throw std::invalid_argument("at least one graph is required");
    if (tg && mg && tg->student_id != mg->student_id)
        throw std::invalid_argument("MismatchedStudent: '" + tg->student_id +
                                    "' vs '" + mg->student_id + "'");

    StudentSummary s;
    s.student_id = tg ? tg->student_id : mg->student_id;
    s.total_events = tg ? tg->total_events : mg->total_events;
    if (tg) {
        s.has_trainee = true;
        s.green_events = green_events(*tg);
        s.yellow_events = yellow_events(*tg);
        s.red_events = red_events(*tg);
        std::map<std::string, int> by_text;
        for (const RedNode& r : tg->extra_nodes) by_text[r.text] += r.count;
        s.red_commands.assign(by_text.begin(), by_text.end());
        std::sort(s.red_commands.begin(), s.red_commands.end(),
                  [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                  });
    }
    if (mg) {
        s.has_milestones = true;
        for (size_t i = 0; i < mg->spec->milestones.size(); ++i) {
            s.milestones.push_back({mg->spec->milestones[i].name,
                                    mg->summaries[i].achieved,
                                    mg->summaries[i].attempt_count});
        }
    }
    return s;
}

std::string emit_summary_json(const StudentSummary& s) {
    nlohmann::ordered_json root;
    root["student"] = s.student_id;
    root["total_events"] = s.total_events;
    if (s.has_trainee) {
        nlohmann::ordered_json trainee;
        trainee["green"] = s.green_events;
        trainee["yellow"] = s.yellow_events;
        trainee["red"] = s.red_events;
        trainee["red_commands"] = nlohmann::ordered_json::array();
        for (const auto& [command, count] : s.red_commands) {
            trainee["red_commands"].push_back(
                {{"command", command}, {"count", count}});
        }
        root["trainee"] = std::move(trainee);
    }
    if (s.has_milestones) {
        root["milestones"] = nlohmann::ordered_json::array();
        for (const MilestoneOutcome& m : s.milestones) {
            root["milestones"].push_back({{"name", m.name},
                                          {"achieved", m.achieved},
                                          {"attempt_count", m.attempt_count}});
        }
    }
    return root.dump(2) + "\n";
}

SummaryParseResult parse_summary_json(std::string_view text) {
    SummaryParseResult result;
    auto fail = [&](std::string message) {
        result.diagnostics.push_back(Diagnostic{
            Severity::Error, "MalformedSummary", std::move(message), 0, ""});
    };

    nlohmann::json root = nlohmann::json::parse(text, nullptr, false);
    if (root.is_discarded() || !root.is_object()) {
        fail("summary is not a valid object");
        return result;
    }
    StudentSummary s;
    if (auto it = root.find("student"); it != root.end() && it->is_string()) {
        s.student_id = it->get<std::string>();
    } else {
        fail("missing 'student'");
        return result;
    }
    if (auto it = root.find("total_events");
        it != root.end() && it->is_number_integer()) {
        s.total_events = it->get<int>();
    } else {
        fail("missing 'total_events'");
        return result;
    }
    if (auto it = root.find("trainee"); it != root.end()) {
        if (!it->is_object()) {
            fail("'trainee' must be an object");
            return result;
        }
        s.has_trainee = true;
        const auto& t = *it;
        if (!t.contains("green") || !t.contains("yellow") ||
            !t.contains("red")) {
            fail("'trainee' needs green/yellow/red counts");
            return result;
        }
        s.green_events = t["green"].get<int>();
        s.yellow_events = t["yellow"].get<int>();
        s.red_events = t["red"].get<int>();
        if (auto rc = t.find("red_commands");
            rc != t.end() && rc->is_array()) {
            for (const auto& entry : *rc) {
                if (!entry.is_object() || !entry.contains("command") ||
                    !entry.contains("count")) {
                    fail("malformed 'red_commands' entry");
                    return result;
                }
                s.red_commands.emplace_back(
                    entry["command"].get<std::string>(),
                    entry["count"].get<int>());
            }
        }
    }
    if (auto it = root.find("milestones"); it != root.end()) {
        if (!it->is_array()) {
            fail("'milestones' must be a list");
            return result;
        }
        s.has_milestones = true;
        for (const auto& entry : *it) {
            if (!entry.is_object() || !entry.contains("name") ||
                !entry.contains("achieved") ||
                !entry.contains("attempt_count")) {
                fail("malformed 'milestones' entry");
                return result;
            }
            s.milestones.push_back({entry["name"].get<std::string>(),
                                    entry["achieved"].get<bool>(),
                                    entry["attempt_count"].get<int>()});
        }
    }
    result.summary = std::move(s);
    return result;
}

}  // namespace shellgraph
