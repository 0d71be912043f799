#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "shellgraph/diagnostics.hpp"
#include "shellgraph/log_ingest.hpp"

namespace shellgraph {

// One ordered task subgoal. A line succeeds on the milestone when every
// input regex matches the command and every output regex matches the
// captured output (a milestone with output regexes cannot succeed on an
// event that has no output). The first input regex doubles as the
// similarity anchor for unsuccessful attempts.
struct Milestone {
    int index = 0;
    std::string name;
    std::string description;
    std::vector<std::string> input_patterns;
    std::vector<std::string> output_patterns;
    std::vector<std::regex> input_res;
    std::vector<std::regex> output_res;
};

struct MilestoneSpec {
    std::string exercise_id;
    std::vector<Milestone> milestones;
};

struct MilestoneSpecResult {
    std::optional<MilestoneSpec> spec;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return spec.has_value(); }
};

// Milestone spec file: JSON with a top-level `exercise` string and an
// ordered `milestones` list; each entry has `name`, `description`,
// `input` (non-empty list of regex strings) and optional `output`.
MilestoneSpecResult parse_milestone_spec(std::string_view text);
std::string emit_milestone_spec(const MilestoneSpec& spec);

enum class LineClass { Success, Attempt, NoMatch };

struct Classification {
    LineClass kind = LineClass::NoMatch;
    int milestone_index = -1;
    bool operator==(const Classification&) const = default;
};

// Stateless per-line rule: the lowest-index fully matching milestone wins;
// failing that, the lowest-index milestone whose first input regex matches
// takes the line as an unsuccessful attempt; otherwise the line is hidden.
// Successes take precedence over attempts across all milestones.
Classification classify_line(const CommandEvent& event,
                             const MilestoneSpec& spec);

struct AttemptNode {
    int milestone_index = 0;
    int entry = 0;  // the event's seq, shown as "ENTRY n"
    std::string command_text;
    bool success = false;
    bool operator==(const AttemptNode&) const = default;
};

struct MilestoneSummary {
    bool achieved = false;
    int attempt_count = 0;
    bool operator==(const MilestoneSummary&) const = default;
};

struct MilestoneGraph {
    const MilestoneSpec* spec = nullptr;  // must outlive the graph
    std::string student_id;
    int total_events = 0;
    std::vector<AttemptNode> attempts;  // trace order
    std::vector<MilestoneSummary> summaries;  // one per milestone
    std::string palette_id = "default";
};

MilestoneGraph build_milestone_graph(const SessionTrace& trace,
                                     const MilestoneSpec& spec);

}  // namespace shellgraph
