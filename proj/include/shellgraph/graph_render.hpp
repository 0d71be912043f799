#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shellgraph/milestone_model.hpp"
#include "shellgraph/trainee_model.hpp"

namespace shellgraph {

// Status colors for emitted DOT. Node borders are black everywhere, so the
// colorblind palette's gray error fill reads as black-bordered gray.
struct Palette {
    std::string id;
    std::string ok_color;
    std::string warn_color;
    std::string error_color;
    std::string neutral_color;
};

Palette default_palette();     // green / yellow / red
Palette colorblind_palette();  // blue / orange / gray
std::optional<Palette> palette_by_id(std::string_view id);

// Emits the full annotated reference graph: every state and edge, colored by
// status, plus box-shaped red nodes for unmatched commands with "(xN)" count
// badges. Node order is states by declaration then red nodes by first_seq.
// With `split`, node statements are wrapped into consecutive subgraph
// clusters of at most `split` visited elements each.
std::string emit_trainee_dot(const TraineeGraph& tg, const Palette& palette,
                             std::optional<int> split = std::nullopt);

// Emits the milestone chain: template nodes in author order, attempt nodes
// chained under their template in ENTRY order, and a summary node appended
// per milestone.
std::string emit_milestone_dot(const MilestoneGraph& mg,
                               const Palette& palette);

// Checks that text is syntactically valid DOT (digraph, statements, attr
// lists, optional subgraph blocks). Used to keep every emitter honest.
bool is_valid_dot(std::string_view text, std::string* error = nullptr);

struct MilestoneOutcome {
    std::string name;
    bool achieved = false;
    int attempt_count = 0;
    bool operator==(const MilestoneOutcome&) const = default;
};

// Per-student counts for the class-level view. The red command ranking is
// carried along so a class report can be rebuilt from summaries alone.
struct StudentSummary {
    std::string student_id;
    int total_events = 0;
    bool has_trainee = false;
    int green_events = 0;
    int yellow_events = 0;
    int red_events = 0;
    std::vector<std::pair<std::string, int>> red_commands;  // ranked
    bool has_milestones = false;
    std::vector<MilestoneOutcome> milestones;

    bool operator==(const StudentSummary&) const = default;
};

// Either graph may be null, not both. Throws std::invalid_argument
// ("MismatchedStudent") when the two graphs carry different student ids.
StudentSummary make_student_summary(const TraineeGraph* tg,
                                    const MilestoneGraph* mg);

std::string emit_summary_json(const StudentSummary& s);

struct SummaryParseResult {
    std::optional<StudentSummary> summary;
    std::vector<Diagnostic> diagnostics;
};

SummaryParseResult parse_summary_json(std::string_view text);

}  // namespace shellgraph
