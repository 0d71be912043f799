#include "shellgraph/milestone_model.hpp"

#include <set>

#include "json.hpp"

namespace shellgraph {

namespace {

using nlohmann::json;

Diagnostic spec_error(std::string code, std::string message) {
    return Diagnostic{Severity::Error, std::move(code), std::move(message), 0,
                      ""};
}

bool compile_list(const std::vector<std::string>& patterns,
                  std::vector<std::regex>& out, const std::string& milestone,
                  std::vector<Diagnostic>& diags) {
    bool ok = true;
    for (const std::string& p : patterns) {
        try {
            out.emplace_back(p, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            diags.push_back(spec_error(
                "BadRegex", "milestone '" + milestone + "': regex '" + p +
                                "' does not compile: " + e.what()));
            ok = false;
        }
    }
    return ok;
}

bool all_match(const std::vector<std::regex>& res, const std::string& text) {
    for (const std::regex& re : res)
        if (!std::regex_search(text, re)) return false;
    return true;
}

}  // namespace

MilestoneSpecResult parse_milestone_spec(std::string_view text) {
    MilestoneSpecResult result;
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded() || !root.is_object()) {
        result.diagnostics.push_back(
            spec_error("SpecSyntaxError", "spec is not a valid object"));
        return result;
    }

    MilestoneSpec spec;
    if (auto it = root.find("exercise"); it != root.end() && it->is_string()) {
        spec.exercise_id = it->get<std::string>();
    } else {
        result.diagnostics.push_back(spec_error(
            "SpecSyntaxError", "missing top-level 'exercise' string"));
    }
    auto milestones_it = root.find("milestones");
    if (milestones_it == root.end() || !milestones_it->is_array()) {
        result.diagnostics.push_back(spec_error(
            "SpecSyntaxError", "missing top-level 'milestones' list"));
        return result;
    }

    std::set<std::string> names;
    int index = 0;
    for (const json& entry : *milestones_it) {
        std::string where = "milestones[" + std::to_string(index) + "]";
        if (!entry.is_object()) {
            result.diagnostics.push_back(
                spec_error("SpecSyntaxError", where + " is not an object"));
            ++index;
            continue;
        }
        Milestone m;
        m.index = index++;
        if (auto it = entry.find("name"); it != entry.end() && it->is_string() &&
                                          !it->get<std::string>().empty()) {
            m.name = it->get<std::string>();
        } else {
            result.diagnostics.push_back(spec_error(
                "SpecSyntaxError", where + " has no non-empty 'name'"));
            continue;
        }
        if (!names.insert(m.name).second) {
            result.diagnostics.push_back(spec_error(
                "DuplicateMilestoneName",
                "milestone name '" + m.name + "' is used more than once"));
        }
        if (auto it = entry.find("description");
            it != entry.end() && it->is_string()) {
            m.description = it->get<std::string>();
        } else {
            result.diagnostics.push_back(spec_error(
                "SpecSyntaxError",
                "milestone '" + m.name + "' has no 'description' string"));
        }
        auto input_it = entry.find("input");
        if (input_it == entry.end() || !input_it->is_array() ||
            input_it->empty()) {
            result.diagnostics.push_back(spec_error(
                "SpecSyntaxError", "milestone '" + m.name +
                                       "' needs a non-empty 'input' list"));
            continue;
        }
        bool strings_ok = true;
        for (const json& p : *input_it) {
            if (!p.is_string()) {
                result.diagnostics.push_back(spec_error(
                    "SpecSyntaxError", "milestone '" + m.name +
                                           "': 'input' entries must be "
                                           "regex strings"));
                strings_ok = false;
                break;
            }
            m.input_patterns.push_back(p.get<std::string>());
        }
        if (auto it = entry.find("output"); it != entry.end()) {
            if (!it->is_array()) {
                result.diagnostics.push_back(spec_error(
                    "SpecSyntaxError", "milestone '" + m.name +
                                           "': 'output' must be a list"));
                strings_ok = false;
            } else {
                for (const json& p : *it) {
                    if (!p.is_string()) {
                        result.diagnostics.push_back(spec_error(
                            "SpecSyntaxError",
                            "milestone '" + m.name +
                                "': 'output' entries must be regex strings"));
                        strings_ok = false;
                        break;
                    }
                    m.output_patterns.push_back(p.get<std::string>());
                }
            }
        }
        if (!strings_ok) continue;
        bool compiled = compile_list(m.input_patterns, m.input_res, m.name,
                                     result.diagnostics);
        compiled &= compile_list(m.output_patterns, m.output_res, m.name,
                                 result.diagnostics);
        if (compiled) spec.milestones.push_back(std::move(m));
    }

    // Keep indexes contiguous when earlier entries were dropped for errors.
    for (size_t i = 0; i < spec.milestones.size(); ++i)
        spec.milestones[i].index = static_cast<int>(i);

    if (!has_errors(result.diagnostics)) result.spec = std::move(spec);
    return result;
}

std::string emit_milestone_spec(const MilestoneSpec& spec) {
    nlohmann::ordered_json root;
    root["exercise"] = spec.exercise_id;
    root["milestones"] = nlohmann::ordered_json::array();
    for (const Milestone& m : spec.milestones) {
        nlohmann::ordered_json entry;
        entry["name"] = m.name;
        entry["description"] = m.description;
        entry["input"] = m.input_patterns;
        if (!m.output_patterns.empty()) entry["output"] = m.output_patterns;
        root["milestones"].push_back(std::move(entry));
    }
    return root.dump(2) + "\n";
}

Classification classify_line(const CommandEvent& event,
                             const MilestoneSpec& spec) {
    // Full matches win across all milestones before any similarity is
    // considered; both passes take the earliest milestone.
    for (const Milestone& m : spec.milestones) {
        if (!all_match(m.input_res, event.input_line)) continue;
        if (!m.output_res.empty()) {
            if (!event.output_text) continue;
            if (!all_match(m.output_res, *event.output_text)) continue;
        }
        return {LineClass::Success, m.index};
    }
    for (const Milestone& m : spec.milestones) {
        if (std::regex_search(event.input_line, m.input_res.front()))
            return {LineClass::Attempt, m.index};
    }
    return {LineClass::NoMatch, -1};
}

MilestoneGraph build_milestone_graph(const SessionTrace& trace,
                                     const MilestoneSpec& spec) {
    MilestoneGraph mg;
    mg.spec = &spec;
    mg.student_id = trace.student_id;
    mg.total_events = static_cast<int>(trace.events.size());
    mg.summaries.resize(spec.milestones.size());

    for (const CommandEvent& event : trace.events) {
        Classification c = classify_line(event, spec);
        if (c.kind == LineClass::NoMatch) continue;
        bool success = c.kind == LineClass::Success;
        mg.attempts.push_back(
            {c.milestone_index, event.seq, event.input_line, success});
        MilestoneSummary& summary =
            mg.summaries[static_cast<size_t>(c.milestone_index)];
        ++summary.attempt_count;
        summary.achieved = summary.achieved || success;
    }
    return mg;
}

}  // namespace shellgraph
