#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shellgraph/diagnostics.hpp"

namespace shellgraph {

// One normalized student command. `seq` is the 1-based position within the
// student's trace; parsers assign it per student in file order and
// normalize() reassigns it after sorting. Timestamps are UTC epoch
// milliseconds; the history format has none.
struct CommandEvent {
    std::string student_id;
    int seq = 0;
    std::optional<int64_t> timestamp_ms;
    std::string input_line;
    std::optional<std::string> output_text;
    std::optional<std::string> host;

    bool operator==(const CommandEvent&) const = default;
};

// Chronologically ordered events of one student in one exercise.
struct SessionTrace {
    std::string student_id;
    std::string exercise_id;
    std::vector<CommandEvent> events;

    bool operator==(const SessionTrace&) const = default;
};

// Parsing never aborts: bad records become diagnostics and the good ones are
// returned alongside them.
struct ParseResult {
    std::vector<CommandEvent> events;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

// Structured log: UTF-8, one JSON object per line with required keys
// `student` and `cmd`, optional `ts` (ISO-8601 UTC), `host`, `output`.
// Unknown extra keys are ignored.
ParseResult parse_structured_log(std::string_view text);

// History log: per-student blocks introduced by `### student: <id>`, commands
// as `ENTRY <n>: <input_line>`, each optionally followed by an output block
// between `--- output` and `--- end`.
ParseResult parse_history_log(std::string_view text);

// Serializes events back to the structured log format. Re-parsing the result
// yields an equal event list.
std::string emit_structured_log(const std::vector<CommandEvent>& events);

// Groups events by student, orders each group by (timestamp, input order) --
// input order alone when any event of the group lacks a timestamp -- and
// reassigns seq 1..N. Traces come back sorted by student_id.
std::vector<SessionTrace> normalize(std::vector<CommandEvent> events,
                                    std::string exercise_id);

// ISO-8601 UTC timestamp helpers ("2020-07-14T10:00:00Z", optional
// fractional seconds, 'Z' or '+00:00' designator). Millisecond precision.
std::optional<int64_t> parse_iso8601_utc_ms(std::string_view text);
std::string format_iso8601_utc_ms(int64_t ms);

}  // namespace shellgraph
