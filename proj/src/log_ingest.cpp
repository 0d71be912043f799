#include "shellgraph/log_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "json.hpp"

namespace shellgraph {

namespace {

using nlohmann::json;

constexpr int64_t kMsPerDay = 86400000;

std::string_view strip_bom(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    return text;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

struct Line {
    std::string_view text;  // CR already stripped
    int no;                 // 1-based
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    int no = 1;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string_view line = nl == std::string_view::npos
                                    ? text.substr(start)
                                    : text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (nl == std::string_view::npos) {
            if (!line.empty()) lines.push_back({line, no});
            break;
        }
        lines.push_back({line, no});
        start = nl + 1;
        ++no;
    }
    return lines;
}

Diagnostic record_error(int line, std::string message,
                        std::string code = "MalformedRecord") {
    return Diagnostic{Severity::Error, std::move(code), std::move(message),
                      line, ""};
}

// Shell-style continuation: backslash-newline is removed and the next line
// is concatenated as-is. A newline without a preceding backslash has no
// place in a single logical command.
std::optional<std::string> join_continuations(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c == '\\' && i + 1 < raw.size() && raw[i + 1] == '\n') {
            ++i;
            continue;
        }
        if (c == '\n') return std::nullopt;
        out += c;
    }
    return out;
}

// Leap-day-exact conversion of a civil UTC date to days since 1970-01-01.
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<int64_t>(era) * 146097 + static_cast<int64_t>(doe) -
           719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe =
        (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yi = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yi + (m <= 2));
}

int days_in_month(int y, int m) {
    static constexpr int k[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
    return k[m - 1];
}

}  // namespace

std::optional<int64_t> parse_iso8601_utc_ms(std::string_view s) {
    auto take_digits = [&](size_t count, int& out) -> bool {
        if (s.size() < count) return false;
        int value = 0;
        for (size_t i = 0; i < count; ++i) {
            char c = s[i];
            if (c < '0' || c > '9') return false;
            value = value * 10 + (c - '0');
        }
        s.remove_prefix(count);
        out = value;
        return true;
    };
    auto take_char = [&](char a, char b) -> bool {
        if (s.empty() || (s.front() != a && s.front() != b)) return false;
        s.remove_prefix(1);
        return true;
    };

    int year, month, day, hour, minute, second;
    if (!take_digits(4, year) || !take_char('-', '-') ||
        !take_digits(2, month) || !take_char('-', '-') ||
        !take_digits(2, day) || !take_char('T', 't') ||
        !take_digits(2, hour) || !take_char(':', ':') ||
        !take_digits(2, minute) || !take_char(':', ':') ||
        !take_digits(2, second))
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 ||
        day > days_in_month(year, month) || hour > 23 || minute > 59 ||
        second > 59)
        return std::nullopt;

    int64_t ms = 0;
    if (!s.empty() && s.front() == '.') {
        s.remove_prefix(1);
        size_t digits = 0;
        int64_t frac = 0;
        while (!s.empty() && s.front() >= '0' && s.front() <= '9') {
            if (digits < 3) frac = frac * 10 + (s.front() - '0');
            ++digits;
            s.remove_prefix(1);
        }
        if (digits == 0) return std::nullopt;
        while (digits < 3) {
            frac *= 10;
            ++digits;
        }
        ms = frac;
    }

    if (take_char('Z', 'z')) {
        if (!s.empty()) return std::nullopt;
    } else if (s == "+00:00" || s == "-00:00") {
        s = {};
    } else {
        return std::nullopt;
    }

    int64_t days = days_from_civil(year, month, day);
    return days * kMsPerDay +
           (static_cast<int64_t>(hour) * 3600 + minute * 60 + second) * 1000 +
           ms;
}

std::string format_iso8601_utc_ms(int64_t ms) {
    int64_t days = ms / kMsPerDay;
    int64_t rem = ms % kMsPerDay;
    if (rem < 0) {
        rem += kMsPerDay;
        --days;
    }
    int y, mo, d;
    civil_from_days(days, y, mo, d);
    int h = static_cast<int>(rem / 3600000);
    int mi = static_cast<int>(rem / 60000 % 60);
    int se = static_cast<int>(rem / 1000 % 60);
    int milli = static_cast<int>(rem % 1000);
    char buf[40];
    if (milli != 0)
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                      y, mo, d, h, mi, se, milli);
    else
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y,
                      mo, d, h, mi, se);
    return buf;
}

ParseResult parse_structured_log(std::string_view text) {
    ParseResult result;
    std::unordered_map<std::string, int> seq_by_student;

    for (const Line& line : split_lines(strip_bom(text))) {
        if (trim(line.text).empty()) continue;
        json record = json::parse(line.text, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            result.diagnostics.push_back(
                record_error(line.no, "record is not a valid object"));
            continue;
        }

        auto student_it = record.find("student");
        if (student_it == record.end() || !student_it->is_string() ||
            trim(student_it->get_ref<const std::string&>()).empty()) {
            result.diagnostics.push_back(
                record_error(line.no, "missing or empty 'student'"));
            continue;
        }
        auto cmd_it = record.find("cmd");
        if (cmd_it == record.end() || !cmd_it->is_string()) {
            result.diagnostics.push_back(
                record_error(line.no, "missing 'cmd'"));
            continue;
        }
        auto joined = join_continuations(cmd_it->get_ref<const std::string&>());
        if (!joined) {
            result.diagnostics.push_back(record_error(
                line.no, "'cmd' contains a newline without continuation"));
            continue;
        }
        if (trim(*joined).empty()) {
            result.diagnostics.push_back(
                record_error(line.no, "'cmd' is empty"));
            continue;
        }

        CommandEvent event;
        event.student_id = student_it->get<std::string>();
        event.input_line = std::move(*joined);

        if (auto it = record.find("ts"); it != record.end()) {
            if (!it->is_string()) {
                result.diagnostics.push_back(
                    record_error(line.no, "'ts' must be a string"));
                continue;
            }
            auto ts = parse_iso8601_utc_ms(it->get_ref<const std::string&>());
            if (!ts) {
                result.diagnostics.push_back(record_error(
                    line.no, "unparseable timestamp '" +
                                 it->get<std::string>() + "'"));
                continue;
            }
            event.timestamp_ms = ts;
        }
        if (auto it = record.find("host"); it != record.end()) {
            if (!it->is_string()) {
                result.diagnostics.push_back(
                    record_error(line.no, "'host' must be a string"));
                continue;
            }
            event.host = it->get<std::string>();
        }
        if (auto it = record.find("output"); it != record.end()) {
            if (!it->is_string()) {
                result.diagnostics.push_back(
                    record_error(line.no, "'output' must be a string"));
                continue;
            }
            event.output_text = it->get<std::string>();
        }

        event.seq = ++seq_by_student[event.student_id];
        result.events.push_back(std::move(event));
    }
    return result;
}

ParseResult parse_history_log(std::string_view text) {
    ParseResult result;
    std::unordered_map<std::string, int> seq_by_student;

    std::string current_student;
    // Index into result.events of the entry an output block may attach to;
    // -1 when there is no eligible preceding input line.
    int attach_target = -1;
    enum class Mode { Scan, Output, SkipOrphanOutput } mode = Mode::Scan;
    std::vector<std::string> output_lines;
    int block_start_line = 0;

    const std::vector<Line> lines = split_lines(strip_bom(text));
    for (size_t li = 0; li < lines.size(); ++li) {
        const Line& line = lines[li];
        if (mode == Mode::Output || mode == Mode::SkipOrphanOutput) {
            if (trim(line.text) == "--- end") {
                if (mode == Mode::Output) {
                    std::string joined;
                    for (size_t k = 0; k < output_lines.size(); ++k) {
                        if (k) joined += '\n';
                        joined += output_lines[k];
                    }
                    result.events[static_cast<size_t>(attach_target)]
                        .output_text = std::move(joined);
                    attach_target = -1;  // one output block per entry
                }
                mode = Mode::Scan;
                output_lines.clear();
                continue;
            }
            if (mode == Mode::Output)
                output_lines.emplace_back(line.text);
            continue;
        }

        std::string_view trimmed = trim(line.text);
        if (trimmed.empty()) continue;

        if (trimmed.rfind("### student:", 0) == 0) {
            std::string_view id = trim(trimmed.substr(12));
            if (id.empty()) {
                result.diagnostics.push_back(
                    record_error(line.no, "student block with empty id"));
                current_student.clear();
            } else {
                current_student = std::string(id);
            }
            attach_target = -1;
            continue;
        }
        if (trimmed == "--- output") {
            if (attach_target < 0) {
                result.diagnostics.push_back(record_error(
                    line.no, "output block without a preceding input line",
                    "MalformedBlock"));
                mode = Mode::SkipOrphanOutput;
            } else {
                mode = Mode::Output;
            }
            block_start_line = line.no;
            output_lines.clear();
            continue;
        }
        if (trimmed == "--- end") {
            result.diagnostics.push_back(record_error(
                line.no, "'--- end' without an open output block",
                "MalformedBlock"));
            continue;
        }
        if (trimmed.rfind("ENTRY ", 0) == 0) {
            std::string_view rest = trimmed.substr(6);
            size_t colon = rest.find(':');
            bool digits_ok = colon != std::string_view::npos && colon > 0;
            if (digits_ok) {
                for (char c : rest.substr(0, colon))
                    if (c < '0' || c > '9') digits_ok = false;
            }
            if (!digits_ok) {
                result.diagnostics.push_back(record_error(
                    line.no, "malformed ENTRY line"));
                continue;
            }
            if (current_student.empty()) {
                result.diagnostics.push_back(record_error(
                    line.no, "ENTRY outside of a student block"));
                continue;
            }
            std::string command(rest.substr(colon + 1));
            if (!command.empty() && command.front() == ' ')
                command.erase(command.begin());
            // Trailing backslash joins the following physical lines.
            while (!command.empty() && command.back() == '\\' &&
                   li + 1 < lines.size()) {
                command.pop_back();
                ++li;
                command += lines[li].text;
            }
            if (!command.empty() && command.back() == '\\') command.pop_back();
            if (trim(command).empty()) {
                result.diagnostics.push_back(
                    record_error(line.no, "ENTRY with empty command"));
                continue;
            }
            CommandEvent event;
            event.student_id = current_student;
            event.input_line = std::move(command);
            event.seq = ++seq_by_student[current_student];
            result.events.push_back(std::move(event));
            attach_target = static_cast<int>(result.events.size()) - 1;
            continue;
        }
        result.diagnostics.push_back(
            record_error(line.no, "unrecognized line"));
    }

    if (mode != Mode::Scan) {
        if (mode == Mode::Output && attach_target >= 0 &&
            !output_lines.empty()) {
            std::string joined;
            for (size_t k = 0; k < output_lines.size(); ++k) {
                if (k) joined += '\n';
                joined += output_lines[k];
            }
            result.events[static_cast<size_t>(attach_target)].output_text =
                std::move(joined);
        }
        result.diagnostics.push_back(record_error(
            block_start_line, "output block not terminated before end of file",
            "UnterminatedBlock"));
    }
    return result;
}

std::string emit_structured_log(const std::vector<CommandEvent>& events) {
    std::string out;
    for (const CommandEvent& e : events) {
        nlohmann::ordered_json record;
        record["student"] = e.student_id;
        record["cmd"] = e.input_line;
        if (e.timestamp_ms) record["ts"] = format_iso8601_utc_ms(*e.timestamp_ms);
        if (e.host) record["host"] = *e.host;
        if (e.output_text) record["output"] = *e.output_text;
        out += record.dump();
        out += '\n';
    }
    return out;
}

std::vector<SessionTrace> normalize(std::vector<CommandEvent> events,
                                    std::string exercise_id) {
    std::map<std::string, std::vector<CommandEvent>> groups;
    for (CommandEvent& e : events)
        groups[e.student_id].push_back(std::move(e));

    std::vector<SessionTrace> traces;
    traces.reserve(groups.size());
    for (auto& [student, group] : groups) {
        const bool all_timestamped =
            std::all_of(group.begin(), group.end(), [](const CommandEvent& e) {
                return e.timestamp_ms.has_value();
            });
        if (all_timestamped) {
            std::stable_sort(group.begin(), group.end(),
                             [](const CommandEvent& a, const CommandEvent& b) {
                                 return *a.timestamp_ms < *b.timestamp_ms;
                             });
        }
        for (size_t i = 0; i < group.size(); ++i)
            group[i].seq = static_cast<int>(i) + 1;
        traces.push_back(
            {student, exercise_id, std::move(group)});
    }
    return traces;
}

}  // namespace shellgraph
