#include "shellgraph/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shellgraph {

namespace fs = std::filesystem;

namespace {

Diagnostic io_error(std::string file, std::string message) {
    Diagnostic d{Severity::Error, "IoError", std::move(message), 0, ""};
    d.file = std::move(file);
    return d;
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return std::move(buf).str();
}

bool write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    return out.good();
}

// Student ids are opaque; keep output file names filesystem-safe.
std::string sanitize_filename(std::string_view id) {
    std::string out;
    for (char c : id) {
        bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out += safe ? c : '_';
    }
    return out.empty() ? "_" : out;
}

StudentOutput build_one(const SessionTrace& trace,
                        const ExerciseModels& models, const Palette& palette,
                        std::optional<int> split) {
    StudentOutput out;
    out.student_id = trace.student_id;
    try {
        std::optional<TraineeGraph> tg;
        std::optional<MilestoneGraph> mg;
        if (models.refgraph) {
            tg = build_trainee_graph(trace, *models.refgraph);
            tg->palette_id = palette.id;
            out.trainee_dot = emit_trainee_dot(*tg, palette, split);
        }
        if (models.spec) {
            mg = build_milestone_graph(trace, *models.spec);
            mg->palette_id = palette.id;
            out.milestone_dot = emit_milestone_dot(*mg, palette);
        }
        out.summary = make_student_summary(tg ? &*tg : nullptr,
                                           mg ? &*mg : nullptr);
        out.summary_json = emit_summary_json(out.summary);
    } catch (const std::exception& e) {
        out = StudentOutput{};
        out.student_id = trace.student_id;
        out.error = e.what();
    }
    return out;
}

std::vector<std::string> expand_input_paths(
    const std::vector<std::string>& paths, std::vector<Diagnostic>& diags) {
    std::vector<std::string> files;
    for (const std::string& path : paths) {
        std::error_code ec;
        if (fs::is_directory(path, ec)) {
            std::vector<std::string> in_dir;
            for (const auto& entry : fs::directory_iterator(path, ec)) {
                if (entry.is_regular_file()) in_dir.push_back(entry.path().string());
            }
            std::sort(in_dir.begin(), in_dir.end());
            files.insert(files.end(), in_dir.begin(), in_dir.end());
        } else if (fs::is_regular_file(path, ec)) {
            files.push_back(path);
        } else {
            diags.push_back(
                io_error(path, "input path does not exist or is not readable"));
        }
    }
    return files;
}

}  // namespace

LoadedInputs load_inputs(const std::vector<std::string>& paths,
                         InputFormat format) {
    LoadedInputs loaded;
    std::vector<std::string> files =
        expand_input_paths(paths, loaded.diagnostics);
    loaded.files_skipped = static_cast<int>(loaded.diagnostics.size());

    for (const std::string& file : files) {
        std::optional<std::string> content = read_file(file);
        if (!content) {
            loaded.diagnostics.push_back(io_error(file, "cannot read file"));
            ++loaded.files_skipped;
            continue;
        }
        ParseResult parsed = format == InputFormat::Structured
                                 ? parse_structured_log(*content)
                                 : parse_history_log(*content);
        for (Diagnostic& d : parsed.diagnostics) {
            d.file = file;
            loaded.diagnostics.push_back(std::move(d));
        }
        loaded.events.insert(loaded.events.end(),
                             std::make_move_iterator(parsed.events.begin()),
                             std::make_move_iterator(parsed.events.end()));
        ++loaded.files_read;
    }
    return loaded;
}

ModelLoadResult load_models(const RunConfig& config) {
    ModelLoadResult result;
    bool ok = true;

    if (!config.refgraph_path && !config.milestones_path) {
        result.diagnostics.push_back(Diagnostic{
            Severity::Error, "ConfigError",
            "at least one of --refgraph / --milestones is required", 0, ""});
        return result;
    }

    if (config.refgraph_path) {
        std::optional<std::string> text = read_file(*config.refgraph_path);
        if (!text) {
            result.diagnostics.push_back(
                io_error(*config.refgraph_path, "cannot read reference graph"));
            ok = false;
        } else {
            ReferenceGraphResult parsed = parse_reference_dot(*text);
            for (Diagnostic& d : parsed.diagnostics)
                d.file = *config.refgraph_path;
            result.diagnostics.insert(result.diagnostics.end(),
                                      parsed.diagnostics.begin(),
                                      parsed.diagnostics.end());
            if (parsed.graph) {
                std::vector<Diagnostic> found = validate(*parsed.graph);
                for (Diagnostic& d : found) d.file = *config.refgraph_path;
                result.diagnostics.insert(result.diagnostics.end(),
                                          found.begin(), found.end());
                if (!has_errors(found))
                    result.models.refgraph = std::move(parsed.graph);
                else
                    ok = false;
            } else {
                ok = false;
            }
        }
    }
    if (config.milestones_path) {
        std::optional<std::string> text = read_file(*config.milestones_path);
        if (!text) {
            result.diagnostics.push_back(
                io_error(*config.milestones_path, "cannot read milestone spec"));
            ok = false;
        } else {
            MilestoneSpecResult parsed = parse_milestone_spec(*text);
            for (Diagnostic& d : parsed.diagnostics)
                d.file = *config.milestones_path;
            result.diagnostics.insert(result.diagnostics.end(),
                                      parsed.diagnostics.begin(),
                                      parsed.diagnostics.end());
            if (parsed.spec)
                result.models.spec = std::move(parsed.spec);
            else
                ok = false;
        }
    }
    result.ok = ok;
    return result;
}

std::vector<StudentOutput> build_outputs_serial(
    const std::vector<SessionTrace>& traces, const ExerciseModels& models,
    const Palette& palette, std::optional<int> split) {
    std::vector<StudentOutput> outputs;
    outputs.reserve(traces.size());
    for (const SessionTrace& trace : traces)
        outputs.push_back(build_one(trace, models, palette, split));
    return outputs;
}

std::vector<StudentOutput> build_outputs_parallel(
    const std::vector<SessionTrace>& traces, const ExerciseModels& models,
    const Palette& palette, std::optional<int> split, int threads) {
#ifdef _OPENMP
    std::vector<StudentOutput> outputs(traces.size());
    const int n = static_cast<int>(traces.size());
    if (threads > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int i = 0; i < n; ++i)
            outputs[static_cast<size_t>(i)] =
                build_one(traces[static_cast<size_t>(i)], models, palette,
                          split);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i)
            outputs[static_cast<size_t>(i)] =
                build_one(traces[static_cast<size_t>(i)], models, palette,
                          split);
    }
    return outputs;
#else
    (void)threads;
    return build_outputs_serial(traces, models, palette, split);
#endif
}

ClassReport make_class_report(std::vector<StudentSummary> summaries,
                              std::string exercise_id) {
    ClassReport report;
    report.exercise_id = std::move(exercise_id);
    std::sort(summaries.begin(), summaries.end(),
              [](const StudentSummary& a, const StudentSummary& b) {
                  return a.student_id < b.student_id;
              });

    // Milestone completion in first-seen order across students.
    std::vector<std::string> order;
    std::map<std::string, int> achieved;
    for (const StudentSummary& s : summaries) {
        for (const MilestoneOutcome& m : s.milestones) {
            if (!achieved.count(m.name)) {
                achieved[m.name] = 0;
                order.push_back(m.name);
            }
            if (m.achieved) ++achieved[m.name];
        }
    }
    const int student_count = static_cast<int>(summaries.size());
    for (const std::string& name : order) {
        report.milestone_completion.push_back(
            {name, achieved[name],
             static_cast<double>(achieved[name]) / student_count});
    }

    std::map<std::string, int> red_total;
    for (const StudentSummary& s : summaries)
        for (const auto& [command, count] : s.red_commands)
            red_total[command] += count;
    report.red_commands.assign(red_total.begin(), red_total.end());
    std::sort(report.red_commands.begin(), report.red_commands.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });

    report.students = std::move(summaries);
    return report;
}

std::string emit_class_report_json(const ClassReport& report) {
    nlohmann::ordered_json root;
    root["exercise"] = report.exercise_id;
    root["student_count"] = static_cast<int>(report.students.size());
    root["students"] = nlohmann::ordered_json::array();
    for (const StudentSummary& s : report.students)
        root["students"].push_back(
            nlohmann::ordered_json::parse(emit_summary_json(s)));
    root["milestone_completion"] = nlohmann::ordered_json::array();
    for (const MilestoneRate& m : report.milestone_completion) {
        root["milestone_completion"].push_back(
            {{"name", m.name},
             {"achieved_count", m.achieved_count},
             {"rate", m.rate}});
    }
    root["red_commands"] = nlohmann::ordered_json::array();
    for (const auto& [command, count] : report.red_commands)
        root["red_commands"].push_back(
            {{"command", command}, {"count", count}});
    return root.dump(2) + "\n";
}

CommandResult run_validate(const RunConfig& config) {
    CommandResult result;
    ModelLoadResult loaded = load_models(config);
    result.diagnostics = std::move(loaded.diagnostics);
    result.exit_code =
        loaded.ok ? kExitOk
                  : (has_errors(result.diagnostics) &&
                             std::any_of(result.diagnostics.begin(),
                                         result.diagnostics.end(),
                                         [](const Diagnostic& d) {
                                             return d.code == "IoError" ||
                                                    d.code == "ConfigError";
                                         })
                         ? kExitInputError
                         : kExitValidationFailure);
    return result;
}

CommandResult run_generate(const RunConfig& config) {
    CommandResult result;

    ModelLoadResult loaded = load_models(config);
    result.diagnostics = std::move(loaded.diagnostics);
    if (!loaded.ok) {
        bool io = std::any_of(result.diagnostics.begin(),
                              result.diagnostics.end(),
                              [](const Diagnostic& d) {
                                  return d.code == "IoError" ||
                                         d.code == "ConfigError";
                              });
        result.exit_code = io ? kExitInputError : kExitValidationFailure;
        return result;
    }

    std::optional<Palette> palette = palette_by_id(config.palette_id);
    if (!palette) {
        result.diagnostics.push_back(Diagnostic{
            Severity::Error, "ConfigError",
            "unknown palette '" + config.palette_id + "'", 0, ""});
        result.exit_code = kExitInputError;
        return result;
    }

    LoadedInputs inputs = load_inputs(config.inputs, config.format);
    result.diagnostics.insert(result.diagnostics.end(),
                              inputs.diagnostics.begin(),
                              inputs.diagnostics.end());

    std::string exercise_id = config.exercise_id;
    if (exercise_id.empty() && loaded.models.spec)
        exercise_id = loaded.models.spec->exercise_id;
    if (exercise_id.empty()) exercise_id = "exercise";

    std::vector<SessionTrace> traces =
        normalize(std::move(inputs.events), exercise_id);

    std::vector<StudentOutput> outputs =
        config.parallel
            ? build_outputs_parallel(traces, loaded.models, *palette,
                                     config.split, config.threads)
            : build_outputs_serial(traces, loaded.models, *palette,
                                   config.split);

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) {
        result.diagnostics.push_back(io_error(
            config.out_dir, "cannot create output directory: " + ec.message()));
        result.exit_code = kExitInputError;
        return result;
    }

    bool write_failed = false;
    std::vector<StudentSummary> summaries;
    for (const StudentOutput& out : outputs) {
        if (out.error) {
            result.diagnostics.push_back(Diagnostic{
                Severity::Error, "GenerationError",
                "student '" + out.student_id + "': " + *out.error, 0, ""});
            continue;
        }
        const std::string stem =
            (fs::path(config.out_dir) / sanitize_filename(out.student_id))
                .string();
        auto emit = [&](const std::string& path, std::string_view content) {
            if (write_file(path, content))
                result.written_files.push_back(path);
            else {
                result.diagnostics.push_back(io_error(path, "cannot write"));
                write_failed = true;
            }
        };
        if (out.trainee_dot) emit(stem + ".trainee.dot", *out.trainee_dot);
        if (out.milestone_dot)
            emit(stem + ".milestone.dot", *out.milestone_dot);
        emit(stem + ".summary.json", out.summary_json);
        summaries.push_back(out.summary);
        ++result.student_count;
    }

    ClassReport report = make_class_report(std::move(summaries), exercise_id);
    result.report_json = emit_class_report_json(report);
    const std::string report_path =
        (fs::path(config.out_dir) / "class_report.json").string();
    if (write_file(report_path, result.report_json))
        result.written_files.push_back(report_path);
    else {
        result.diagnostics.push_back(io_error(report_path, "cannot write"));
        write_failed = true;
    }

    const bool parse_trouble = has_errors(result.diagnostics);
    result.exit_code =
        (parse_trouble || inputs.files_skipped > 0 || write_failed)
            ? kExitInputError
            : kExitOk;
    return result;
}

CommandResult run_report(const std::vector<std::string>& summary_paths,
                         const std::string& out_dir,
                         const std::string& exercise_id) {
    CommandResult result;
    std::vector<std::string> files;
    for (const std::string& path : summary_paths) {
        std::error_code ec;
        if (fs::is_directory(path, ec)) {
            std::vector<std::string> in_dir;
            for (const auto& entry : fs::directory_iterator(path, ec)) {
                if (entry.is_regular_file() &&
                    entry.path().string().ends_with(".summary.json"))
                    in_dir.push_back(entry.path().string());
            }
            std::sort(in_dir.begin(), in_dir.end());
            files.insert(files.end(), in_dir.begin(), in_dir.end());
        } else if (fs::is_regular_file(path, ec)) {
            files.push_back(path);
        } else {
            result.diagnostics.push_back(
                io_error(path, "input path does not exist"));
        }
    }

    std::vector<StudentSummary> summaries;
    for (const std::string& file : files) {
        std::optional<std::string> text = read_file(file);
        if (!text) {
            result.diagnostics.push_back(io_error(file, "cannot read file"));
            continue;
        }
        SummaryParseResult parsed = parse_summary_json(*text);
        for (Diagnostic& d : parsed.diagnostics) {
            d.file = file;
            result.diagnostics.push_back(std::move(d));
        }
        if (parsed.summary) {
            summaries.push_back(std::move(*parsed.summary));
            ++result.student_count;
        }
    }

    ClassReport report = make_class_report(std::move(summaries), exercise_id);
    result.report_json = emit_class_report_json(report);

    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        const std::string report_path =
            (fs::path(out_dir) / "class_report.json").string();
        if (!ec && write_file(report_path, result.report_json))
            result.written_files.push_back(report_path);
        else
            result.diagnostics.push_back(io_error(report_path, "cannot write"));
    }

    result.exit_code =
        has_errors(result.diagnostics) ? kExitInputError : kExitOk;
    return result;
}

}  // namespace shellgraph
