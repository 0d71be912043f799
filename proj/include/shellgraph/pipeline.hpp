#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shellgraph/graph_render.hpp"
#include "shellgraph/log_ingest.hpp"
#include "shellgraph/milestone_model.hpp"
#include "shellgraph/reference_graph.hpp"

namespace shellgraph {

enum class InputFormat { Structured, History };

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitValidationFailure = 2;

struct RunConfig {
    std::vector<std::string> inputs;  // log files or directories
    InputFormat format = InputFormat::Structured;
    std::optional<std::string> refgraph_path;
    std::optional<std::string> milestones_path;
    std::string out_dir;
    std::string palette_id = "default";
    std::optional<int> split;
    std::string exercise_id;  // empty: taken from the milestone spec
    bool parallel = true;     // OpenMP over students when available
    int threads = 0;          // 0 = runtime default
};

// Reference graph and/or milestone spec, loaded and validated once per run.
struct ExerciseModels {
    std::optional<ReferenceGraph> refgraph;
    std::optional<MilestoneSpec> spec;
};

// Everything generated for one student. `error` is set when model building
// failed for this student (the outputs are then empty).
struct StudentOutput {
    std::string student_id;
    std::optional<std::string> trainee_dot;
    std::optional<std::string> milestone_dot;
    StudentSummary summary;
    std::string summary_json;
    std::optional<std::string> error;
};

// Per-student model building. The serial version is the reference
// implementation; the parallel one distributes students over OpenMP threads
// and must produce identical results.
std::vector<StudentOutput> build_outputs_serial(
    const std::vector<SessionTrace>& traces, const ExerciseModels& models,
    const Palette& palette, std::optional<int> split);
std::vector<StudentOutput> build_outputs_parallel(
    const std::vector<SessionTrace>& traces, const ExerciseModels& models,
    const Palette& palette, std::optional<int> split, int threads = 0);

struct MilestoneRate {
    std::string name;
    int achieved_count = 0;
    double rate = 0.0;  // achieved_count / student_count
    bool operator==(const MilestoneRate&) const = default;
};

struct ClassReport {
    std::string exercise_id;
    std::vector<StudentSummary> students;  // sorted by student_id
    std::vector<MilestoneRate> milestone_completion;
    std::vector<std::pair<std::string, int>> red_commands;  // ranked
};

// Deterministic reduction over summaries: per-milestone completion rates and
// the class-wide red command ranking (count descending, then lexicographic).
ClassReport make_class_report(std::vector<StudentSummary> summaries,
                              std::string exercise_id);
std::string emit_class_report_json(const ClassReport& report);

struct LoadedInputs {
    std::vector<CommandEvent> events;
    std::vector<Diagnostic> diagnostics;
    int files_read = 0;
    int files_skipped = 0;  // unreadable files
};

// Expands directories to their regular files (sorted), reads and parses each
// per `format`. Unreadable files are skipped with a diagnostic.
LoadedInputs load_inputs(const std::vector<std::string>& paths,
                         InputFormat format);

struct ModelLoadResult {
    ExerciseModels models;
    std::vector<Diagnostic> diagnostics;
    bool ok = false;
};

ModelLoadResult load_models(const RunConfig& config);

struct CommandResult {
    int exit_code = kExitOk;
    std::vector<Diagnostic> diagnostics;
    std::vector<std::string> written_files;
    int student_count = 0;
    std::string report_json;  // class report (generate/report commands)
};

// `validate`: parses and validates the configured reference graph and
// milestone spec. Exit 0 iff no errors (warnings allowed).
CommandResult run_validate(const RunConfig& config);

// `generate`: parses all inputs, builds per-student graphs and summaries,
// writes <id>.trainee.dot / <id>.milestone.dot / <id>.summary.json and
// class_report.json under out_dir. Exit 0 iff every input file parsed with
// zero fatal record errors; bad records and unreadable files are reported,
// skipped, and turn the exit code nonzero.
CommandResult run_generate(const RunConfig& config);

// `report`: rebuilds a class report from existing *.summary.json files
// (paths or directories). Writes class_report.json under out_dir when set.
CommandResult run_report(const std::vector<std::string>& summary_paths,
                         const std::string& out_dir,
                         const std::string& exercise_id);

}  // namespace shellgraph
