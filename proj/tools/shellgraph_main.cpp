// shellgraph: turns per-student command logs into progress graphs.
//
//   shellgraph validate --refgraph solution.dot --milestones tasks.json
//   shellgraph generate logs/ --format history --refgraph solution.dot \
//       --milestones tasks.json --out out/
//   shellgraph report out/ --out report/

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shellgraph/pipeline.hpp"

namespace {

void print_diagnostics(const std::vector<shellgraph::Diagnostic>& diags) {
    for (const shellgraph::Diagnostic& d : diags)
        std::fprintf(stderr, "%s\n", shellgraph::format_diagnostic(d).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Student progress graphs from command-line histories"};
    app.require_subcommand(1);

    shellgraph::RunConfig config;
    std::string format = "structured";
    std::string refgraph_path;
    std::string milestones_path;
    int split = 0;

    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--refgraph", refgraph_path,
                        "Reference graph (.dot)");
        cmd->add_option("--milestones", milestones_path,
                        "Milestone spec (.json)");
    };

    CLI::App* validate =
        app.add_subcommand("validate", "Check authoring inputs");
    add_model_flags(validate);

    CLI::App* generate = app.add_subcommand(
        "generate", "Generate per-student graphs and a class report");
    generate->add_option("inputs", config.inputs, "Log files or directories")
        ->required();
    generate->add_option("--format", format, "structured|history")
        ->check(CLI::IsMember({"structured", "history"}));
    add_model_flags(generate);
    generate->add_option("--out", config.out_dir, "Output directory")
        ->required();
    generate->add_option("--palette", config.palette_id,
                         "default|colorblind")
        ->check(CLI::IsMember({"default", "colorblind"}));
    generate->add_option("--split", split,
                         "Cluster trainee graphs into sections of at most N "
                         "visited elements")
        ->check(CLI::PositiveNumber);
    generate->add_option("--exercise", config.exercise_id, "Exercise id");
    generate->add_flag_callback(
        "--serial", [&] { config.parallel = false; },
        "Process students one by one instead of in parallel");
    generate->add_option("--threads", config.threads,
                         "Worker threads (0 = runtime default)");

    std::vector<std::string> summary_paths;
    std::string report_out;
    std::string report_exercise = "exercise";
    CLI::App* report = app.add_subcommand(
        "report", "Aggregate existing *.summary.json files");
    report->add_option("summaries", summary_paths,
                       "Summary files or directories")
        ->required();
    report->add_option("--out", report_out, "Output directory");
    report->add_option("--exercise", report_exercise, "Exercise id");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : shellgraph::kExitInputError;
    }

    if (!refgraph_path.empty()) config.refgraph_path = refgraph_path;
    if (!milestones_path.empty()) config.milestones_path = milestones_path;
    if (split > 0) config.split = split;
    if (format == "history")
        config.format = shellgraph::InputFormat::History;

    shellgraph::CommandResult result;
    if (validate->parsed()) {
        result = shellgraph::run_validate(config);
        print_diagnostics(result.diagnostics);
        if (result.exit_code == shellgraph::kExitOk)
            std::printf("ok\n");
    } else if (generate->parsed()) {
        result = shellgraph::run_generate(config);
        print_diagnostics(result.diagnostics);
        std::printf("%d student(s), %zu file(s) written\n",
                    result.student_count, result.written_files.size());
    } else {
        result = shellgraph::run_report(summary_paths, report_out,
                                        report_exercise);
        print_diagnostics(result.diagnostics);
        if (report_out.empty())
            std::fputs(result.report_json.c_str(), stdout);
    }
    return result.exit_code;
}
