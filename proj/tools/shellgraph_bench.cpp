// Compares the serial and OpenMP per-student pipelines on a synthetic class
// and checks that both produce identical outputs.
//
//   shellgraph_bench [--students N] [--commands N] [--reps N] [--threads N]

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shellgraph/pipeline.hpp"

using namespace shellgraph;

namespace {

// A layered exercise graph shaped like the hand-authored ones: a main chain
// with shortcut and revisit edges, prerequisites along the chain.
ReferenceGraph synthetic_graph(int n_states, int n_edges) {
    std::string dot = "digraph g {\n";
    for (int i = 0; i < n_states; ++i) {
        dot += "  s" + std::to_string(i) + " [label=\"step " +
               std::to_string(i) + "\"";
        if (i == 0) dot += ", start=\"true\"";
        if (i >= 2) dot += ", prereq=\"s" + std::to_string(i - 1) + "\"";
        dot += "];\n";
    }
    int edges = 0;
    for (int i = 1; i < n_states && edges < n_edges; ++i, ++edges) {
        dot += "  s" + std::to_string(i - 1) + " -> s" + std::to_string(i) +
               " [pattern=\"^tool" + std::to_string(i) + "\\\\b\"];\n";
    }
    for (int k = 2; edges < n_edges; ++k) {
        int from = k % n_states;
        int to = (k * 7 + 3) % n_states;
        if (to == 0) to = 1;
        dot += "  s" + std::to_string(from) + " -> s" + std::to_string(to) +
               " [pattern=\"alt" + std::to_string(k) + "\"];\n";
        ++edges;
    }
    dot += "}\n";
    ReferenceGraphResult parsed = parse_reference_dot(dot);
    if (!parsed.graph) {
        std::fprintf(stderr, "internal: synthetic graph failed to parse\n");
        std::exit(2);
    }
    return std::move(*parsed.graph);
}

MilestoneSpec synthetic_spec(int count) {
    MilestoneSpec spec;
    spec.exercise_id = "bench";
    std::string json = "{\"exercise\": \"bench\", \"milestones\": [";
    for (int i = 0; i < count; ++i) {
        if (i) json += ",";
        json += "{\"name\": \"m" + std::to_string(i) +
                "\", \"description\": \"task " + std::to_string(i) +
                "\", \"input\": [\"^tool" + std::to_string(i * 3 + 1) +
                "\\\\b\", \"arg" + std::to_string(i) + "\"]}";
    }
    json += "]}";
    MilestoneSpecResult parsed = parse_milestone_spec(json);
    if (!parsed.spec) {
        std::fprintf(stderr, "internal: synthetic spec failed to parse\n");
        std::exit(2);
    }
    return std::move(*parsed.spec);
}

std::vector<SessionTrace> synthetic_class(int students, int commands,
                                          int n_states) {
    std::mt19937 rng(20260810);
    std::vector<CommandEvent> events;
    events.reserve(static_cast<size_t>(students) * commands);
    std::uniform_int_distribution<int> tool(1, n_states - 1);
    std::uniform_int_distribution<int> kind(0, 3);
    for (int s = 0; s < students; ++s) {
        std::string id = "student" + std::to_string(s);
        for (int c = 0; c < commands; ++c) {
            CommandEvent e;
            e.student_id = id;
            switch (kind(rng)) {
                case 0:
                    e.input_line = "tool" + std::to_string(tool(rng)) +
                                   " --target host" + std::to_string(c % 9);
                    break;
                case 1:
                    e.input_line = "tool" + std::to_string(tool(rng)) +
                                   " arg" + std::to_string(c % 5);
                    break;
                case 2:
                    e.input_line = "ls -la ./dir" + std::to_string(c % 7);
                    break;
                default:
                    e.input_line = "man tool" + std::to_string(tool(rng));
                    break;
            }
            events.push_back(std::move(e));
        }
    }
    return normalize(std::move(events), "bench");
}

bool same_outputs(const std::vector<StudentOutput>& a,
                  const std::vector<StudentOutput>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].student_id != b[i].student_id ||
            a[i].trainee_dot != b[i].trainee_dot ||
            a[i].milestone_dot != b[i].milestone_dot ||
            a[i].summary_json != b[i].summary_json)
            return false;
    }
    return true;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int students = 50;
    int commands = 150;
    int reps = 3;
    int threads = 0;

    CLI::App app{"Serial vs parallel pipeline benchmark"};
    app.add_option("--students", students)->check(CLI::PositiveNumber);
    app.add_option("--commands", commands)->check(CLI::PositiveNumber);
    app.add_option("--reps", reps)->check(CLI::PositiveNumber);
    app.add_option("--threads", threads);
    CLI11_PARSE(app, argc, argv);

    ExerciseModels models;
    models.refgraph = synthetic_graph(39, 66);
    models.spec = synthetic_spec(10);
    Palette palette = default_palette();
    std::vector<SessionTrace> traces =
        synthetic_class(students, commands, 39);

    std::printf("class: %d students x %d commands, graph 39/66, 10 milestones\n",
                students, commands);

    double serial_best = 1e9;
    double parallel_best = 1e9;
    std::vector<StudentOutput> serial_out, parallel_out;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        serial_out = build_outputs_serial(traces, models, palette, {});
        serial_best = std::min(serial_best, seconds_since(t0));

        t0 = std::chrono::steady_clock::now();
        parallel_out =
            build_outputs_parallel(traces, models, palette, {}, threads);
        parallel_best = std::min(parallel_best, seconds_since(t0));
    }

    const double total_events =
        static_cast<double>(students) * static_cast<double>(commands);
    std::printf("serial:   %8.3f s  (%.0f events/s)\n", serial_best,
                total_events / serial_best);
    std::printf("parallel: %8.3f s  (%.0f events/s)\n", parallel_best,
                total_events / parallel_best);
    std::printf("speedup:  %8.2fx\n", serial_best / parallel_best);

    if (!same_outputs(serial_out, parallel_out)) {
        std::fprintf(stderr, "FAIL: serial and parallel outputs differ\n");
        return 1;
    }
    std::printf("outputs identical: yes\n");
    return 0;
}
