#pragma once

#include <span>
#include <string>
#include <vector>

namespace shellgraph {

enum class Severity { Error, Warning };

// One finding from a parser or validator. `line` is 1-based and 0 when the
// finding is not tied to a source line; `file` is filled in by callers that
// know which file the text came from.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    int line = 0;
    std::string file;

    bool operator==(const Diagnostic&) const = default;
};

std::string format_diagnostic(const Diagnostic& d);

bool has_errors(std::span<const Diagnostic> diags);

}  // namespace shellgraph
