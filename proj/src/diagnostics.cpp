#include "shellgraph/diagnostics.hpp"

#include <algorithm>

namespace shellgraph {

std::string format_diagnostic(const Diagnostic& d) {
    std::string out;
    if (!d.file.empty()) {
        out += d.file;
        out += ':';
    }
    if (d.line > 0) {
        out += std::to_string(d.line);
        out += ':';
    }
    if (!out.empty()) out += ' ';
    out += d.severity == Severity::Error ? "error" : "warning";
    out += " [";
    out += d.code;
    out += "]: ";
    out += d.message;
    return out;
}

bool has_errors(std::span<const Diagnostic> diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
        return d.severity == Severity::Error;
    });
}

}  // namespace shellgraph
