#pragma once

// Internal DOT tokenizer shared by the reference-graph parser and the
// emitted-DOT syntax check. Handles the quoted-string escapes this project
// uses (backslash and double quote) and skips //, /* */ and # comments.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shellgraph/diagnostics.hpp"

namespace shellgraph::dot {

enum class TokKind { Ident, Quoted, Symbol, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;  // for Symbol: one of { } [ ] ; , = ->
    int line = 1;
};

struct LexResult {
    std::vector<Token> tokens;  // ends with an End token on success
    std::optional<Diagnostic> error;
};

LexResult lex(std::string_view text);

// DOT keywords may not be used as statement heads in this project's subset.
bool is_keyword(std::string_view ident);

// Escapes backslashes and double quotes and wraps in quotes.
std::string quote(std::string_view raw);

// Generic structural check: digraph, node/edge statements with optional
// attribute lists, and subgraph blocks. No semantic rules. Returns the
// first problem found, or nullopt for valid text.
std::optional<Diagnostic> check_structure(std::string_view text);

}  // namespace shellgraph::dot
