#include "dot_lexer.hpp"

#include <array>
#include <cctype>

namespace shellgraph::dot {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '.';
}

Diagnostic lex_error(int line, std::string message) {
    return Diagnostic{Severity::Error, "DotSyntaxError", std::move(message),
                      line, ""};
}

}  // namespace

LexResult lex(std::string_view text) {
    LexResult out;
    int line = 1;
    size_t i = 0;
    const size_t n = text.size();

    auto peek = [&](size_t off = 0) -> char {
        return i + off < n ? text[i + off] : '\0';
    };

    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && peek(1) == '/') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (c == '#') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && peek(1) == '*') {
            i += 2;
            while (i < n && !(text[i] == '*' && peek(1) == '/')) {
                if (text[i] == '\n') ++line;
                ++i;
            }
            if (i >= n) {
                out.error = lex_error(line, "unterminated block comment");
                return out;
            }
            i += 2;
            continue;
        }
        if (c == '"') {
            int start_line = line;
            ++i;
            std::string value;
            bool closed = false;
            while (i < n) {
                char q = text[i];
                if (q == '\\') {
                    char esc = peek(1);
                    if (esc == '\\' || esc == '"') {
                        value += esc;
                        i += 2;
                        continue;
                    }
                    // Unknown escape: keep the backslash literally.
                    value += '\\';
                    ++i;
                    continue;
                }
                if (q == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                if (q == '\n') ++line;
                value += q;
                ++i;
            }
            if (!closed) {
                out.error = lex_error(start_line, "unterminated string");
                return out;
            }
            out.tokens.push_back({TokKind::Quoted, std::move(value),
                                  start_line});
            continue;
        }
        if (c == '-' && peek(1) == '>') {
            out.tokens.push_back({TokKind::Symbol, "->", line});
            i += 2;
            continue;
        }
        if (c == '{' || c == '}' || c == '[' || c == ']' || c == ';' ||
            c == ',' || c == '=') {
            out.tokens.push_back({TokKind::Symbol, std::string(1, c), line});
            ++i;
            continue;
        }
        if (ident_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
            c == '-') {
            size_t start = i;
            ++i;
            while (i < n && ident_char(text[i])) ++i;
            out.tokens.push_back(
                {TokKind::Ident, std::string(text.substr(start, i - start)),
                 line});
            continue;
        }
        out.error = lex_error(
            line, std::string("unexpected character '") + c + "'");
        return out;
    }
    out.tokens.push_back({TokKind::End, "", line});
    return out;
}

bool is_keyword(std::string_view ident) {
    static constexpr std::array<std::string_view, 6> kKeywords = {
        "digraph", "graph", "subgraph", "node", "edge", "strict"};
    std::string lower(ident);
    for (char& c : lower) c = static_cast<char>(std::tolower(
        static_cast<unsigned char>(c)));
    for (auto k : kKeywords)
        if (lower == k) return true;
    return false;
}

std::string quote(std::string_view raw) {
    std::string out = "\"";
    for (char c : raw) {
        if (c == '\\' || c == '"') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '"';
    return out;
}

namespace {

// Recursive-descent structure check over the token stream.
class StructureChecker {
  public:
    explicit StructureChecker(const std::vector<Token>& toks) : toks_(toks) {}

    std::optional<Diagnostic> run() {
        const Token& head = cur();
        if (!(head.kind == TokKind::Ident && head.text == "digraph"))
            return err(head.line, "expected 'digraph'");
        advance();
        if (cur().kind == TokKind::Ident && !is_keyword(cur().text)) advance();
        if (auto d = block()) return d;
        if (cur().kind != TokKind::End)
            return err(cur().line, "trailing content after graph");
        return std::nullopt;
    }

  private:
    const std::vector<Token>& toks_;
    size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    void advance() {
        if (pos_ + 1 < toks_.size()) ++pos_;
    }
    bool sym(std::string_view s) const {
        return cur().kind == TokKind::Symbol && cur().text == s;
    }
    static std::optional<Diagnostic> err(int line, std::string m) {
        return Diagnostic{Severity::Error, "DotSyntaxError", std::move(m),
                          line, ""};
    }

    std::optional<Diagnostic> block() {
        if (!sym("{")) return err(cur().line, "expected '{'");
        advance();
        while (!sym("}")) {
            if (cur().kind == TokKind::End)
                return err(cur().line, "unexpected end of input, missing '}'");
            if (auto d = statement()) return d;
        }
        advance();  // '}'
        return std::nullopt;
    }

    std::optional<Diagnostic> statement() {
        if (cur().kind == TokKind::Ident && cur().text == "subgraph") {
            advance();
            if (cur().kind == TokKind::Ident && !is_keyword(cur().text))
                advance();
            return block();
        }
        if (cur().kind != TokKind::Ident && cur().kind != TokKind::Quoted)
            return err(cur().line, "expected a statement");
        advance();
        if (sym("=")) {  // graph-level attribute assignment
            advance();
            if (cur().kind != TokKind::Ident && cur().kind != TokKind::Quoted)
                return err(cur().line, "expected attribute value");
            advance();
        } else {
            while (sym("->")) {
                advance();
                if (cur().kind != TokKind::Ident &&
                    cur().kind != TokKind::Quoted)
                    return err(cur().line, "expected edge target");
                advance();
            }
            if (sym("[")) {
                if (auto d = attr_list()) return d;
            }
        }
        if (sym(";")) advance();
        return std::nullopt;
    }

    std::optional<Diagnostic> attr_list() {
        advance();  // '['
        while (!sym("]")) {
            if (cur().kind == TokKind::End)
                return err(cur().line, "unterminated attribute list");
            if (cur().kind != TokKind::Ident && cur().kind != TokKind::Quoted)
                return err(cur().line, "expected attribute name");
            advance();
            if (!sym("=")) return err(cur().line, "expected '='");
            advance();
            if (cur().kind != TokKind::Ident && cur().kind != TokKind::Quoted)
                return err(cur().line, "expected attribute value");
            advance();
            if (sym(",") || sym(";")) advance();
        }
        advance();  // ']'
        return std::nullopt;
    }
};

}  // namespace

std::optional<Diagnostic> check_structure(std::string_view text) {
    LexResult lexed = lex(text);
    if (lexed.error) return lexed.error;
    return StructureChecker(lexed.tokens).run();
}

}  // namespace shellgraph::dot
