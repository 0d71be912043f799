#include "shellgraph/reference_graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "dot_lexer.hpp"

namespace shellgraph {

namespace {

using dot::TokKind;
using dot::Token;

struct Attr {
    std::string key;
    std::string value;
    int line = 0;
};

struct NodeStmt {
    std::string id;
    int line = 0;
    std::vector<Attr> attrs;
};

struct EdgeStmt {
    std::vector<std::string> chain;  // at least two ids
    int line = 0;
    std::vector<Attr> attrs;
};

struct Ast {
    std::vector<NodeStmt> nodes;
    std::vector<EdgeStmt> edges;
    // Interleaving order matters only for edges; states keep node order.
};

Diagnostic syntax_error(int line, std::string message) {
    return Diagnostic{Severity::Error, "DotSyntaxError", std::move(message),
                      line, ""};
}

// Parses the reference subset into an AST, failing fast on syntax errors.
class Parser {
  public:
    Parser(const std::vector<Token>& toks, Ast& ast,
           std::vector<Diagnostic>& diags)
        : toks_(toks), ast_(ast), diags_(diags) {}

    bool run() {
        if (cur().kind == TokKind::Ident && cur().text == "strict")
            return fail("'strict' graphs are not supported");
        if (!(cur().kind == TokKind::Ident && cur().text == "digraph"))
            return fail("expected 'digraph'");
        advance();
        if (cur().kind == TokKind::Ident && !dot::is_keyword(cur().text))
            advance();  // optional graph name
        else if (cur().kind == TokKind::Quoted)
            advance();
        if (!sym("{")) return fail("expected '{'");
        advance();
        while (!sym("}")) {
            if (cur().kind == TokKind::End)
                return fail("unexpected end of input, missing '}'");
            if (!statement()) return false;
        }
        advance();
        if (cur().kind != TokKind::End)
            return fail("trailing content after graph");
        return true;
    }

  private:
    const std::vector<Token>& toks_;
    Ast& ast_;
    std::vector<Diagnostic>& diags_;
    size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    void advance() {
        if (pos_ + 1 < toks_.size()) ++pos_;
    }
    bool sym(std::string_view s) const {
        return cur().kind == TokKind::Symbol && cur().text == s;
    }
    bool fail(std::string message) {
        diags_.push_back(syntax_error(cur().line, std::move(message)));
        return false;
    }

    bool statement() {
        if (cur().kind == TokKind::Ident && dot::is_keyword(cur().text))
            return fail("'" + cur().text +
                        "' statements are not supported in reference graphs");
        if (cur().kind != TokKind::Ident && cur().kind != TokKind::Quoted)
            return fail("expected a node or edge statement");

        int line = cur().line;
        std::vector<std::string> chain{cur().text};
        advance();
        while (sym("->")) {
            advance();
            if (cur().kind == TokKind::Ident && dot::is_keyword(cur().text))
                return fail("'" + cur().text + "' cannot be an edge target");
            if (cur().kind != TokKind::Ident && cur().kind != TokKind::Quoted)
                return fail("expected edge target");
            chain.push_back(cur().text);
            advance();
        }

        std::vector<Attr> attrs;
        if (sym("[") && !attr_list(attrs)) return false;
        if (sym(";")) advance();

        if (chain.size() == 1)
            ast_.nodes.push_back({std::move(chain[0]), line, std::move(attrs)});
        else
            ast_.edges.push_back({std::move(chain), line, std::move(attrs)});
        return true;
    }

    bool attr_list(std::vector<Attr>& attrs) {
        advance();  // '['
        while (!sym("]")) {
            if (cur().kind == TokKind::End)
                return fail("unterminated attribute list");
            if (cur().kind != TokKind::Ident && cur().kind != TokKind::Quoted)
                return fail("expected attribute name");
            Attr a;
            a.key = cur().text;
            a.line = cur().line;
            advance();
            if (!sym("=")) return fail("expected '=' in attribute");
            advance();
            if (cur().kind != TokKind::Ident && cur().kind != TokKind::Quoted)
                return fail("expected attribute value");
            a.value = cur().text;
            advance();
            attrs.push_back(std::move(a));
            if (sym(",") || sym(";")) advance();
        }
        advance();  // ']'
        return true;
    }
};

std::vector<std::string> split_prereq_list(std::string_view value) {
    std::vector<std::string> ids;
    size_t start = 0;
    while (start <= value.size()) {
        size_t comma = value.find(',', start);
        std::string_view part = comma == std::string_view::npos
                                    ? value.substr(start)
                                    : value.substr(start, comma - start);
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        if (!part.empty() &&
            std::find(ids.begin(), ids.end(), part) == ids.end())
            ids.emplace_back(part);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return ids;
}

const Attr* find_attr(const std::vector<Attr>& attrs, std::string_view key) {
    for (const Attr& a : attrs)
        if (a.key == key) return &a;
    return nullptr;
}

}  // namespace

const State* ReferenceGraph::find_state(std::string_view id) const {
    for (const State& s : states)
        if (s.id == id) return &s;
    return nullptr;
}

int ReferenceGraph::state_index(std::string_view id) const {
    for (size_t i = 0; i < states.size(); ++i)
        if (states[i].id == id) return static_cast<int>(i);
    return -1;
}

bool same_graph(const ReferenceGraph& a, const ReferenceGraph& b) {
    if (a.start_state != b.start_state || a.states != b.states ||
        a.edges.size() != b.edges.size())
        return false;
    for (size_t i = 0; i < a.edges.size(); ++i)
        if (!a.edges[i].same_shape(b.edges[i])) return false;
    return true;
}

ReferenceGraphResult parse_reference_dot(std::string_view text) {
    ReferenceGraphResult result;

    dot::LexResult lexed = dot::lex(text);
    if (lexed.error) {
        result.diagnostics.push_back(*lexed.error);
        return result;
    }
    Ast ast;
    if (!Parser(lexed.tokens, ast, result.diagnostics).run()) return result;

    ReferenceGraph g;
    std::unordered_map<std::string, size_t> index_of;
    std::string start_id;
    int start_line = 0;

    for (NodeStmt& node : ast.nodes) {
        if (index_of.count(node.id)) {
            result.diagnostics.push_back(syntax_error(
                node.line, "duplicate declaration of state '" + node.id + "'"));
            continue;
        }
        State state;
        state.id = node.id;
        if (const Attr* a = find_attr(node.attrs, "label")) state.label = a->value;
        if (const Attr* a = find_attr(node.attrs, "prereq"))
            state.prerequisites = split_prereq_list(a->value);
        if (const Attr* a = find_attr(node.attrs, "start")) {
            if (a->value == "true") {
                if (!start_id.empty()) {
                    result.diagnostics.push_back(syntax_error(
                        a->line, "multiple start states ('" + start_id +
                                     "' and '" + node.id + "')"));
                } else {
                    start_id = node.id;
                    start_line = a->line;
                }
            } else if (a->value != "false") {
                result.diagnostics.push_back(syntax_error(
                    a->line, "start must be \"true\" or \"false\""));
            }
        }
        index_of.emplace(state.id, g.states.size());
        g.states.push_back(std::move(state));
    }
    (void)start_line;

    if (g.states.empty()) {
        result.diagnostics.push_back(
            syntax_error(1, "reference graph declares no states"));
        return result;
    }
    g.start_state = start_id.empty() ? g.states.front().id : start_id;

    // Resolve prerequisites against declared states.
    for (const State& s : g.states) {
        for (const std::string& p : s.prerequisites) {
            if (!index_of.count(p)) {
                result.diagnostics.push_back(Diagnostic{
                    Severity::Error, "UnknownState",
                    "prerequisite '" + p + "' of state '" + s.id +
                        "' names no declared state",
                    0, ""});
            }
        }
    }

    int declaration_index = 0;
    for (const EdgeStmt& stmt : ast.edges) {
        const Attr* pattern = find_attr(stmt.attrs, "pattern");
        for (size_t k = 0; k + 1 < stmt.chain.size(); ++k) {
            const std::string& from = stmt.chain[k];
            const std::string& to = stmt.chain[k + 1];
            for (const std::string& endpoint : {from, to}) {
                if (!index_of.count(endpoint)) {
                    result.diagnostics.push_back(Diagnostic{
                        Severity::Error, "UnknownState",
                        "edge endpoint '" + endpoint +
                            "' names no declared state",
                        stmt.line, ""});
                }
            }
            if (!pattern) {
                result.diagnostics.push_back(Diagnostic{
                    Severity::Error, "MissingPattern",
                    "edge " + from + " -> " + to + " has no 'pattern'",
                    stmt.line, ""});
                ++declaration_index;
                continue;
            }
            PatternEdge edge;
            edge.from = from;
            edge.to = to;
            edge.pattern = pattern->value;
            edge.declaration_index = declaration_index++;
            try {
                edge.compiled = std::regex(edge.pattern,
                                           std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                result.diagnostics.push_back(Diagnostic{
                    Severity::Error, "BadPattern",
                    "edge " + from + " -> " + to + ": pattern '" +
                        edge.pattern + "' does not compile: " + e.what(),
                    stmt.line, ""});
                continue;
            }
            g.edges.push_back(std::move(edge));
        }
    }

    if (!has_errors(result.diagnostics)) result.graph = std::move(g);
    return result;
}

std::string emit_reference_dot(const ReferenceGraph& g) {
    std::string out = "digraph reference {\n";
    for (const State& s : g.states) {
        out += "  " + dot::quote(s.id) + " [";
        bool first = true;
        auto attr = [&](std::string_view key, std::string_view value) {
            if (!first) out += ", ";
            first = false;
            out += key;
            out += '=';
            out += dot::quote(value);
        };
        if (!s.label.empty()) attr("label", s.label);
        if (!s.prerequisites.empty()) {
            std::string joined;
            for (size_t i = 0; i < s.prerequisites.size(); ++i) {
                if (i) joined += ',';
                joined += s.prerequisites[i];
            }
            attr("prereq", joined);
        }
        if (s.id == g.start_state) attr("start", "true");
        if (first) {
            out.resize(out.size() - 2);  // drop the empty " ["
            out += ";\n";
        } else {
            out += "];\n";
        }
    }
    for (const PatternEdge& e : g.edges) {
        out += "  " + dot::quote(e.from) + " -> " + dot::quote(e.to) +
               " [pattern=" + dot::quote(e.pattern) + "];\n";
    }
    out += "}\n";
    return out;
}

std::vector<Diagnostic> validate(const ReferenceGraph& g) {
    std::vector<Diagnostic> diags;

    // Reachability from the start state by edges alone.
    std::set<std::string> reachable{g.start_state};
    std::vector<std::string> frontier{g.start_state};
    while (!frontier.empty()) {
        std::string id = std::move(frontier.back());
        frontier.pop_back();
        for (const PatternEdge& e : g.edges) {
            if (e.from == id && reachable.insert(e.to).second)
                frontier.push_back(e.to);
        }
    }
    for (const State& s : g.states) {
        if (!reachable.count(s.id)) {
            diags.push_back(Diagnostic{
                Severity::Error, "UnreachableState",
                "state '" + s.id + "' has no edge path from start '" +
                    g.start_state + "'",
                0, ""});
        }
    }

    // Prerequisite cycles via Tarjan's strongly connected components over
    // the state -> prerequisite relation.
    const int n = static_cast<int>(g.states.size());
    std::vector<std::vector<int>> succ(n);
    for (int i = 0; i < n; ++i)
        for (const std::string& p : g.states[i].prerequisites)
            if (int j = g.state_index(p); j >= 0) succ[i].push_back(j);

    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int counter = 0;
    std::vector<std::vector<int>> components;

    struct Frame {
        int v;
        size_t next_child = 0;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call_stack{{root}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call_stack.empty()) {
            Frame& f = call_stack.back();
            if (f.next_child < succ[f.v].size()) {
                int w = succ[f.v][f.next_child++];
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call_stack.push_back({w});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    std::vector<int> comp;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                    } while (w != f.v);
                    components.push_back(std::move(comp));
                }
                int v = f.v;
                call_stack.pop_back();
                if (!call_stack.empty())
                    low[call_stack.back().v] =
                        std::min(low[call_stack.back().v], low[v]);
            }
        }
    }
    for (const std::vector<int>& comp : components) {
        bool cyclic = comp.size() > 1;
        if (comp.size() == 1) {
            const State& s = g.states[static_cast<size_t>(comp[0])];
            cyclic = std::find(s.prerequisites.begin(), s.prerequisites.end(),
                               s.id) != s.prerequisites.end();
        }
        if (!cyclic) continue;
        std::vector<std::string> ids;
        for (int v : comp) ids.push_back(g.states[static_cast<size_t>(v)].id);
        std::sort(ids.begin(), ids.end());
        std::string joined;
        for (size_t i = 0; i < ids.size(); ++i) {
            if (i) joined += ", ";
            joined += ids[i];
        }
        diags.push_back(Diagnostic{Severity::Error, "PrerequisiteCycle",
                                   "prerequisite cycle among {" + joined + "}",
                                   0, ""});
    }

    // Duplicate (from, to, pattern) edges.
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (const PatternEdge& e : g.edges) {
        if (!seen.insert({e.from, e.to, e.pattern}).second) {
            diags.push_back(Diagnostic{
                Severity::Warning, "DuplicateEdge",
                "duplicate edge " + e.from + " -> " + e.to + " [pattern=" +
                    e.pattern + "]",
                0, ""});
        }
    }

    // Patterns that match the empty string classify every command.
    for (const PatternEdge& e : g.edges) {
        if (std::regex_search(std::string{}, e.compiled)) {
            diags.push_back(Diagnostic{
                Severity::Warning, "EmptyMatchWarning",
                "pattern '" + e.pattern + "' on edge " + e.from + " -> " +
                    e.to + " matches the empty string",
                0, ""});
        }
    }

    std::stable_sort(diags.begin(), diags.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         return a.severity < b.severity;
                     });
    return diags;
}

}  // namespace shellgraph
