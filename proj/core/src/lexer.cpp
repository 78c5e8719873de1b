#include "morphgen/lexer.hpp"

#include <cctype>
#include <unordered_set>

#include "morphgen/diag.hpp"

namespace morphgen {

bool is_keyword(const std::string& w) {
    static const std::unordered_set<std::string> kws = {
        "morphogenetic", "program", "end",
        "simulation", "parameters", "space",
        "spatial", "temporal", "resolution", "duration",
        "substance", "behavior", "scalar", "vector", "field", "fields",
        "D", "let", "param", "params",
        "del", "div", "DW", "dot",
        "body", "of", "for", "within",
        "report", "diffusion", "Courant", "Peclet", "number", "and", "or",
        "visualization", "display", "final", "running", "as",
        "mesh", "colors", "contours", "quivers", "limits",
        "make", "movie", "save", "to", "load", "from", "log", "note",
        "is", "with",
    };
    return kws.count(w) != 0;
}

namespace {

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1;
    int col = 1;
    std::vector<int> indents{0};
    TokenStream out;
    bool line_has_tokens = false;

    explicit Lexer(const std::string& s) : src(s) {}

    char peek(size_t off = 0) const {
        return pos + off < src.size() ? src[pos + off] : '\0';
    }
    bool eof() const { return pos >= src.size(); }

    void advance() {
        if (eof()) return;
        if (src[pos] == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
        pos++;
    }

    void emit(TokKind k, std::string lex, int l, int c) {
        out.tokens.push_back({k, std::move(lex), l, c});
        if (k != TokKind::Indent && k != TokKind::Dedent && k != TokKind::Newline)
            line_has_tokens = true;
    }

    // True if from `pos` to end of line there is only whitespace / a comment.
    bool rest_is_blank() const {
        size_t p = pos;
        while (p < src.size() && src[p] != '\n') {
            char c = src[p];
            if (c == ' ' || c == '\t' || c == '\r') {
                p++;
                continue;
            }
            if (c == '/' && p + 1 < src.size() && src[p + 1] == '/') return true;
            return false;
        }
        return true;
    }

    void skip_spaces_and_comment() {
        while (!eof() && peek() != '\n') {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    // Measure leading whitespace of the current physical line.
    int measure_indent() {
        int n = 0;
        while (!eof()) {
            char c = peek();
            if (c == ' ') {
                n++;
                advance();
            } else if (c == '\t') {
                throw ParseError("MixedIndentation: tab in leading whitespace", {line, col});
            } else if (c == '\r') {
                advance();
            } else {
                break;
            }
        }
        return n;
    }

    void handle_indent(int n, int l, int c) {
        if (n > indents.back()) {
            indents.push_back(n);
            emit(TokKind::Indent, "", l, c);
            return;
        }
        while (n < indents.back()) {
            indents.pop_back();
            emit(TokKind::Dedent, "", l, c);
        }
        // A level between two existing stops opens a fresh block. The
        // corpus layout puts field declarations deeper than `behavior:`,
        // so a strict comes-back-to-a-known-level rule would reject it.
        if (n > indents.back()) {
            indents.push_back(n);
            emit(TokKind::Indent, "", l, c);
        }
    }

    void lex_word() {
        int l = line, c = col;
        std::string w;
        w += peek();
        advance();
        while (!eof()) {
            char ch = peek();
            if (std::isalnum((unsigned char)ch) || ch == '_') {
                w += ch;
                advance();
            } else if (ch == '.' && (std::isalnum((unsigned char)peek(1)) || peek(1) == '_') &&
                       peek(1) != '.') {
                // dotted words cover file names such as frames.mgf
                w += ch;
                advance();
            } else {
                break;
            }
        }
        emit(is_keyword(w) ? TokKind::Keyword : TokKind::Ident, w, l, c);
    }

    void lex_number() {
        int l = line, c = col;
        std::string n;
        while (std::isdigit((unsigned char)peek())) {
            n += peek();
            advance();
        }
        if (peek() == '.' && std::isdigit((unsigned char)peek(1))) {
            n += '.';
            advance();
            while (std::isdigit((unsigned char)peek())) {
                n += peek();
                advance();
            }
        }
        if (peek() == 'e' || peek() == 'E') {
            char sign = peek(1);
            if (std::isdigit((unsigned char)sign) ||
                ((sign == '+' || sign == '-') && std::isdigit((unsigned char)peek(2)))) {
                n += peek();
                advance();
                if (peek() == '+' || peek() == '-') {
                    n += peek();
                    advance();
                }
                while (std::isdigit((unsigned char)peek())) {
                    n += peek();
                    advance();
                }
            }
        }
        emit(TokKind::Number, n, l, c);
    }

    void lex_string() {
        int l = line, c = col;
        advance();  // opening quote
        std::string s;
        while (true) {
            if (eof() || peek() == '\n')
                throw ParseError("UnterminatedString", {l, c});
            if (peek() == '"') {
                advance();
                break;
            }
            s += peek();
            advance();
        }
        emit(TokKind::Str, s, l, c);
    }

    void run() {
        bool at_line_start = true;
        while (!eof()) {
            if (at_line_start) {
                int il = line, ic = col;
                int n = measure_indent();
                if (eof()) break;
                if (peek() == '\n' || rest_is_blank()) {
                    // blank / comment-only line: no tokens, no indent change
                    skip_spaces_and_comment();
                    if (!eof()) advance();  // consume newline
                    continue;
                }
                handle_indent(n, il, ic);
                at_line_start = false;
            }

            char c = peek();
            if (c == '\n') {
                advance();
                if (line_has_tokens) {
                    emit(TokKind::Newline, "", line - 1, col);
                    line_has_tokens = false;
                }
                at_line_start = true;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                continue;
            }
            if (c == '/' && peek(1) == '/') {
                while (!eof() && peek() != '\n') advance();
                continue;
            }
            if (c == '.' && peek(1) == '.' && peek(2) == '.') {
                int l = line, cc = col;
                advance();
                advance();
                advance();
                skip_spaces_and_comment();
                if (!eof() && peek() != '\n')
                    throw ParseError("'...' must end its line", {l, cc});
                if (!eof()) advance();  // newline
                // swallow the continuation line's leading whitespace
                while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
                continue;
            }
            if (std::isalpha((unsigned char)c) || c == '_') {
                lex_word();
                continue;
            }
            if (std::isdigit((unsigned char)c)) {
                lex_number();
                continue;
            }
            if (c == '"') {
                lex_string();
                continue;
            }

            int l = line, cc = col;
            auto two = [&](const char* s) {
                if (peek() == s[0] && peek(1) == s[1]) {
                    advance();
                    advance();
                    emit(TokKind::Op, s, l, cc);
                    return true;
                }
                return false;
            };
            if (two("+=") || two("-=") || two("<=") || two(">=") || two("||")) continue;
            static const char singles[] = "+-*/^=<>()[],:.";
            bool found = false;
            for (char s : singles) {
                if (s != '\0' && c == s) {
                    advance();
                    emit(TokKind::Op, std::string(1, c), l, cc);
                    found = true;
                    break;
                }
            }
            if (!found)
                throw ParseError(std::string("unexpected character '") + c + "'", {l, cc});
        }
        if (line_has_tokens) emit(TokKind::Newline, "", line, col);
        while (indents.size() > 1) {
            indents.pop_back();
            emit(TokKind::Dedent, "", line, col);
        }
    }
};

}  // namespace

TokenStream tokenize(const std::string& source) {
    Lexer lx(source);
    lx.run();
    return lx.out;
}

}  // namespace morphgen
