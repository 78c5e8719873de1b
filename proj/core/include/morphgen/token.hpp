#pragma once

#include <string>
#include <vector>

namespace morphgen {

enum class TokKind {
    Keyword,
    Ident,
    Number,
    Op,
    Str,
    Indent,
    Dedent,
    Newline,
    Eof,
};

struct Token {
    TokKind kind = TokKind::Eof;
    std::string lexeme;
    int line = 0;
    int col = 0;

    bool is(TokKind k) const { return kind == k; }
    bool is_word(const char* s) const {
        return (kind == TokKind::Keyword || kind == TokKind::Ident) && lexeme == s;
    }
    bool is_op(const char* s) const { return kind == TokKind::Op && lexeme == s; }
};

struct TokenStream {
    std::vector<Token> tokens;

    const Token& at(size_t i) const {
        static const Token eof{TokKind::Eof, "", 0, 0};
        return i < tokens.size() ? tokens[i] : eof;
    }
    size_t size() const { return tokens.size(); }
};

}  // namespace morphgen
