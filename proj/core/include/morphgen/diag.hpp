#pragma once

#include <stdexcept>
#include <string>

namespace morphgen {

struct SourceLoc {
    int line = 0;  // 1-based; 0 = unknown
    int col = 0;
};

// Diagnostic severity of an error determines the CLI exit code.
enum class ErrClass {
    Usage,     // exit 1: bad invocation, missing file, I/O
    Parse,     // exit 2: lexical or syntax error
    Semantic,  // exit 3: resolution, kind-check, compile errors
    Runtime,   // exit 4: non-finite fields and other simulation failures
};

class MorphgenError : public std::runtime_error {
public:
    MorphgenError(ErrClass cls, std::string msg, SourceLoc loc = {})
        : std::runtime_error(std::move(msg)), cls_(cls), loc_(loc) {}

    ErrClass err_class() const { return cls_; }
    SourceLoc loc() const { return loc_; }

    // "file:line:col: message" when a location is known.
    std::string format(const std::string& file) const {
        std::string out;
        if (!file.empty()) out += file + ":";
        if (loc_.line > 0) {
            out += std::to_string(loc_.line) + ":" + std::to_string(loc_.col) + ":";
        }
        if (!out.empty()) out += " ";
        out += what();
        return out;
    }

private:
    ErrClass cls_;
    SourceLoc loc_;
};

struct ParseError : MorphgenError {
    ParseError(std::string msg, SourceLoc loc = {})
        : MorphgenError(ErrClass::Parse, std::move(msg), loc) {}
};

struct SemanticError : MorphgenError {
    SemanticError(std::string msg, SourceLoc loc = {})
        : MorphgenError(ErrClass::Semantic, std::move(msg), loc) {}
};

struct SimError : MorphgenError {
    SimError(std::string msg)
        : MorphgenError(ErrClass::Runtime, std::move(msg)) {}
};

struct UsageError : MorphgenError {
    UsageError(std::string msg)
        : MorphgenError(ErrClass::Usage, std::move(msg)) {}
};

}  // namespace morphgen
