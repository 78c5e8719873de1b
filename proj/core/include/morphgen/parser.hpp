#pragma once

#include "morphgen/ast.hpp"
#include "morphgen/token.hpp"

namespace morphgen {

// Parse a whole program (sections in order: simulation parameters,
// substances, bodies, visualization).
ProgramAst parse(const TokenStream& tokens);

// Parse a single expression occupying the entire stream (for tests).
ExprPtr parse_expr(const TokenStream& tokens);

ProgramAst parse_source(const std::string& source);

}  // namespace morphgen
