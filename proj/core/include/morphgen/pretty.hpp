#pragma once

#include "morphgen/ast.hpp"

namespace morphgen {

// Emit Morphgen source that reparses to a structurally identical AST.
std::string pretty_print(const ProgramAst& prog);
std::string print_expr(const Expr& e);

// Canonical s-expression dump, used for golden-AST comparisons.
std::string dump_ast(const ProgramAst& prog);
std::string dump_expr(const Expr& e);

// Shortest decimal form of v that parses back to exactly v.
std::string format_number(double v);

// Structural equality, ignoring source locations.
bool expr_equal(const Expr& a, const Expr& b);
bool program_equal(const ProgramAst& a, const ProgramAst& b);

}  // namespace morphgen
