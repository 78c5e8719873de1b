#pragma once

#include "morphgen/token.hpp"

namespace morphgen {

// Tokenize Morphgen source. Indentation produces INDENT/DEDENT tokens
// (always balanced), `//` comments are stripped, and a `...` at the end of
// a line joins it with the next physical line. Tabs in leading whitespace
// are rejected.
TokenStream tokenize(const std::string& source);

bool is_keyword(const std::string& word);

}  // namespace morphgen
