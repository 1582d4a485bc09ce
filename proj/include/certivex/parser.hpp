#pragma once

#include <string_view>

#include "certivex/syntax.hpp"

namespace certivex {

/// Parses a translation unit holding exactly one annotated function and checks
/// it for well-formedness. Throws ParseError.
Program parse_program(std::string_view source);

/// Parse a standalone expression. No scoping is checked.
IExprPtr parse_iexpr(std::string_view source);
BExprPtr parse_bexpr(std::string_view source);

}  // namespace certivex
