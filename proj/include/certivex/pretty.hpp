#pragma once

#include <string>

#include "certivex/syntax.hpp"

namespace certivex {

// Canonical concrete syntax. For every well-formed program p,
// parse_program(pretty(p)) == p.

std::string pretty(const IExpr& e);
std::string pretty(const BExpr& b);
std::string pretty(const Stmt& s, int indent = 0);
std::string pretty(const Func& f);
std::string pretty(const Program& p);

}  // namespace certivex
