#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "certivex/parser.hpp"

#ifndef CERTIVEX_TEST_DIR
#define CERTIVEX_TEST_DIR "."
#endif

namespace testing {

inline std::string read_source(const std::string& relative) {
  std::ifstream in(std::string(CERTIVEX_TEST_DIR) + "/" + relative);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline certivex::Program load(const std::string& relative) { return certivex::parse_program(read_source(relative)); }

inline std::string wrap(const std::string& pre, const std::string& post, const std::string& body,
                        const std::string& params = "") {
  return "int main(" + params + ")\n//@ requires " + pre + ";\n//@ ensures " + post + ";\n{\n" + body + "\n}\n";
}

}  // namespace testing
