#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fracrenorm/io.hpp"

namespace fr::cli {

inline constexpr const char* kSchema = "fr-1";

enum ExitCode : int { Ok = 0, InvalidInput = 2, NonConvergence = 3, InvariantViolation = 4 };

// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Validation {
  bool ok = true;
  bool schema_error = false;
  std::vector<std::string> problems;
};

Validation validate_report(const Json& report);
Validation validate_report_file(const std::string& path);

const char* tool_version();

}  // namespace fr::cli
