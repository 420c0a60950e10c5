#pragma once

// The `ubar` command-line tool, callable in-process for tests.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "ubar/orchestrator.hpp"

namespace ubar::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kDecoderError = 3,
};

// args excludes the program name.
int main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

// Transcript archive entries.
nlohmann::ordered_json session_to_json(const GeneratedSession& s);
GeneratedSession session_from_json(const nlohmann::ordered_json& j);

}  // namespace ubar::cli
