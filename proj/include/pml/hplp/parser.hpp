#pragma once

#include "pml/hplp/program.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace pml::hplp {

struct Diagnostic {
    std::size_t line = 0;    // 1-based
    std::size_t column = 0;  // 1-based, in bytes
    std::string message;
};

struct ParseResult {
    MissionProgram program;
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return diagnostics.empty(); }
};

// Parses every clause it can; a malformed clause yields one diagnostic and
// parsing resumes after the next clause terminator.
ParseResult parse_with_diagnostics(std::string_view text);

// Throws ParseError for the first diagnostic.
MissionProgram parse_program(std::string_view text);

}  // namespace pml::hplp
