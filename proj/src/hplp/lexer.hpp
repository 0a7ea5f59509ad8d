#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pml::hplp::detail {

enum class TokenKind { atom, quoted_atom, variable, number, punct, end_of_clause, end_of_input };

struct Token {
    TokenKind kind = TokenKind::end_of_input;
    std::string text;
    double number = 0.0;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t end_line = 1;    // position just past the token
    std::size_t end_column = 1;
};

// Throws ParseError on characters that cannot start a token.
std::vector<Token> tokenize(std::string_view text);

}  // namespace pml::hplp::detail
