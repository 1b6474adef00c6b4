#pragma once

#include <string>
#include <vector>

// Internal helpers shared by the line-oriented text formats (.mles, .mlesmap,
// facts files).

namespace mles::detail {

struct Token {
    std::string text;
    int column = 0;  // 1-based
};

bool is_identifier(const std::string& s);

// whitespace-separated tokens; `#` starts a comment
std::vector<Token> tokenize(const std::string& line);

bool split_kv(const Token& token, std::string& key, std::string& value);

bool parse_decimal(const std::string& text, double& out);

// shortest round-trip decimal
std::string format_double(double v);

}  // namespace mles::detail
