#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mles/core.hpp"

// Textual network definition format (".mles").  Line oriented, UTF-8, `#`
// comments, blank lines ignored:
//
//   network <name>
//   fact <id> kind=<input|intermediate|output>
//   rule <id> in1=<factid> in2=<factid> out=<factid> w1=<decimal> [trainable=<true|false>]
//   target <factid>
//
// w2 is implicit (1 - w1).  Exactly one `network` line first and exactly one
// `target` line.  Identifiers match [A-Za-z_][A-Za-z0-9_]*.

namespace mles {

enum class ParseErrorKind {
    syntax,
    duplicate_id,
    unknown_reference,
    bad_number,
    constraint,
};

struct ParseError {
    int line = 0;    // 1-based
    int column = 0;  // 1-based
    ParseErrorKind kind = ParseErrorKind::syntax;
    std::string message;
};

std::string to_string(const ParseError& err);

struct ParsedNetwork {
    std::string name;
    Network network;
};

using NetworkParseResult = std::variant<ParsedNetwork, std::vector<ParseError>>;

// All errors in one pass; a network is returned only when there are none and
// it passes core validation.
NetworkParseResult parse_network(const std::string& text);

// Canonical form: facts sorted by id, then rules sorted by id, weights in
// shortest round-trip decimal.  parse(serialize(n)) == n.
std::string serialize_network(const Network& net, const std::string& name);

}  // namespace mles
