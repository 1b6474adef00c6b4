#include "mles/netdef.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

#include "line_format.hpp"

namespace mles {

namespace detail {

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) { ++i; continue; }
        if (line[i] == '#') break;
        std::size_t start = i;
        while (i < line.size() &&
               !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        tokens.push_back({line.substr(start, i - start),
                          static_cast<int>(start) + 1});
    }
    return tokens;
}

bool split_kv(const Token& token, std::string& key, std::string& value) {
    auto pos = token.text.find('=');
    if (pos == std::string::npos || pos == 0) return false;
    key = token.text.substr(0, pos);
    value = token.text.substr(pos + 1);
    return true;
}

bool parse_decimal(const std::string& text, double& out) {
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

using detail::format_double;
using detail::is_identifier;
using detail::parse_decimal;
using detail::split_kv;
using detail::Token;
using detail::tokenize;

namespace {

const char* parse_error_name(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::syntax: return "syntax";
        case ParseErrorKind::duplicate_id: return "duplicate id";
        case ParseErrorKind::unknown_reference: return "unknown reference";
        case ParseErrorKind::bad_number: return "bad number";
        case ParseErrorKind::constraint: return "constraint";
    }
    return "unknown";
}

}  // namespace

std::string to_string(const ParseError& err) {
    std::ostringstream out;
    out << "line " << err.line << ":" << err.column << ": ["
        << parse_error_name(err.kind) << "] " << err.message;
    return out.str();
}

NetworkParseResult parse_network(const std::string& text) {
    std::vector<ParseError> errors;
    auto fail = [&](int line, int column, ParseErrorKind kind,
                    const std::string& message) {
        errors.push_back({line, column, kind, message});
    };

    std::string name;
    bool saw_network = false;
    std::vector<Fact> facts;
    std::vector<Rule> rules;
    std::string target;
    int target_line = 0;
    std::map<std::string, int> declared_at;  // fact/rule id -> line

    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        const std::string& directive = tokens[0].text;

        if (directive == "network") {
            if (saw_network) {
                fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                     "duplicate network line");
                continue;
            }
            saw_network = true;
            if (tokens.size() != 2 || !is_identifier(tokens[1].text)) {
                fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                     "expected: network <name>");
                continue;
            }
            name = tokens[1].text;
            continue;
        }
        if (!saw_network) {
            fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                 "network line must come first");
            saw_network = true;  // report once
        }

        if (directive == "fact") {
            if (tokens.size() != 3 || !is_identifier(tokens[1].text)) {
                fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                     "expected: fact <id> kind=<input|intermediate|output>");
                continue;
            }
            Fact fact;
            fact.id = tokens[1].text;
            std::string key, value;
            if (!split_kv(tokens[2], key, value) || key != "kind") {
                fail(line_no, tokens[2].column, ParseErrorKind::syntax,
                     "expected kind=<input|intermediate|output>");
                continue;
            }
            if (value == "input") fact.kind = FactKind::input;
            else if (value == "intermediate") fact.kind = FactKind::intermediate;
            else if (value == "output") fact.kind = FactKind::output;
            else {
                fail(line_no, tokens[2].column, ParseErrorKind::syntax,
                     "unknown fact kind '" + value + "'");
                continue;
            }
            if (declared_at.count(fact.id)) {
                fail(line_no, tokens[1].column, ParseErrorKind::duplicate_id,
                     "id '" + fact.id + "' already declared on line " +
                         std::to_string(declared_at[fact.id]));
                continue;
            }
            declared_at[fact.id] = line_no;
            facts.push_back(std::move(fact));
            continue;
        }

        if (directive == "rule") {
            if (tokens.size() < 2 || !is_identifier(tokens[1].text)) {
                fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                     "expected: rule <id> in1=... in2=... out=... w1=...");
                continue;
            }
            Rule rule;
            rule.id = tokens[1].text;
            bool have_in1 = false, have_in2 = false, have_out = false,
                 have_w1 = false, bad = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                std::string key, value;
                if (!split_kv(tokens[i], key, value)) {
                    fail(line_no, tokens[i].column, ParseErrorKind::syntax,
                         "expected key=value, got '" + tokens[i].text + "'");
                    bad = true;
                    continue;
                }
                if (key == "in1" || key == "in2" || key == "out") {
                    if (!is_identifier(value)) {
                        fail(line_no, tokens[i].column, ParseErrorKind::syntax,
                             key + " is not a valid identifier");
                        bad = true;
                        continue;
                    }
                    if (key == "in1") { rule.in1 = value; have_in1 = true; }
                    else if (key == "in2") { rule.in2 = value; have_in2 = true; }
                    else { rule.out = value; have_out = true; }
                } else if (key == "w1") {
                    double w;
                    if (!parse_decimal(value, w)) {
                        fail(line_no, tokens[i].column, ParseErrorKind::bad_number,
                             "w1 is not a decimal number");
                        bad = true;
                        continue;
                    }
                    if (w < 0.0 || w > 1.0) {
                        fail(line_no, tokens[i].column, ParseErrorKind::constraint,
                             "w1 must be in [0,1]");
                        bad = true;
                        continue;
                    }
                    rule.w1 = w;
                    have_w1 = true;
                } else if (key == "trainable") {
                    if (value == "true") rule.trainable = true;
                    else if (value == "false") rule.trainable = false;
                    else {
                        fail(line_no, tokens[i].column, ParseErrorKind::syntax,
                             "trainable must be true or false");
                        bad = true;
                    }
                } else {
                    fail(line_no, tokens[i].column, ParseErrorKind::syntax,
                         "unknown rule attribute '" + key + "'");
                    bad = true;
                }
            }
            if (!(have_in1 && have_in2 && have_out && have_w1)) {
                if (!bad)
                    fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                         "rule requires in1=, in2=, out= and w1=");
                continue;
            }
            if (bad) continue;
            if (declared_at.count(rule.id)) {
                fail(line_no, tokens[1].column, ParseErrorKind::duplicate_id,
                     "id '" + rule.id + "' already declared on line " +
                         std::to_string(declared_at[rule.id]));
                continue;
            }
            declared_at[rule.id] = line_no;
            rules.push_back(std::move(rule));
            continue;
        }

        if (directive == "target") {
            if (tokens.size() != 2 || !is_identifier(tokens[1].text)) {
                fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                     "expected: target <factid>");
                continue;
            }
            if (!target.empty()) {
                fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                     "duplicate target line (first on line " +
                         std::to_string(target_line) + ")");
                continue;
            }
            target = tokens[1].text;
            target_line = line_no;
            continue;
        }

        fail(line_no, tokens[0].column, ParseErrorKind::syntax,
             "unknown directive '" + directive + "'");
    }

    if (!saw_network)
        fail(1, 1, ParseErrorKind::syntax, "missing network line");
    if (target.empty())
        fail(line_no == 0 ? 1 : line_no, 1, ParseErrorKind::syntax,
             "missing target line");

    Network network(std::move(facts), std::move(rules), target);

    // structural validation, reported at the declaring line
    auto report = validate(network);
    for (const auto& v : report.errors) {
        int at = declared_at.count(v.subject) ? declared_at[v.subject]
                 : target_line               ? target_line
                                             : 1;
        ParseErrorKind kind = ParseErrorKind::constraint;
        if (v.kind == ViolationKind::dangling_reference)
            kind = ParseErrorKind::unknown_reference;
        else if (v.kind == ViolationKind::duplicate_id)
            kind = ParseErrorKind::duplicate_id;
        fail(at, 1, kind, v.subject + ": " + v.message);
    }

    if (!errors.empty()) {
        std::sort(errors.begin(), errors.end(),
                  [](const ParseError& a, const ParseError& b) {
                      return std::tie(a.line, a.column) <
                             std::tie(b.line, b.column);
                  });
        return errors;
    }
    return ParsedNetwork{name, std::move(network)};
}

std::string serialize_network(const Network& net, const std::string& name) {
    auto report = validate(net);
    if (!report.ok())
        throw std::invalid_argument("serialize_network: invalid network:\n" +
                                    report.to_string());

    std::vector<const Fact*> facts;
    for (const auto& f : net.facts()) facts.push_back(&f);
    std::sort(facts.begin(), facts.end(),
              [](const Fact* a, const Fact* b) { return a->id < b->id; });
    std::vector<const Rule*> rules;
    for (const auto& r : net.rules()) rules.push_back(&r);
    std::sort(rules.begin(), rules.end(),
              [](const Rule* a, const Rule* b) { return a->id < b->id; });

    std::ostringstream out;
    out << "network " << (name.empty() ? "unnamed" : name) << "\n";
    for (const Fact* f : facts) {
        const char* kind = f->kind == FactKind::input ? "input"
                           : f->kind == FactKind::intermediate ? "intermediate"
                                                               : "output";
        out << "fact " << f->id << " kind=" << kind << "\n";
    }
    for (const Rule* r : rules) {
        out << "rule " << r->id << " in1=" << r->in1 << " in2=" << r->in2
            << " out=" << r->out << " w1=" << format_double(r->w1);
        if (!r->trainable) out << " trainable=false";
        out << "\n";
    }
    out << "target " << net.target() << "\n";
    return out.str();
}

}  // namespace mles
