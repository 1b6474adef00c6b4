#include "mles/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "line_format.hpp"

namespace mles {

using detail::format_double;
using detail::is_identifier;
using detail::parse_decimal;
using detail::split_kv;
using detail::Token;
using detail::tokenize;

namespace {

// RFC-4180-style CSV: quoted fields may contain commas, doubled quotes
// escape a quote.  Returns one row of cells.
std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

const char* transform_name(TransformKind kind) {
    switch (kind) {
        case TransformKind::binary: return "binary";
        case TransformKind::scale: return "scale";
        case TransformKind::identity: return "identity";
    }
    return "unknown";
}

}  // namespace

ColumnMapParseResult parse_column_map(const std::string& text) {
    std::vector<ParseError> errors;
    auto fail = [&](int line, int column, ParseErrorKind kind,
                    const std::string& message) {
        errors.push_back({line, column, kind, message});
    };

    ColumnMap map;
    bool saw_output = false;
    std::set<std::string> seen_facts;

    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        const std::string& directive = tokens[0].text;

        if (directive != "map" && directive != "output") {
            fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                 "unknown directive '" + directive + "'");
            continue;
        }

        std::string column_name, fact, transform_text, max_text, unit;
        std::string cap_text;
        bool bad = false;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            std::string key, value;
            if (!split_kv(tokens[i], key, value)) {
                fail(line_no, tokens[i].column, ParseErrorKind::syntax,
                     "expected key=value, got '" + tokens[i].text + "'");
                bad = true;
                continue;
            }
            if (key == "column") column_name = value;
            else if (key == "fact" && directive == "map") fact = value;
            else if (key == "transform") transform_text = value;
            else if (key == "max" && directive == "map") max_text = value;
            else if (key == "cap" && directive == "output") cap_text = value;
            else if (key == "unit" && directive == "output") unit = value;
            else {
                fail(line_no, tokens[i].column, ParseErrorKind::syntax,
                     "unknown attribute '" + key + "' for " + directive);
                bad = true;
            }
        }
        if (bad) continue;

        Transform transform;
        if (transform_text == "binary") transform.kind = TransformKind::binary;
        else if (transform_text == "identity") transform.kind = TransformKind::identity;
        else if (transform_text == "scale") transform.kind = TransformKind::scale;
        else {
            fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                 "transform must be binary, identity or scale");
            continue;
        }
        if (column_name.empty()) {
            fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                 "missing column=");
            continue;
        }
        if (transform.kind == TransformKind::scale) {
            if (max_text.empty() && directive == "map") {
                fail(line_no, tokens[0].column, ParseErrorKind::constraint,
                     "transform=scale requires max=<decimal|auto>");
                continue;
            }
            if (max_text == "auto") {
                transform.auto_max = true;
            } else if (!max_text.empty()) {
                double m;
                if (!parse_decimal(max_text, m)) {
                    fail(line_no, tokens[0].column, ParseErrorKind::bad_number,
                         "max is not a decimal number");
                    continue;
                }
                if (m <= 0.0) {
                    fail(line_no, tokens[0].column, ParseErrorKind::constraint,
                         "max must be positive");
                    continue;
                }
                transform.max = m;
            }
        } else if (!max_text.empty()) {
            fail(line_no, tokens[0].column, ParseErrorKind::constraint,
                 "max= only applies to transform=scale");
            continue;
        }

        if (directive == "map") {
            if (!is_identifier(fact)) {
                fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                     "missing or invalid fact=");
                continue;
            }
            if (!seen_facts.insert(fact).second) {
                fail(line_no, tokens[0].column, ParseErrorKind::duplicate_id,
                     "fact '" + fact + "' mapped twice");
                continue;
            }
            map.entries.push_back({column_name, fact, transform});
        } else {
            if (saw_output) {
                fail(line_no, tokens[0].column, ParseErrorKind::syntax,
                     "duplicate output line");
                continue;
            }
            double cap;
            if (cap_text.empty() || !parse_decimal(cap_text, cap)) {
                fail(line_no, tokens[0].column, ParseErrorKind::bad_number,
                     "output requires cap=<decimal>");
                continue;
            }
            if (cap <= 0.0) {
                fail(line_no, tokens[0].column, ParseErrorKind::constraint,
                     "cap must be positive");
                continue;
            }
            if (transform.kind == TransformKind::scale && transform.auto_max) {
                fail(line_no, tokens[0].column, ParseErrorKind::constraint,
                     "output transform cannot use max=auto");
                continue;
            }
            saw_output = true;
            map.output_column = column_name;
            map.output_transform = transform;
            map.output_scale.cap = cap;
            map.output_scale.unit = unit;
        }
    }

    if (!saw_output)
        fail(line_no == 0 ? 1 : line_no, 1, ParseErrorKind::syntax,
             "missing output line");
    if (map.entries.empty())
        fail(line_no == 0 ? 1 : line_no, 1, ParseErrorKind::syntax,
             "no map lines");

    if (!errors.empty()) return errors;
    return map;
}

std::string serialize_column_map(const ColumnMap& map) {
    std::ostringstream out;
    for (const auto& e : map.entries) {
        out << "map column=" << e.column << " fact=" << e.fact
            << " transform=" << transform_name(e.transform.kind);
        if (e.transform.kind == TransformKind::scale) {
            if (e.transform.auto_max) out << " max=auto";
            else out << " max=" << format_double(e.transform.max);
        }
        out << "\n";
    }
    out << "output column=" << map.output_column
        << " transform=" << transform_name(map.output_transform.kind)
        << " cap=" << format_double(map.output_scale.cap)
        << " unit=" << map.output_scale.unit << "\n";
    return out.str();
}

double transform_value(double raw, const Transform& t, double resolved_max) {
    switch (t.kind) {
        case TransformKind::binary:
            return raw != 0.0 ? 1.0 : 0.0;  // lenient: any nonzero is 1
        case TransformKind::scale: {
            if (raw < 0.0)
                throw std::domain_error(
                    "transform_value: negative value for scale transform");
            if (resolved_max <= 0.0)
                throw std::domain_error("transform_value: max must be positive");
            return std::min(raw / resolved_max, 1.0);
        }
        case TransformKind::identity:
            if (raw < 0.0 || raw > 1.0)
                throw std::domain_error(
                    "transform_value: identity value out of [0,1]");
            return raw;
    }
    throw std::logic_error("transform_value: unreachable");
}

Dataset load_dataset(const std::string& csv_text, const ColumnMap& map,
                     const std::string& source_name) {
    std::istringstream stream(csv_text);
    std::string line;
    if (!std::getline(stream, line))
        throw std::runtime_error("load_dataset: empty CSV " + source_name);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_csv_row(line);
    std::map<std::string, std::size_t> column_index;
    for (std::size_t i = 0; i < header.size(); ++i)
        column_index[trim(header[i])] = i;

    auto require_column = [&](const std::string& name) {
        auto it = column_index.find(name);
        if (it == column_index.end())
            throw std::runtime_error("load_dataset: column '" + name +
                                     "' not found in " + source_name);
        return it->second;
    };
    std::vector<std::size_t> entry_columns;
    for (const auto& e : map.entries)
        entry_columns.push_back(require_column(e.column));
    std::size_t output_column = require_column(map.output_column);

    // read all rows once; pass 1 resolves auto maxima, pass 2 builds records
    std::vector<std::vector<std::string>> rows;
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_row(line));
    }

    auto cell_value = [&](const std::vector<std::string>& row, std::size_t col,
                          double& out) {
        if (col >= row.size()) return false;
        std::string cell = trim(row[col]);
        if (cell.empty()) return false;
        return detail::parse_decimal(cell, out);
    };

    Dataset dataset;
    dataset.source = source_name;
    dataset.rows_read = rows.size();

    for (std::size_t e = 0; e < map.entries.size(); ++e) {
        const auto& entry = map.entries[e];
        if (entry.transform.kind != TransformKind::scale) continue;
        if (!entry.transform.auto_max) {
            dataset.resolved_maxima[entry.column] = entry.transform.max;
            continue;
        }
        double max_seen = 0.0;
        for (const auto& row : rows) {
            double v;
            if (cell_value(row, entry_columns[e], v))
                max_seen = std::max(max_seen, v);
        }
        if (max_seen <= 0.0)
            throw std::runtime_error("load_dataset: max=auto column '" +
                                     entry.column + "' has maximum 0 in " +
                                     source_name);
        dataset.resolved_maxima[entry.column] = max_seen;
    }

    for (const auto& row : rows) {
        TrainingRecord record;
        bool usable = true;
        for (std::size_t e = 0; e < map.entries.size() && usable; ++e) {
            const auto& entry = map.entries[e];
            double raw;
            if (!cell_value(row, entry_columns[e], raw)) {
                usable = false;
                break;
            }
            double max = 0.0;
            if (entry.transform.kind == TransformKind::scale)
                max = dataset.resolved_maxima.at(entry.column);
            try {
                record.inputs[entry.fact] =
                    transform_value(raw, entry.transform, max);
            } catch (const std::domain_error&) {
                usable = false;
            }
        }
        double raw_out;
        if (usable && cell_value(row, output_column, raw_out)) {
            try {
                double scaled = map.output_transform.kind == TransformKind::scale
                                    ? transform_value(raw_out,
                                                      map.output_transform,
                                                      map.output_scale.cap)
                                    : transform_value(raw_out,
                                                      map.output_transform, 0.0);
                record.expected = scaled;
            } catch (const std::domain_error&) {
                usable = false;
            }
        } else {
            usable = false;
        }
        if (usable) dataset.records.push_back(std::move(record));
        else ++dataset.rows_skipped;
    }

    if (dataset.records.empty())
        throw std::runtime_error("load_dataset: no usable rows in " +
                                 source_name);
    return dataset;
}

Dataset load_dataset_file(const std::string& csv_path, const ColumnMap& map) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_dataset: cannot open " + csv_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_dataset(buffer.str(), map, csv_path);
}

double rescale_output(double value, const OutputScale& scale) {
    if (value < 0.0 || value > 1.0)
        throw std::domain_error("rescale_output: value out of [0,1]");
    return value * scale.cap;
}

double inverse_rescale_output(double quantity, const OutputScale& scale) {
    return std::clamp(quantity / scale.cap, 0.0, 1.0);
}

FactsParseResult parse_facts_file(const std::string& text) {
    std::vector<ParseError> errors;
    FactsFile facts;

    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 1) {
            errors.push_back({line_no, tokens[1].column, ParseErrorKind::syntax,
                              "expected one factid=value per line"});
            continue;
        }
        std::string key, value;
        if (!split_kv(tokens[0], key, value)) {
            errors.push_back({line_no, tokens[0].column, ParseErrorKind::syntax,
                              "expected factid=value"});
            continue;
        }
        if (key == "map") {
            if (facts.map_path) {
                errors.push_back({line_no, tokens[0].column,
                                  ParseErrorKind::syntax,
                                  "duplicate map= line"});
                continue;
            }
            facts.map_path = value;
            continue;
        }
        if (!is_identifier(key)) {
            errors.push_back({line_no, tokens[0].column, ParseErrorKind::syntax,
                              "'" + key + "' is not a valid fact id"});
            continue;
        }
        double v;
        if (!parse_decimal(value, v)) {
            errors.push_back({line_no, tokens[0].column,
                              ParseErrorKind::bad_number,
                              "value for " + key + " is not a decimal number"});
            continue;
        }
        if (v < 0.0 || v > 1.0) {
            errors.push_back({line_no, tokens[0].column,
                              ParseErrorKind::constraint,
                              "value for " + key + " out of [0,1]"});
            continue;
        }
        if (facts.values.count(key)) {
            errors.push_back({line_no, tokens[0].column,
                              ParseErrorKind::duplicate_id,
                              "fact '" + key + "' assigned twice"});
            continue;
        }
        facts.values[key] = v;
    }

    if (!errors.empty()) return errors;
    return facts;
}

}  // namespace mles
