#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mles/netdef.hpp"
#include "mles/training.hpp"

// Tabular case data -> training records.  Column maps (".mlesmap") declare
// how each CSV column becomes an input fact on the 0-1 scale: binary fields
// map to 0/1, scalar fields are divided by a maximum (fixed or resolved from
// the data), and the single output column is rescaled by a declared cap
// (e.g. months for a life-equivalent sentence).

namespace mles {

enum class TransformKind { binary, scale, identity };

struct Transform {
    TransformKind kind = TransformKind::identity;
    double max = 0.0;      // scale only; ignored when auto_max
    bool auto_max = false; // resolve max from the loaded column
};

struct ColumnEntry {
    std::string column;
    std::string fact;
    Transform transform;
};

struct OutputScale {
    double cap = 1.0;  // domain quantity at value 1, e.g. 470 (months)
    std::string unit;  // e.g. "months"
};

struct ColumnMap {
    std::vector<ColumnEntry> entries;
    std::string output_column;
    Transform output_transform;
    OutputScale output_scale;
};

struct Dataset {
    std::vector<TrainingRecord> records;
    std::string source;
    std::size_t rows_read = 0;
    std::size_t rows_skipped = 0;
    std::map<std::string, double> resolved_maxima;  // column -> max used
};

using ColumnMapParseResult = std::variant<ColumnMap, std::vector<ParseError>>;

// Grammar, line oriented like the network format:
//   map column=<name> fact=<id> transform=<binary|identity|scale> [max=<decimal|auto>]
//   output column=<name> transform=<binary|identity|scale> cap=<decimal> unit=<text>
ColumnMapParseResult parse_column_map(const std::string& text);

std::string serialize_column_map(const ColumnMap& map);

// binary -> 0/1 (any nonzero numeric is 1); scale -> min(raw/max, 1);
// identity -> raw unchanged.  Throws std::domain_error on negative raw for
// scale or identity out of [0,1].
double transform_value(double raw, const Transform& t, double resolved_max);

// Two-pass CSV load: pass 1 resolves auto maxima, pass 2 builds records.
// Rows with missing or unparseable mapped cells are skipped and counted.
// Throws std::runtime_error on missing columns, zero auto max, or when every
// row is skipped.
Dataset load_dataset(const std::string& csv_text, const ColumnMap& map,
                     const std::string& source_name = "<memory>");

Dataset load_dataset_file(const std::string& csv_path, const ColumnMap& map);

double rescale_output(double value, const OutputScale& scale);
double inverse_rescale_output(double quantity, const OutputScale& scale);

// Facts file for the CLI: `factid=value` lines, `#` comments, optional
// `map=<path>` line naming a column map for output rescaling.
struct FactsFile {
    FactValues values;
    std::optional<std::string> map_path;
};

using FactsParseResult = std::variant<FactsFile, std::vector<ParseError>>;

FactsParseResult parse_facts_file(const std::string& text);

}  // namespace mles
