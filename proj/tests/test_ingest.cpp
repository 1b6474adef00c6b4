#include <doctest.h>

#include <cmath>
#include <variant>

#include "helpers.hpp"
#include "mles/domains.hpp"
#include "mles/ingest.hpp"

using namespace mles;

namespace {

const char* kTinyMap =
    "map column=a fact=FA transform=binary\n"
    "map column=b fact=FB transform=scale max=10\n"
    "map column=c fact=FC transform=identity\n"
    "output column=y transform=scale cap=100 unit=points\n";

ColumnMap map_of(const std::string& text) {
    auto result = parse_column_map(text);
    REQUIRE(std::holds_alternative<ColumnMap>(result));
    return std::get<ColumnMap>(result);
}

std::vector<ParseError> errors_of(const ColumnMapParseResult& result) {
    REQUIRE(std::holds_alternative<std::vector<ParseError>>(result));
    return std::get<std::vector<ParseError>>(result);
}

}  // namespace

TEST_CASE("parse_column_map reads entries and the output line") {
    auto map = map_of(kTinyMap);
    REQUIRE(map.entries.size() == 3);
    CHECK(map.entries[0].column == "a");
    CHECK(map.entries[0].fact == "FA");
    CHECK(map.entries[0].transform.kind == TransformKind::binary);
    CHECK(map.entries[1].transform.kind == TransformKind::scale);
    CHECK(map.entries[1].transform.max == 10.0);
    CHECK_FALSE(map.entries[1].transform.auto_max);
    CHECK(map.entries[2].transform.kind == TransformKind::identity);
    CHECK(map.output_column == "y");
    CHECK(map.output_scale.cap == 100.0);
    CHECK(map.output_scale.unit == "points");
}

TEST_CASE("parse_column_map: scale without max is a located error") {
    auto errors = errors_of(parse_column_map(
        "map column=a fact=FA transform=scale\n"
        "output column=y transform=identity cap=1 unit=score\n"));
    bool found = false;
    for (const auto& e : errors)
        if (e.kind == ParseErrorKind::constraint && e.line == 1) found = true;
    CHECK(found);
}

TEST_CASE("parse_column_map: output may not use max=auto") {
    auto errors = errors_of(parse_column_map(
        "map column=a fact=FA transform=binary\n"
        "output column=y transform=scale max=auto cap=1 unit=score\n"));
    CHECK(!errors.empty());
}

TEST_CASE("parse_column_map: missing output and duplicate facts") {
    auto errors = errors_of(parse_column_map(
        "map column=a fact=FA transform=binary\n"
        "map column=b fact=FA transform=binary\n"));
    bool dup = false, missing_output = false;
    for (const auto& e : errors) {
        if (e.kind == ParseErrorKind::duplicate_id && e.line == 2) dup = true;
        if (e.message.find("missing output") != std::string::npos)
            missing_output = true;
    }
    CHECK(dup);
    CHECK(missing_output);
}

TEST_CASE("serialize_column_map round-trips") {
    auto map = map_of(kTinyMap);
    std::string text = serialize_column_map(map);
    CHECK(text == kTinyMap);
    CHECK(serialize_column_map(map_of(text)) == text);
}

TEST_CASE("transform_value examples") {
    Transform binary{TransformKind::binary, 0.0, false};
    CHECK(transform_value(0.0, binary, 0.0) == 0.0);
    CHECK(transform_value(3.0, binary, 0.0) == 1.0);

    Transform scale{TransformKind::scale, 43.0, false};
    CHECK(transform_value(14.0, scale, 43.0) ==
          doctest::Approx(14.0 / 43.0).epsilon(1e-15));
    CHECK(transform_value(500.0, scale, 470.0) == 1.0);  // clamped
    CHECK_THROWS_AS(transform_value(-1.0, scale, 43.0), std::domain_error);

    Transform identity{TransformKind::identity, 0.0, false};
    CHECK(transform_value(0.25, identity, 0.0) == 0.25);
    CHECK_THROWS_AS(transform_value(1.5, identity, 0.0), std::domain_error);
}

TEST_CASE("load_dataset builds records from a small CSV") {
    auto map = map_of(kTinyMap);
    auto dataset = load_dataset(
        "a,b,c,y\n"
        "0,5,0.5,50\n"
        "2,20,1.0,150\n"
        "1,0,0.0,0\n",
        map);
    CHECK(dataset.rows_read == 3);
    CHECK(dataset.rows_skipped == 0);
    REQUIRE(dataset.records.size() == 3);

    // hand-computed
    CHECK(dataset.records[0].inputs.at("FA") == 0.0);
    CHECK(dataset.records[0].inputs.at("FB") == 0.5);
    CHECK(dataset.records[0].inputs.at("FC") == 0.5);
    CHECK(dataset.records[0].expected == 0.5);
    CHECK(dataset.records[1].inputs.at("FA") == 1.0);
    CHECK(dataset.records[1].inputs.at("FB") == 1.0);  // 20/10 clamped
    CHECK(dataset.records[1].expected == 1.0);         // 150/100 clamped
    CHECK(dataset.records[2].expected == 0.0);
}

TEST_CASE("load_dataset skips and counts bad rows") {
    auto map = map_of(kTinyMap);
    auto dataset = load_dataset(
        "a,b,c,y\n"
        "1,5,0.5,50\n"
        "1,,0.5,50\n"      // missing cell
        "1,5,abc,50\n"     // unparseable cell
        "1,5,2.0,50\n"     // identity out of range
        "1,5,0.5,\n",      // missing output
        map);
    CHECK(dataset.rows_read == 5);
    CHECK(dataset.rows_skipped == 4);
    CHECK(dataset.records.size() == 1);
}

TEST_CASE("load_dataset errors: missing column, all rows bad, zero auto max") {
    auto map = map_of(kTinyMap);
    CHECK_THROWS_AS(load_dataset("a,b,y\n1,5,50\n", map), std::runtime_error);
    CHECK_THROWS_AS(load_dataset("a,b,c,y\n1,,0.5,50\n", map),
                    std::runtime_error);

    auto auto_map = map_of(
        "map column=b fact=FB transform=scale max=auto\n"
        "output column=y transform=identity cap=1 unit=score\n");
    CHECK_THROWS_AS(load_dataset("b,y\n0,0.5\n0,0.5\n", auto_map),
                    std::runtime_error);
}

TEST_CASE("load_dataset resolves auto maxima from the data") {
    auto map = map_of(
        "map column=b fact=FB transform=scale max=auto\n"
        "output column=y transform=identity cap=1 unit=score\n");
    auto dataset = load_dataset("b,y\n10,0.1\n20,0.2\n", map);
    CHECK(dataset.resolved_maxima.at("b") == 20.0);
    CHECK(dataset.records[0].inputs.at("FB") == 0.5);
    CHECK(dataset.records[1].inputs.at("FB") == 1.0);
}

TEST_CASE("load_dataset handles quoted cells and CRLF") {
    auto map = map_of(
        "map column=b fact=FB transform=identity\n"
        "output column=y transform=identity cap=1 unit=score\n");
    auto dataset = load_dataset("\"b\",y\r\n\"0.5\",0.25\r\n", map);
    REQUIRE(dataset.records.size() == 1);
    CHECK(dataset.records[0].inputs.at("FB") == 0.5);
    CHECK(dataset.records[0].expected == 0.25);
}

TEST_CASE("rescale_output and its inverse") {
    OutputScale scale{470.0, "months"};
    CHECK(rescale_output(0.0, scale) == 0.0);
    CHECK(rescale_output(1.0, scale) == 470.0);
    CHECK(rescale_output(0.5, scale) == 235.0);
    CHECK_THROWS_AS(rescale_output(1.1, scale), std::domain_error);

    CHECK(inverse_rescale_output(235.0, scale) == 0.5);
    CHECK(inverse_rescale_output(9999.0, scale) == 1.0);  // clamped
    for (double v : {0.0, 0.123, 0.5, 1.0})
        CHECK(inverse_rescale_output(rescale_output(v, scale), scale) ==
              doctest::Approx(v).epsilon(1e-15));
}

TEST_CASE("parse_facts_file reads values and the optional map line") {
    auto result = parse_facts_file(
        "# comment\n"
        "A=0.5\n"
        "B=1\n"
        "map=data/sentencing.mlesmap\n");
    REQUIRE(std::holds_alternative<FactsFile>(result));
    const auto& facts = std::get<FactsFile>(result);
    CHECK(facts.values.at("A") == 0.5);
    CHECK(facts.values.at("B") == 1.0);
    REQUIRE(facts.map_path.has_value());
    CHECK(*facts.map_path == "data/sentencing.mlesmap");
}

TEST_CASE("parse_facts_file reports malformed lines") {
    auto result = parse_facts_file(
        "A=0.5\n"
        "A=0.6\n"    // duplicate
        "B=1.5\n"    // out of range
        "C=abc\n"    // bad number
        "just junk\n");
    REQUIRE(std::holds_alternative<std::vector<ParseError>>(result));
    auto errors = std::get<std::vector<ParseError>>(result);
    REQUIRE(errors.size() == 4);
    CHECK(errors[0].kind == ParseErrorKind::duplicate_id);
    CHECK(errors[0].line == 2);
    CHECK(errors[1].kind == ParseErrorKind::constraint);
    CHECK(errors[2].kind == ParseErrorKind::bad_number);
    CHECK(errors[3].kind == ParseErrorKind::syntax);
}

TEST_CASE("shipped column maps parse and cover their networks") {
    auto sent = map_of(sentencing_column_map_text());
    CHECK(sent.entries.size() == 22);
    CHECK(sent.output_column == "SENTTOT");
    CHECK(sent.output_scale.cap == 470.0);
    CHECK(sent.output_scale.unit == "months");

    auto pat = map_of(patentability_column_map_text());
    CHECK(pat.entries.size() == 10);
    CHECK(pat.output_transform.kind == TransformKind::identity);
    CHECK(pat.output_scale.cap == 1.0);
}
