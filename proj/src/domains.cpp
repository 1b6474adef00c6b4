#include "mles/domains.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace mles {

namespace {

struct RuleSpec {
    const char* id;
    const char* in1;
    const char* in2;
    const char* out;
    double w1;
};

// Builds a network from rule wiring alone: facts consumed but never produced
// are inputs, produced facts are intermediates, `target` is the output.
Network from_rules(const std::vector<RuleSpec>& specs, const char* target) {
    std::set<std::string> produced;
    std::set<std::string> mentioned;
    std::vector<Rule> rules;
    for (const auto& s : specs) {
        Rule r;
        r.id = s.id;
        r.in1 = s.in1;
        r.in2 = s.in2;
        r.out = s.out;
        r.w1 = s.w1;
        produced.insert(s.out);
        mentioned.insert({s.in1, s.in2, s.out});
        rules.push_back(std::move(r));
    }
    std::vector<Fact> facts;
    for (const auto& id : mentioned) {
        FactKind kind = FactKind::input;
        if (id == target) kind = FactKind::output;
        else if (produced.count(id)) kind = FactKind::intermediate;
        facts.push_back({id, kind});
    }
    return Network(std::move(facts), std::move(rules), target);
}

}  // namespace

Network sentencing_network() {
    // Two branches: offense level (Chapter 3 adjustments, BOL/SOC) and
    // criminal history (POINT chain).  CAREEROFF/ONRELEASE/DURFLIGHT feed
    // both.  The branches meet only at R20, which merges the final offense
    // level with total criminal history into SENTENCE.
    static const std::vector<RuleSpec> rules = {
        // Chapter 3 role and victim adjustments
        {"R1", "AGGROLE", "MITROLE", "PROC_ROLE1", 0.5},
        {"R2", "PROC_ROLE1", "ABUSETRUST", "PROC_ROLE2", 0.5},
        {"R3", "PROC_ROLE2", "USEMINOR", "PROC_ROLE3", 0.5},
        {"R4", "PROC_ROLE3", "HATECRIME", "PROC_VICT1", 0.5},
        {"R5", "PROC_VICT1", "RESTRAINT", "PROC_VICT2", 0.5},
        {"R6", "PROC_VICT2", "OFFVICTIM", "PROC_CH3_ROLEVICT", 0.5},
        // further Chapter 3 adjustments
        {"R7", "TERRORISM", "HUMANRTS", "PROC_CH3X1", 0.5},
        {"R8", "PROC_CH3X1", "OBSTRUCT", "PROC_CH3X2", 0.5},
        {"R9", "PROC_CH3X2", "FALSEDOMAIN", "PROC_CH3_OTHER", 0.5},
        // facts counted in both offense level and criminal history
        {"R10", "CAREEROFF", "ONRELEASE", "PROC_SHARED1", 0.5},
        {"R11", "PROC_SHARED1", "DURFLIGHT", "PROC_SHARED", 0.5},
        // criminal history points; higher-impact priors carry more weight
        {"R17", "POINT1", "POINT2", "PROC_PTS1", 0.25},
        {"R18", "PROC_PTS1", "POINT3", "PROC_PTS2", 0.25},
        {"R19", "PROC_PTS2", "SENTPTS", "PROC_PTS3", 0.5},
        {"R21", "PROC_PTS3", "VOIL1PTS", "PROC_PTS4", 0.5},
        // R12 connects the point variables to the other criminal history
        // facts; R16 yields the total criminal history value
        {"R12", "PROC_PTS4", "PROC_SHARED", "PROC_HIST", 0.5},
        {"R16", "PROC_HIST", "RLEASHI", "PROC_CRIMHIST", 0.5},
        // offense level: base level and special characteristics, then the
        // Chapter 3 merge (R14) and the shared-modifier merge (R15)
        {"R13", "BOL", "SOC", "PROC_BASE", 0.5},
        {"R14", "PROC_CH3_ROLEVICT", "PROC_CH3_OTHER", "PROC_CH3", 0.5},
        {"R15", "PROC_CH3", "PROC_SHARED", "PROC_MODS", 0.5},
        {"R22", "PROC_BASE", "PROC_MODS", "PROC_OFFLEVEL", 0.5},
        // final merge of the two branches
        {"R20", "PROC_OFFLEVEL", "PROC_CRIMHIST", "SENTENCE", 0.5},
    };
    return from_rules(rules, "SENTENCE");
}

Network patentability_network() {
    // Four branches chaining into the target: domestic public prior art,
    // domestic private prior art, foreign prior art, development difficulty.
    static const std::vector<RuleSpec> rules = {
        {"R1", "PRIOR_COMMERCIAL_USE", "PRIOR_SALES", "PROC_DOMPUB1", 0.5},
        {"R2", "PROC_DOMPUB1", "PUBLICATIONS", "PROC_DOMPUB2", 0.5},
        {"R3", "PROC_DOMPUB2", "PUBLIC_PRESENTATIONS", "PROC_DOMPUB3", 0.5},
        {"R4", "PROC_DOMPUB3", "PRIOR_PUBLIC_USE", "PROC_DOMPUB", 0.5},
        {"R5", "FOREIGN_PATENTS", "FOREIGN_APPLICATIONS", "PROC_FOREIGN", 0.5},
        {"R6", "EASE_OF_DEVELOPMENT", "PRIOR_ART_DIFFERENCE", "PROC_DEVEL", 0.5},
        {"R7", "PROC_DOMPUB", "UNPUB_APPLICATIONS", "PROC_ART1", 0.5},
        {"R8", "PROC_ART1", "PROC_FOREIGN", "PROC_ART2", 0.5},
        {"R9", "PROC_ART2", "PROC_DEVEL", "PATENTABILITY", 0.5},
    };
    return from_rules(rules, "PATENTABILITY");
}

const std::string& sentencing_network_text() {
    static const std::string text =
        serialize_network(sentencing_network(), "sentencing");
    return text;
}

const std::string& patentability_network_text() {
    static const std::string text =
        serialize_network(patentability_network(), "patentability");
    return text;
}

const std::string& sentencing_column_map_text() {
    static const std::string text =
        "# Column vocabulary follows the USSC codebook; sample data is synthetic.\n"
        "map column=BOL fact=BOL transform=scale max=auto\n"
        "map column=SOC fact=SOC transform=scale max=auto\n"
        "map column=AGGROLE fact=AGGROLE transform=scale max=auto\n"
        "map column=MITROLE fact=MITROLE transform=scale max=auto\n"
        "map column=ABUSETRUST fact=ABUSETRUST transform=binary\n"
        "map column=USEMINOR fact=USEMINOR transform=binary\n"
        "map column=HATECRIME fact=HATECRIME transform=binary\n"
        "map column=RESTRAINT fact=RESTRAINT transform=binary\n"
        "map column=OFFVICTIM fact=OFFVICTIM transform=binary\n"
        "map column=TERRORISM fact=TERRORISM transform=binary\n"
        "map column=HUMANRTS fact=HUMANRTS transform=binary\n"
        "map column=OBSTRUCT fact=OBSTRUCT transform=binary\n"
        "map column=FALSEDOMAIN fact=FALSEDOMAIN transform=binary\n"
        "map column=CAREEROFF fact=CAREEROFF transform=binary\n"
        "map column=ONRELEASE fact=ONRELEASE transform=binary\n"
        "map column=DURFLIGHT fact=DURFLIGHT transform=binary\n"
        "map column=POINT1 fact=POINT1 transform=scale max=auto\n"
        "map column=POINT2 fact=POINT2 transform=scale max=auto\n"
        "map column=POINT3 fact=POINT3 transform=scale max=auto\n"
        "map column=SENTPTS fact=SENTPTS transform=scale max=auto\n"
        "map column=VOIL1PTS fact=VOIL1PTS transform=scale max=auto\n"
        "map column=RLEASHI fact=RLEASHI transform=binary\n"
        // 470 months is the life-equivalent sentence cap; value 1 maps to it
        "output column=SENTTOT transform=scale cap=470 unit=months\n";
    return text;
}

const std::string& patentability_column_map_text() {
    static const std::string text =
        "# Inputs use patentability-favoring polarity: 1 favors the applicant\n"
        "# (e.g. absence of a disclosure, large difference from prior art).\n"
        "map column=PRIOR_COMMERCIAL_USE fact=PRIOR_COMMERCIAL_USE transform=binary\n"
        "map column=PRIOR_SALES fact=PRIOR_SALES transform=binary\n"
        "map column=PUBLICATIONS fact=PUBLICATIONS transform=binary\n"
        "map column=PUBLIC_PRESENTATIONS fact=PUBLIC_PRESENTATIONS transform=binary\n"
        "map column=PRIOR_PUBLIC_USE fact=PRIOR_PUBLIC_USE transform=binary\n"
        "map column=UNPUB_APPLICATIONS fact=UNPUB_APPLICATIONS transform=binary\n"
        "map column=FOREIGN_PATENTS fact=FOREIGN_PATENTS transform=binary\n"
        "map column=FOREIGN_APPLICATIONS fact=FOREIGN_APPLICATIONS transform=binary\n"
        "map column=EASE_OF_DEVELOPMENT fact=EASE_OF_DEVELOPMENT transform=identity\n"
        "map column=PRIOR_ART_DIFFERENCE fact=PRIOR_ART_DIFFERENCE transform=identity\n"
        "output column=PATENTABILITY transform=identity cap=1 unit=score\n";
    return text;
}

DomainPack load_domain_pack(const std::string& name,
                            const std::string& data_dir) {
    DomainPack pack;
    pack.name = name;
    const std::string* map_text = nullptr;
    if (name == "sentencing") {
        pack.network = sentencing_network();
        map_text = &sentencing_column_map_text();
    } else if (name == "patentability") {
        pack.network = patentability_network();
        map_text = &patentability_column_map_text();
    } else {
        throw std::invalid_argument("load_domain_pack: unknown pack '" + name +
                                    "'");
    }

    auto report = validate(pack.network);
    if (!report.ok())
        throw std::runtime_error("load_domain_pack: network invalid:\n" +
                                 report.to_string());

    auto parsed = parse_column_map(*map_text);
    if (auto* errs = std::get_if<std::vector<ParseError>>(&parsed))
        throw std::runtime_error("load_domain_pack: column map invalid: " +
                                 to_string(errs->front()));
    pack.column_map = std::get<ColumnMap>(parsed);

    std::set<std::string> mapped;
    for (const auto& e : pack.column_map.entries) mapped.insert(e.fact);
    for (const auto& id : pack.network.input_fact_ids())
        if (!mapped.count(id))
            throw std::runtime_error("load_domain_pack: input fact " + id +
                                     " not covered by the column map");
    for (const auto& fact : mapped)
        if (const Fact* f = pack.network.find_fact(fact);
            !f || f->kind != FactKind::input)
            throw std::runtime_error("load_domain_pack: mapped fact " + fact +
                                     " is not a network input");

    pack.sample =
        load_dataset_file(data_dir + "/" + name + "_sample.csv", pack.column_map);
    if (pack.sample.rows_skipped != 0)
        throw std::runtime_error("load_domain_pack: sample CSV has skipped rows");
    return pack;
}

}  // namespace mles
