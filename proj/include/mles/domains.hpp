#pragma once

#include <string>

#include "mles/ingest.hpp"
#include "mles/netdef.hpp"

// The two shipped rule-fact networks: federal sentencing recommendation and
// patentability assessment.  The canonical network texts are embedded here;
// the files under data/ are generated from the same texts and a test keeps
// them in sync.

namespace mles {

struct DomainPack {
    std::string name;
    Network network;
    ColumnMap column_map;
    Dataset sample;  // loaded from the pack's sample CSV
};

// 22 input facts in two branches (offense level, criminal history) that stay
// separate until the final rule merges them into SENTENCE.
Network sentencing_network();

// 10 input facts in four branches (domestic public prior art, domestic
// private prior art, foreign prior art, development difficulty) chaining
// into PATENTABILITY.  Inputs encode patentability-favoring polarity:
// 1 favors patentability (e.g. absence of disclosure).
Network patentability_network();

const std::string& sentencing_network_text();
const std::string& patentability_network_text();
const std::string& sentencing_column_map_text();
const std::string& patentability_column_map_text();

// name is "sentencing" or "patentability"; data_dir holds the pack's files
// (<name>.mles, <name>.mlesmap, <name>_sample.csv).  Throws on unknown name
// or any cross-validation failure.
DomainPack load_domain_pack(const std::string& name,
                            const std::string& data_dir);

}  // namespace mles
