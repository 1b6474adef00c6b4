#include "mles/mles.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <variant>

#include "mles/domains.hpp"
#include "mles/ingest.hpp"
#include "mles/netdef.hpp"
#include "mles/synth.hpp"
#include "mles/training.hpp"

// Thin extern-C shell over the C++ library.  Handles own their C++ objects;
// every entry point catches and converts exceptions into status codes plus a
// thread-local message.

struct mles_network {
    std::string name;
    mles::Network net;
};

struct mles_facts {
    mles::FactValues values;
    std::string map_path;  // empty when absent
};

struct mles_column_map {
    mles::ColumnMap map;
};

struct mles_dataset {
    mles::Dataset data;
};

struct mles_explain_result {
    std::vector<mles::Contribution> contributions;
};

struct mles_train_report {
    mles::TrainReport report;
};

namespace {

thread_local std::string g_last_error;

mles_status set_error(mles_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

std::string join_errors(const std::vector<mles::ParseError>& errors) {
    std::ostringstream out;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (i) out << "\n";
        out << mles::to_string(errors[i]);
    }
    return out.str();
}

// maps C++ exceptions to status codes around each API body
template <typename Fn>
mles_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return set_error(MLES_ERR_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return set_error(MLES_ERR_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return set_error(MLES_ERR_RUNTIME, e.what());
    } catch (...) {
        return set_error(MLES_ERR_RUNTIME, "unknown error");
    }
}

mles_status read_file(const char* path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return set_error(MLES_ERR_IO,
                         std::string("cannot open ") + (path ? path : "(null)"));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    out = buffer.str();
    return MLES_OK;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

mles::TrainConfig to_cpp(const mles_train_config* config) {
    mles::TrainConfig out;
    if (config) {
        out.velocity = config->velocity;
        out.epochs = config->epochs;
        out.error_tolerance = config->error_tolerance;
        out.shuffle_seed = config->shuffle_seed;
        out.max_weight_step = config->max_weight_step;
    }
    return out;
}

}  // namespace

extern "C" {

const char* mles_last_error(void) { return g_last_error.c_str(); }

void mles_string_free(char* s) { delete[] s; }

mles_status mles_network_from_string(const char* text, mles_network** out) {
    if (!text || !out) return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto result = mles::parse_network(text);
        if (auto* errors = std::get_if<std::vector<mles::ParseError>>(&result))
            return set_error(MLES_ERR_PARSE, join_errors(*errors));
        auto& parsed = std::get<mles::ParsedNetwork>(result);
        *out = new mles_network{parsed.name, std::move(parsed.network)};
        return MLES_OK;
    });
}

mles_status mles_network_from_file(const char* path, mles_network** out) {
    std::string text;
    if (auto status = read_file(path, text); status != MLES_OK) return status;
    return mles_network_from_string(text.c_str(), out);
}

void mles_network_free(mles_network* net) { delete net; }

mles_status mles_network_to_string(const mles_network* net, char** out) {
    if (!net || !out) return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = copy_string(mles::serialize_network(net->net, net->name));
        return MLES_OK;
    });
}

mles_status mles_network_to_file(const mles_network* net, const char* path) {
    if (!net || !path) return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        std::string text = mles::serialize_network(net->net, net->name);
        std::ofstream file(path, std::ios::binary);
        if (!file || !(file << text).flush())
            return set_error(MLES_ERR_IO, std::string("cannot write ") + path);
        return MLES_OK;
    });
}

mles_status mles_network_validate(const mles_network* net, int* valid,
                                  char** report) {
    if (!net) return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto r = mles::validate(net->net);
        if (valid) *valid = r.ok() ? 1 : 0;
        if (report) *report = copy_string(r.to_string());
        return MLES_OK;
    });
}

size_t mles_network_input_count(const mles_network* net) {
    return net ? net->net.input_fact_ids().size() : 0;
}

mles_status mles_network_target(const mles_network* net, char** out) {
    if (!net || !out) return set_error(MLES_ERR_ARGUMENT, "null argument");
    *out = copy_string(net->net.target());
    return MLES_OK;
}

mles_status mles_network_builtin(const char* name, mles_network** out) {
    if (!name || !out) return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        std::string n = name;
        if (n == "sentencing")
            *out = new mles_network{n, mles::sentencing_network()};
        else if (n == "patentability")
            *out = new mles_network{n, mles::patentability_network()};
        else
            return set_error(MLES_ERR_ARGUMENT,
                             "unknown builtin network '" + n + "'");
        return MLES_OK;
    });
}

mles_status mles_facts_from_string(const char* text, mles_facts** out) {
    if (!text || !out) return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto result = mles::parse_facts_file(text);
        if (auto* errors = std::get_if<std::vector<mles::ParseError>>(&result))
            return set_error(MLES_ERR_PARSE, join_errors(*errors));
        auto& facts = std::get<mles::FactsFile>(result);
        *out = new mles_facts{std::move(facts.values),
                              facts.map_path.value_or("")};
        return MLES_OK;
    });
}

mles_status mles_facts_from_file(const char* path, mles_facts** out) {
    std::string text;
    if (auto status = read_file(path, text); status != MLES_OK) return status;
    return mles_facts_from_string(text.c_str(), out);
}

mles_status mles_facts_set(mles_facts* facts, const char* fact_id,
                           double value) {
    if (!facts || !fact_id) return set_error(MLES_ERR_ARGUMENT, "null argument");
    if (value < 0.0 || value > 1.0)
        return set_error(MLES_ERR_ARGUMENT, "fact value out of [0,1]");
    facts->values[fact_id] = value;
    return MLES_OK;
}

const char* mles_facts_map_path(const mles_facts* facts) {
    if (!facts || facts->map_path.empty()) return nullptr;
    return facts->map_path.c_str();
}

void mles_facts_free(mles_facts* facts) { delete facts; }

mles_status mles_infer(const mles_network* net, const mles_facts* facts,
                       double* value) {
    if (!net || !facts || !value)
        return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *value = mles::infer(net->net, facts->values).value;
        return MLES_OK;
    });
}

mles_status mles_explain(const mles_network* net, const mles_facts* facts,
                         mles_explain_result** out) {
    if (!net || !facts || !out)
        return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new mles_explain_result{mles::explain(net->net, facts->values)};
        return MLES_OK;
    });
}

size_t mles_explain_count(const mles_explain_result* result) {
    return result ? result->contributions.size() : 0;
}

mles_status mles_explain_entry(const mles_explain_result* result, size_t index,
                               const char** rule_id, double* input1,
                               double* input2, double* weight1, double* output,
                               double* path_weight) {
    if (!result || index >= result->contributions.size())
        return set_error(MLES_ERR_ARGUMENT, "explain entry out of range");
    const auto& c = result->contributions[index];
    if (rule_id) *rule_id = c.rule_id.c_str();
    if (input1) *input1 = c.v1;
    if (input2) *input2 = c.v2;
    if (weight1) *weight1 = c.w1;
    if (output) *output = c.output;
    if (path_weight) *path_weight = c.path_weight;
    return MLES_OK;
}

void mles_explain_free(mles_explain_result* result) { delete result; }

mles_status mles_column_map_from_string(const char* text,
                                        mles_column_map** out) {
    if (!text || !out) return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto result = mles::parse_column_map(text);
        if (auto* errors = std::get_if<std::vector<mles::ParseError>>(&result))
            return set_error(MLES_ERR_PARSE, join_errors(*errors));
        *out = new mles_column_map{std::get<mles::ColumnMap>(result)};
        return MLES_OK;
    });
}

mles_status mles_column_map_from_file(const char* path,
                                      mles_column_map** out) {
    std::string text;
    if (auto status = read_file(path, text); status != MLES_OK) return status;
    return mles_column_map_from_string(text.c_str(), out);
}

double mles_column_map_output_cap(const mles_column_map* map) {
    return map ? map->map.output_scale.cap : 0.0;
}

const char* mles_column_map_output_unit(const mles_column_map* map) {
    return map ? map->map.output_scale.unit.c_str() : nullptr;
}

void mles_column_map_free(mles_column_map* map) { delete map; }

mles_status mles_dataset_from_csv_file(const char* path,
                                       const mles_column_map* map,
                                       mles_dataset** out) {
    if (!path || !map || !out)
        return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new mles_dataset{mles::load_dataset_file(path, map->map)};
        return MLES_OK;
    });
}

size_t mles_dataset_record_count(const mles_dataset* dataset) {
    return dataset ? dataset->data.records.size() : 0;
}

size_t mles_dataset_skipped_rows(const mles_dataset* dataset) {
    return dataset ? dataset->data.rows_skipped : 0;
}

void mles_dataset_free(mles_dataset* dataset) { delete dataset; }

void mles_train_config_default(mles_train_config* config) {
    if (!config) return;
    mles::TrainConfig defaults;
    config->velocity = defaults.velocity;
    config->epochs = defaults.epochs;
    config->error_tolerance = defaults.error_tolerance;
    config->shuffle_seed = defaults.shuffle_seed;
    config->max_weight_step = defaults.max_weight_step;
}

mles_status mles_train(mles_network* net, const mles_dataset* dataset,
                       const mles_train_config* config,
                       mles_train_report** out) {
    if (!net || !dataset || !config)
        return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto report =
            mles::train(net->net, dataset->data.records, to_cpp(config));
        if (out) *out = new mles_train_report{std::move(report)};
        return MLES_OK;
    });
}

int mles_train_report_epochs_run(const mles_train_report* report) {
    return report ? report->report.epochs_run : 0;
}

int mles_train_report_converged(const mles_train_report* report) {
    return report && report->report.converged ? 1 : 0;
}

double mles_train_report_epoch_mae(const mles_train_report* report,
                                   int epoch) {
    if (!report || epoch < 0 ||
        epoch >= static_cast<int>(report->report.epoch_mae.size()))
        return -1.0;
    return report->report.epoch_mae[static_cast<std::size_t>(epoch)];
}

double mles_train_report_initial_mae(const mles_train_report* report) {
    return report ? report->report.initial_mae : -1.0;
}

double mles_train_report_initial_rmse(const mles_train_report* report) {
    return report ? report->report.initial_rmse : -1.0;
}

double mles_train_report_final_mae(const mles_train_report* report) {
    return report ? report->report.final_mae : -1.0;
}

double mles_train_report_final_rmse(const mles_train_report* report) {
    return report ? report->report.final_rmse : -1.0;
}

void mles_train_report_free(mles_train_report* report) { delete report; }

mles_status mles_evaluate(const mles_network* net, const mles_dataset* dataset,
                          double* mae, double* rmse) {
    if (!net || !dataset) return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto m = mles::evaluate_metrics(net->net, dataset->data.records);
        if (mae) *mae = m.mae;
        if (rmse) *rmse = m.rmse;
        return MLES_OK;
    });
}

mles_status mles_recovery_experiment(int rule_count, int record_count,
                                     double train_fraction,
                                     unsigned long long seed,
                                     const mles_train_config* train,
                                     mles_recovery_row* out) {
    if (!out) return set_error(MLES_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        mles::SynthConfig config;
        config.rule_count = rule_count;
        config.record_count = record_count;
        config.train_fraction = train_fraction;
        config.seed = seed;
        config.train = to_cpp(train);
        auto report = mles::recovery_experiment(config);
        out->seed = report.seed;
        out->rule_count = report.rule_count;
        out->train_records = report.train_records;
        out->holdout_records = report.holdout_records;
        out->untrained_mae = report.untrained_mae;
        out->trained_mae = report.trained_mae;
        out->improvement_ratio = report.improvement_ratio;
        out->epochs_run = report.epochs_run;
        return MLES_OK;
    });
}

}  // extern "C"
