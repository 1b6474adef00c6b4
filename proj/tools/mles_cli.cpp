// mles command line tool.  Talks to the engine exclusively through the C API
// in mles/mles.h; machine-readable results go to stdout, diagnostics and the
// resolved configuration echo go to stderr.

#include <algorithm>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mles/mles.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvalid = 3;

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

int fail(const char* what) {
    std::fprintf(stderr, "error: %s: %s\n", what, mles_last_error());
    return kExitRuntime;
}

struct NetworkHandle {
    mles_network* ptr = nullptr;
    ~NetworkHandle() { mles_network_free(ptr); }
};
struct FactsHandle {
    mles_facts* ptr = nullptr;
    ~FactsHandle() { mles_facts_free(ptr); }
};
struct MapHandle {
    mles_column_map* ptr = nullptr;
    ~MapHandle() { mles_column_map_free(ptr); }
};
struct DatasetHandle {
    mles_dataset* ptr = nullptr;
    ~DatasetHandle() { mles_dataset_free(ptr); }
};

int cmd_validate(const std::string& network_path) {
    std::fprintf(stderr, "config: validate network=%s\n", network_path.c_str());
    NetworkHandle net;
    if (mles_network_from_file(network_path.c_str(), &net.ptr) != MLES_OK)
        return fail("load network");
    int valid = 0;
    char* report = nullptr;
    if (mles_network_validate(net.ptr, &valid, &report) != MLES_OK)
        return fail("validate");
    std::printf("%s", report);
    std::printf("%s\n", valid ? "valid" : "invalid");
    mles_string_free(report);
    return valid ? kExitOk : kExitInvalid;
}

int load_map_for_facts(const mles_facts* facts, MapHandle& map) {
    const char* map_path = mles_facts_map_path(facts);
    if (!map_path) return kExitOk;
    if (mles_column_map_from_file(map_path, &map.ptr) != MLES_OK)
        return fail("load column map");
    return kExitOk;
}

int print_explanation(const mles_network* net, const mles_facts* facts) {
    mles_explain_result* result = nullptr;
    if (mles_explain(net, facts, &result) != MLES_OK) return fail("explain");
    struct Row {
        std::string rule_id;
        double v1, v2, w1, out, path_weight;
    };
    std::vector<Row> rows;
    for (size_t i = 0; i < mles_explain_count(result); ++i) {
        Row row;
        const char* id = nullptr;
        mles_explain_entry(result, i, &id, &row.v1, &row.v2, &row.w1, &row.out,
                           &row.path_weight);
        row.rule_id = id;
        rows.push_back(std::move(row));
    }
    mles_explain_free(result);
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.path_weight != b.path_weight) return a.path_weight > b.path_weight;
        return a.rule_id < b.rule_id;
    });
    for (const auto& r : rows)
        std::printf("%s path_weight=%s w1=%s in1=%s in2=%s out=%s\n",
                    r.rule_id.c_str(), fixed6(r.path_weight).c_str(),
                    fixed6(r.w1).c_str(), fixed6(r.v1).c_str(),
                    fixed6(r.v2).c_str(), fixed6(r.out).c_str());
    return kExitOk;
}

int cmd_infer(const std::string& network_path, const std::string& facts_path,
              bool with_explain) {
    std::fprintf(stderr, "config: infer network=%s facts=%s explain=%s\n",
                 network_path.c_str(), facts_path.c_str(),
                 with_explain ? "true" : "false");
    NetworkHandle net;
    if (mles_network_from_file(network_path.c_str(), &net.ptr) != MLES_OK)
        return fail("load network");
    FactsHandle facts;
    if (mles_facts_from_file(facts_path.c_str(), &facts.ptr) != MLES_OK)
        return fail("load facts");
    double value = 0.0;
    if (mles_infer(net.ptr, facts.ptr, &value) != MLES_OK) return fail("infer");
    std::printf("%s\n", fixed6(value).c_str());

    MapHandle map;
    if (int rc = load_map_for_facts(facts.ptr, map); rc != kExitOk) return rc;
    if (map.ptr)
        std::printf("%s %s\n",
                    fixed6(value * mles_column_map_output_cap(map.ptr)).c_str(),
                    mles_column_map_output_unit(map.ptr));

    if (with_explain)
        if (int rc = print_explanation(net.ptr, facts.ptr); rc != kExitOk)
            return rc;
    return kExitOk;
}

int cmd_explain(const std::string& network_path,
                const std::string& facts_path) {
    std::fprintf(stderr, "config: explain network=%s facts=%s\n",
                 network_path.c_str(), facts_path.c_str());
    NetworkHandle net;
    if (mles_network_from_file(network_path.c_str(), &net.ptr) != MLES_OK)
        return fail("load network");
    FactsHandle facts;
    if (mles_facts_from_file(facts_path.c_str(), &facts.ptr) != MLES_OK)
        return fail("load facts");
    return print_explanation(net.ptr, facts.ptr);
}

void print_train_report(const mles_train_report* report) {
    std::printf("epochs_run %d\n", mles_train_report_epochs_run(report));
    std::printf("converged %s\n",
                mles_train_report_converged(report) ? "true" : "false");
    std::printf("initial_mae %s\n",
                fixed6(mles_train_report_initial_mae(report)).c_str());
    std::printf("initial_rmse %s\n",
                fixed6(mles_train_report_initial_rmse(report)).c_str());
    std::printf("final_mae %s\n",
                fixed6(mles_train_report_final_mae(report)).c_str());
    std::printf("final_rmse %s\n",
                fixed6(mles_train_report_final_rmse(report)).c_str());
    for (int e = 0; e < mles_train_report_epochs_run(report); ++e)
        std::printf("epoch %d mae %s\n", e + 1,
                    fixed6(mles_train_report_epoch_mae(report, e)).c_str());
}

int cmd_train(const std::string& network_path, const std::string& data_path,
              const std::string& map_path, const mles_train_config& config,
              const std::string& out_path) {
    std::fprintf(stderr,
                 "config: train network=%s data=%s map=%s velocity=%s "
                 "epochs=%d tolerance=%s seed=%llu out=%s\n",
                 network_path.c_str(), data_path.c_str(), map_path.c_str(),
                 fixed6(config.velocity).c_str(), config.epochs,
                 fixed6(config.error_tolerance).c_str(), config.shuffle_seed,
                 out_path.c_str());
    NetworkHandle net;
    if (mles_network_from_file(network_path.c_str(), &net.ptr) != MLES_OK)
        return fail("load network");
    MapHandle map;
    if (mles_column_map_from_file(map_path.c_str(), &map.ptr) != MLES_OK)
        return fail("load column map");
    DatasetHandle dataset;
    if (mles_dataset_from_csv_file(data_path.c_str(), map.ptr, &dataset.ptr) !=
        MLES_OK)
        return fail("load dataset");
    std::fprintf(stderr, "config: records=%zu skipped_rows=%zu\n",
                 mles_dataset_record_count(dataset.ptr),
                 mles_dataset_skipped_rows(dataset.ptr));

    mles_train_report* report = nullptr;
    if (mles_train(net.ptr, dataset.ptr, &config, &report) != MLES_OK)
        return fail("train");
    if (mles_network_to_file(net.ptr, out_path.c_str()) != MLES_OK) {
        mles_train_report_free(report);
        return fail("write trained network");
    }
    print_train_report(report);
    mles_train_report_free(report);
    return kExitOk;
}

int cmd_eval(const std::string& network_path, const std::string& data_path,
             const std::string& map_path) {
    std::fprintf(stderr, "config: eval network=%s data=%s map=%s\n",
                 network_path.c_str(), data_path.c_str(), map_path.c_str());
    NetworkHandle net;
    if (mles_network_from_file(network_path.c_str(), &net.ptr) != MLES_OK)
        return fail("load network");
    MapHandle map;
    if (mles_column_map_from_file(map_path.c_str(), &map.ptr) != MLES_OK)
        return fail("load column map");
    DatasetHandle dataset;
    if (mles_dataset_from_csv_file(data_path.c_str(), map.ptr, &dataset.ptr) !=
        MLES_OK)
        return fail("load dataset");

    double mae = 0.0, rmse = 0.0;
    if (mles_evaluate(net.ptr, dataset.ptr, &mae, &rmse) != MLES_OK)
        return fail("evaluate");
    double cap = mles_column_map_output_cap(map.ptr);
    const char* unit = mles_column_map_output_unit(map.ptr);
    std::printf("mae %s\n", fixed6(mae).c_str());
    std::printf("rmse %s\n", fixed6(rmse).c_str());
    std::printf("mae %s %s\n", fixed6(mae * cap).c_str(), unit);
    std::printf("rmse %s %s\n", fixed6(rmse * cap).c_str(), unit);
    return kExitOk;
}

int cmd_synth(int rules, int records, const mles_train_config& config,
              double train_fraction, int seeds,
              unsigned long long seed_base, const std::string& report_path) {
    std::fprintf(stderr,
                 "config: synth rules=%d records=%d velocity=%s epochs=%d "
                 "tolerance=%s train_fraction=%s seeds=%d seed_base=%llu\n",
                 rules, records, fixed6(config.velocity).c_str(), config.epochs,
                 fixed6(config.error_tolerance).c_str(),
                 fixed6(train_fraction).c_str(), seeds, seed_base);

    std::vector<mles_recovery_row> rows;
    for (int s = 0; s < seeds; ++s) {
        mles_recovery_row row;
        if (mles_recovery_experiment(rules, records, train_fraction,
                                     seed_base + static_cast<unsigned long long>(s),
                                     &config, &row) != MLES_OK)
            return fail("recovery experiment");
        rows.push_back(row);
    }

    double ratio_sum = 0.0;
    int improved = 0;
    for (const auto& row : rows) {
        std::printf("seed %llu untrained_mae %s trained_mae %s ratio %s\n",
                    row.seed, fixed6(row.untrained_mae).c_str(),
                    fixed6(row.trained_mae).c_str(),
                    fixed6(row.improvement_ratio).c_str());
        ratio_sum += row.improvement_ratio;
        if (row.trained_mae <= row.untrained_mae) ++improved;
    }
    std::printf("seeds %d improved %d mean_ratio %s\n", seeds, improved,
                fixed6(ratio_sum / static_cast<double>(seeds)).c_str());

    if (!report_path.empty()) {
        std::FILE* out = std::fopen(report_path.c_str(), "wb");
        if (!out) {
            std::fprintf(stderr, "error: cannot write %s\n",
                         report_path.c_str());
            return kExitRuntime;
        }
        std::fprintf(out,
                     "seed,rule_count,train_records,holdout_records,"
                     "untrained_mae,trained_mae,improvement_ratio,epochs_run\n");
        for (const auto& row : rows)
            std::fprintf(out, "%llu,%d,%d,%d,%s,%s,%s,%d\n", row.seed,
                         row.rule_count, row.train_records,
                         row.holdout_records, fixed6(row.untrained_mae).c_str(),
                         fixed6(row.trained_mae).c_str(),
                         fixed6(row.improvement_ratio).c_str(), row.epochs_run);
        std::fclose(out);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MLES rule-fact network tool"};
    app.require_subcommand(1);

    std::string network_path, facts_path, data_path, map_path, out_path;
    std::string report_path;
    bool with_explain = false;
    mles_train_config config;
    mles_train_config_default(&config);
    int rules = 20, records = 500, seeds = 1;
    unsigned long long seed_base = 0;
    double train_fraction = 0.8;

    auto* validate = app.add_subcommand("validate", "check a network file");
    validate->add_option("--network", network_path)->required();

    auto* infer = app.add_subcommand("infer", "evaluate a network on a facts file");
    infer->add_option("--network", network_path)->required();
    infer->add_option("--facts", facts_path)->required();
    infer->add_flag("--explain", with_explain);

    auto* train = app.add_subcommand("train", "train rule weights from a CSV");
    train->add_option("--network", network_path)->required();
    train->add_option("--data", data_path)->required();
    train->add_option("--map", map_path)->required();
    train->add_option("--velocity", config.velocity)->required();
    train->add_option("--epochs", config.epochs)->required();
    train->add_option("--tolerance", config.error_tolerance);
    train->add_option("--seed", config.shuffle_seed);
    train->add_option("--out", out_path)->required();

    auto* eval = app.add_subcommand("eval", "report MAE/RMSE on a CSV");
    eval->add_option("--network", network_path)->required();
    eval->add_option("--data", data_path)->required();
    eval->add_option("--map", map_path)->required();

    auto* explain = app.add_subcommand("explain", "contribution breakdown");
    explain->add_option("--network", network_path)->required();
    explain->add_option("--facts", facts_path)->required();

    auto* synth = app.add_subcommand("synth", "perfect-system recovery runs");
    synth->add_option("--rules", rules);
    synth->add_option("--records", records);
    synth->add_option("--velocity", config.velocity);
    synth->add_option("--epochs", config.epochs);
    synth->add_option("--tolerance", config.error_tolerance);
    synth->add_option("--train-fraction", train_fraction);
    synth->add_option("--seeds", seeds);
    synth->add_option("--seed-base", seed_base);
    synth->add_option("--report", report_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        std::fprintf(stderr, "%s", app.help().c_str());
        return kExitUsage;
    }

    if (validate->parsed()) return cmd_validate(network_path);
    if (infer->parsed()) return cmd_infer(network_path, facts_path, with_explain);
    if (train->parsed())
        return cmd_train(network_path, data_path, map_path, config, out_path);
    if (eval->parsed()) return cmd_eval(network_path, data_path, map_path);
    if (explain->parsed()) return cmd_explain(network_path, facts_path);
    if (synth->parsed())
        return cmd_synth(rules, records, config, train_fraction, seeds,
                         seed_base, report_path);
    return kExitUsage;
}
