#include "mles/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mles {

namespace {

std::string numbered(const char* prefix, int n) {
    return std::string(prefix) + std::to_string(n);
}

double uniform_unit(std::mt19937_64& rng) {
    // 53-bit mantissa draw, identical across platforms
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void SynthConfig::check() const {
    if (rule_count < 1)
        throw std::invalid_argument("SynthConfig: rule_count must be >= 1");
    if (record_count < 2)
        throw std::invalid_argument("SynthConfig: record_count must be >= 2");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument(
            "SynthConfig: train_fraction must be in (0,1)");
    train.check();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over seed + stream offset
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Network generate_random_network(int rule_count, std::uint64_t seed) {
    if (rule_count < 1)
        throw std::invalid_argument(
            "generate_random_network: rule_count must be >= 1");
    std::mt19937_64 rng(seed);

    std::vector<Fact> facts;
    std::vector<Rule> rules;
    std::vector<std::string> frontier;   // facts not yet consumed by any rule
    std::vector<std::string> all_ids;    // every fact, for fan-out reuse
    int input_count = 0;
    int process_count = 0;

    auto fresh_input = [&] {
        std::string id = numbered("IN", ++input_count);
        facts.push_back({id, FactKind::input});
        all_ids.push_back(id);
        return id;
    };
    auto take_frontier = [&] {
        std::size_t i = rng() % frontier.size();
        std::string id = frontier[i];
        frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(i));
        return id;
    };

    for (int r = 1; r <= rule_count; ++r) {
        int remaining = rule_count - r;  // rules after this one
        std::string in1, in2;

        // must shrink the frontier whenever it could not otherwise collapse
        // to a single sink by the last rule
        bool force_both = static_cast<int>(frontier.size()) > remaining;
        if (frontier.empty()) {
            in1 = fresh_input();
        } else {
            in1 = take_frontier();
        }
        if (force_both && !frontier.empty()) {
            in2 = take_frontier();
        } else {
            // mix of frontier consumption, fresh inputs and fan-out reuse
            std::uint64_t roll = rng() % 4;
            if (roll == 0 && !frontier.empty()) {
                in2 = take_frontier();
            } else if (roll == 1 && all_ids.size() > 1) {
                // reuse an already known fact (fan-out); never equal to in1
                std::string pick;
                do {
                    pick = all_ids[rng() % all_ids.size()];
                } while (pick == in1);
                in2 = pick;
            } else {
                in2 = fresh_input();
            }
        }

        bool last = r == rule_count;
        std::string out =
            last ? std::string("TARGET") : numbered("PROC", ++process_count);
        facts.push_back({out, last ? FactKind::output : FactKind::intermediate});
        all_ids.push_back(out);
        frontier.push_back(out);

        Rule rule;
        rule.id = numbered("R", r);
        rule.in1 = in1;
        rule.in2 = in2;
        rule.out = out;
        rule.w1 = uniform_unit(rng);
        rules.push_back(std::move(rule));
    }

    return Network(std::move(facts), std::move(rules), "TARGET");
}

Dataset generate_dataset(const Network& oracle, int record_count,
                         std::uint64_t seed) {
    if (record_count < 1)
        throw std::invalid_argument(
            "generate_dataset: record_count must be >= 1");
    {
        auto report = validate(oracle);
        if (!report.ok())
            throw std::invalid_argument("generate_dataset: invalid oracle:\n" +
                                        report.to_string());
    }
    std::mt19937_64 rng(seed);
    auto input_ids = oracle.input_fact_ids();
    std::sort(input_ids.begin(), input_ids.end());  // pinned draw order

    Dataset dataset;
    dataset.source = "<synthetic>";
    for (int i = 0; i < record_count; ++i) {
        TrainingRecord record;
        for (const auto& id : input_ids) record.inputs[id] = uniform_unit(rng);
        record.expected = infer(oracle, record.inputs).value;
        dataset.records.push_back(std::move(record));
    }
    dataset.rows_read = dataset.records.size();
    return dataset;
}

RecoveryReport recovery_experiment(const SynthConfig& config) {
    config.check();
    Network oracle =
        generate_random_network(config.rule_count, derive_seed(config.seed, 0));
    return recovery_experiment(config, oracle);
}

RecoveryReport recovery_experiment(const SynthConfig& config,
                                   const Network& oracle) {
    config.check();
    Dataset dataset =
        generate_dataset(oracle, config.record_count, derive_seed(config.seed, 1));

    auto split = static_cast<std::size_t>(
        std::floor(config.train_fraction *
                   static_cast<double>(dataset.records.size())));
    if (split == 0 || split >= dataset.records.size())
        throw std::invalid_argument(
            "recovery_experiment: degenerate train/holdout split");
    std::span<const TrainingRecord> train_split(dataset.records.data(), split);
    std::span<const TrainingRecord> holdout(dataset.records.data() + split,
                                            dataset.records.size() - split);

    // same structure, neutral weights; the hidden oracle weights are the
    // quantity to be recovered
    Network student = oracle;
    for (const auto& rule : oracle.rules()) student.set_weight(rule.id, 0.5);

    RecoveryReport report;
    report.seed = config.seed;
    report.rule_count = static_cast<int>(oracle.rules().size());
    report.train_records = static_cast<int>(train_split.size());
    report.holdout_records = static_cast<int>(holdout.size());
    report.untrained_mae = evaluate_metrics(student, holdout).mae;

    auto train_report = train(student, train_split, config.train);
    report.epochs_run = train_report.epochs_run;
    report.trained_mae = evaluate_metrics(student, holdout).mae;
    report.improvement_ratio = report.untrained_mae == 0.0
                                   ? 0.0
                                   : report.trained_mae / report.untrained_mae;
    return report;
}

}  // namespace mles
