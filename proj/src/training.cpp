#include "mles/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mles {

namespace {

constexpr double kInsensitiveEpsilon = 1e-9;

void check_record(const Network& net, const TrainingRecord& record) {
    if (record.expected < 0.0 || record.expected > 1.0)
        throw std::domain_error("training record: expected value out of [0,1]");
    for (const auto& id : net.input_fact_ids())
        if (!record.inputs.count(id))
            throw std::runtime_error("training record: missing input fact " + id);
}

// Fisher-Yates with mt19937_64; std::shuffle is implementation-defined, this
// keeps record order identical across standard libraries.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i)
        std::swap(idx[i - 1], idx[rng() % i]);
    return idx;
}

}  // namespace

void TrainConfig::check() const {
    if (!(velocity > 0.0 && velocity <= 1.0))
        throw std::invalid_argument("TrainConfig: velocity must be in (0,1]");
    if (epochs < 1)
        throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (error_tolerance < 0.0)
        throw std::invalid_argument("TrainConfig: error_tolerance must be >= 0");
    if (max_weight_step >= 0.0 &&
        !(max_weight_step > 0.0 && max_weight_step <= 1.0))
        throw std::invalid_argument("TrainConfig: max_weight_step must be in (0,1]");
}

std::map<std::string, double> backpropagate_deltas(const Network& net,
                                                   const InferenceTrace& trace,
                                                   double difference) {
    std::map<std::string, double> fact_delta;
    std::map<std::string, double> rule_delta;
    fact_delta[net.target()] = difference;

    // reverse topological order: consumers are settled before producers
    for (auto it = trace.rule_order.rbegin(); it != trace.rule_order.rend();
         ++it) {
        const Rule* r = net.find_rule(*it);
        if (!r || !trace.values.count(r->out))
            throw std::runtime_error(
                "backpropagate_deltas: trace does not match network");
        double d = fact_delta[r->out];
        rule_delta[r->id] = d;
        fact_delta[r->in1] += d * r->w1;
        fact_delta[r->in2] += d * r->w2();
    }
    return rule_delta;
}

void apply_update(Rule& rule, double v1, double v2, double delta,
                  const TrainConfig& config) {
    if (!rule.trainable) return;
    double spread = v1 - v2;
    if (std::abs(spread) <= kInsensitiveEpsilon) return;  // output insensitive
    double cap = config.weight_step_cap();
    double step = std::clamp(config.velocity * delta / spread, -cap, cap);
    rule.w1 = std::clamp(rule.w1 + step, 0.0, 1.0);
}

StepResult train_step(Network& net, const TrainingRecord& record,
                      const TrainConfig& config) {
    config.check();
    check_record(net, record);

    auto before = infer(net, record.inputs);
    StepResult result;
    result.error_before = record.expected - before.value;
    if (std::abs(result.error_before) <= config.error_tolerance) {
        result.error_after = result.error_before;
        return result;
    }

    auto deltas = backpropagate_deltas(net, before.trace, result.error_before);
    // all updates use the pre-update trace values, one consistent snapshot
    for (const auto& [rule_id, delta] : deltas) {
        const Rule* r = net.find_rule(rule_id);
        Rule updated = *r;
        apply_update(updated, before.trace.values.at(r->in1),
                     before.trace.values.at(r->in2), delta, config);
        if (updated.w1 != r->w1) net.set_weight(rule_id, updated.w1);
    }

    result.error_after = record.expected - infer(net, record.inputs).value;
    return result;
}

TrainReport train(Network& net, std::span<const TrainingRecord> dataset,
                  const TrainConfig& config) {
    config.check();
    if (dataset.empty())
        throw std::invalid_argument("train: dataset is empty");
    for (const auto& record : dataset) check_record(net, record);

    TrainReport report;
    {
        auto m = evaluate_metrics(net, dataset);
        report.initial_mae = m.mae;
        report.initial_rmse = m.rmse;
    }

    std::mt19937_64 rng(config.shuffle_seed);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        auto order = shuffled_indices(dataset.size(), rng);
        double abs_error_sum = 0.0;
        for (std::size_t i : order) {
            auto step = train_step(net, dataset[i], config);
            abs_error_sum += std::abs(step.error_before);
        }
        double epoch_mae = abs_error_sum / static_cast<double>(dataset.size());
        report.epoch_mae.push_back(epoch_mae);
        report.epochs_run = epoch + 1;
        if (epoch_mae < config.error_tolerance) {
            report.converged = true;
            break;
        }
    }

    auto m = evaluate_metrics(net, dataset);
    report.final_mae = m.mae;
    report.final_rmse = m.rmse;
    return report;
}

Metrics evaluate_metrics(const Network& net,
                         std::span<const TrainingRecord> dataset) {
    if (dataset.empty())
        throw std::invalid_argument("evaluate_metrics: dataset is empty");
    Metrics m;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (const auto& record : dataset) {
        check_record(net, record);
        double residual = record.expected - infer(net, record.inputs).value;
        m.residuals.push_back(residual);
        abs_sum += std::abs(residual);
        sq_sum += residual * residual;
    }
    auto n = static_cast<double>(dataset.size());
    m.mae = abs_sum / n;
    m.rmse = std::sqrt(sq_sum / n);
    return m;
}

}  // namespace mles
