#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mles/core.hpp"

// Velocity-scaled training of rule weights.  The network structure is never
// modified; only w1 values move.  Error correction is distributed to
// contributing rules by weight-product backpropagation: the target's producer
// receives the full difference D = expected - actual, and a rule producing
// fact f receives the sum over consuming rules r of delta(r) times the weight
// r applies to f.

namespace mles {

struct TrainConfig {
    double velocity = 0.1;        // per-step correction scale, (0,1]
    int epochs = 50;              // hard cap, >= 1
    double error_tolerance = 0.0; // stop when epoch mean |error| below this
    std::uint64_t shuffle_seed = 0;
    double max_weight_step = -1.0; // cap on |dw1| per step; <0 means velocity

    void check() const;  // throws std::invalid_argument
    double weight_step_cap() const {
        return max_weight_step < 0.0 ? velocity : max_weight_step;
    }
};

struct TrainingRecord {
    FactValues inputs;
    double expected = 0.0;
};

struct TrainReport {
    int epochs_run = 0;
    std::vector<double> epoch_mae;  // mean |error_before| per epoch
    double initial_mae = 0.0;
    double initial_rmse = 0.0;
    double final_mae = 0.0;
    double final_rmse = 0.0;
    bool converged = false;
};

struct StepResult {
    double error_before = 0.0;
    double error_after = 0.0;
};

struct Metrics {
    double mae = 0.0;
    double rmse = 0.0;
    std::vector<double> residuals;  // expected - actual, per record
};

// Delta per contributing rule for a signed target error `difference`.
// Rules outside the contributing set are absent from the map.
std::map<std::string, double> backpropagate_deltas(const Network& net,
                                                   const InferenceTrace& trace,
                                                   double difference);

// One rule's weight update from its resolved input values.  No-op when the
// rule is insensitive (|v1-v2| <= 1e-9) or not trainable.
void apply_update(Rule& rule, double v1, double v2, double delta,
                  const TrainConfig& config);

StepResult train_step(Network& net, const TrainingRecord& record,
                      const TrainConfig& config);

TrainReport train(Network& net, std::span<const TrainingRecord> dataset,
                  const TrainConfig& config);

Metrics evaluate_metrics(const Network& net,
                         std::span<const TrainingRecord> dataset);

}  // namespace mles
