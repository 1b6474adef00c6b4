#pragma once

// Test-only oracles, independent of the engine's evaluation path.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "mles/core.hpp"

namespace mles::testing {

// Naive memoized recursion from the target; the reference for infer().
inline double naive_eval(const Network& net, const FactValues& inputs,
                         const std::string& fact,
                         std::map<std::string, double>& memo) {
    if (auto it = memo.find(fact); it != memo.end()) return it->second;
    const Rule* producer = net.producer(fact);
    double value;
    if (!producer) {
        value = inputs.at(fact);
    } else {
        double v1 = naive_eval(net, inputs, producer->in1, memo);
        double v2 = naive_eval(net, inputs, producer->in2, memo);
        value = producer->w1 * v1 + (1.0 - producer->w1) * v2;
    }
    memo[fact] = value;
    return value;
}

inline double naive_eval(const Network& net, const FactValues& inputs,
                         const std::string& fact) {
    std::map<std::string, double> memo;
    return naive_eval(net, inputs, fact, memo);
}

// Path-weight oracle: explicit enumeration of every directed path from
// `fact` to `target`, summing products of slot weights along each path.
inline double path_weight_by_enumeration(const Network& net,
                                         const std::string& fact,
                                         const std::string& target) {
    if (fact == target) return 1.0;
    double total = 0.0;
    for (const auto& rule : net.rules()) {
        if (rule.in1 == fact)
            total += rule.w1 * path_weight_by_enumeration(net, rule.out, target);
        if (rule.in2 == fact)
            total += rule.w2() * path_weight_by_enumeration(net, rule.out, target);
    }
    return total;
}

// Small fixed networks used across suites.
inline Network single_rule_network(double w1 = 0.5) {
    return Network({{"A", FactKind::input},
                    {"B", FactKind::input},
                    {"C", FactKind::output}},
                   {{"R1", "A", "B", "C", w1, true}}, "C");
}

// R1: A,B -> P;  R2: P,C -> T
inline Network chain_network(double w1_r1 = 0.5, double w1_r2 = 0.5) {
    return Network({{"A", FactKind::input},
                    {"B", FactKind::input},
                    {"C", FactKind::input},
                    {"P", FactKind::intermediate},
                    {"T", FactKind::output}},
                   {{"R1", "A", "B", "P", w1_r1, true},
                    {"R2", "P", "C", "T", w1_r2, true}},
                   "T");
}

// R1: A,B -> P;  R2: C,D -> Q;  R3: P,Q -> T
inline Network diamond_network(double w1_r3 = 0.6) {
    return Network({{"A", FactKind::input},
                    {"B", FactKind::input},
                    {"C", FactKind::input},
                    {"D", FactKind::input},
                    {"P", FactKind::intermediate},
                    {"Q", FactKind::intermediate},
                    {"T", FactKind::output}},
                   {{"R1", "A", "B", "P", 0.5, true},
                    {"R2", "C", "D", "Q", 0.5, true},
                    {"R3", "P", "Q", "T", w1_r3, true}},
                   "T");
}

inline FactValues random_inputs(const Network& net, std::mt19937_64& rng) {
    FactValues inputs;
    for (const auto& id : net.input_fact_ids())
        inputs[id] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return inputs;
}

}  // namespace mles::testing
