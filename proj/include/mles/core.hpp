#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

// Rule-fact network engine: facts hold values in [0,1], rules combine two
// input facts into one output fact with a convex combination.  The combiner
// out = w1*v1 + (1-w1)*v2 is the unique two-weight form that keeps values in
// [0,1] under the sum-to-1 weight constraint; all training math in
// training.hpp depends on it.

namespace mles {

enum class FactKind { input, intermediate, output };

struct Fact {
    std::string id;
    FactKind kind = FactKind::input;
};

struct Rule {
    std::string id;
    std::string in1;
    std::string in2;
    std::string out;
    double w1 = 0.5;
    bool trainable = true;

    double w2() const { return 1.0 - w1; }
};

// Structural problems found by validate().  `subject` names the offending
// fact or rule id.
enum class ViolationKind {
    cycle,
    duplicate_producer,
    dangling_reference,
    weight_bound,
    missing_target,
    ambiguous_target,
    bad_kind,
    duplicate_id,
};

struct Violation {
    ViolationKind kind;
    std::string subject;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> errors;
    std::vector<Violation> warnings;  // e.g. unreferenced facts

    bool ok() const { return errors.empty(); }
    std::string to_string() const;
};

class Network {
public:
    Network() = default;
    Network(std::vector<Fact> facts, std::vector<Rule> rules, std::string target);

    const std::vector<Fact>& facts() const { return facts_; }
    const std::vector<Rule>& rules() const { return rules_; }
    const std::string& target() const { return target_; }

    const Fact* find_fact(const std::string& id) const;
    const Rule* find_rule(const std::string& id) const;
    // Producing rule of a fact, or nullptr for input facts.
    const Rule* producer(const std::string& fact_id) const;

    std::vector<std::string> input_fact_ids() const;

    // Weight mutation keeps wiring fixed; used by training.
    void set_weight(const std::string& rule_id, double w1);

private:
    std::vector<Fact> facts_;
    std::vector<Rule> rules_;
    std::string target_;
    std::map<std::string, std::size_t> fact_index_;
    std::map<std::string, std::size_t> rule_index_;
    std::map<std::string, std::size_t> producer_index_;  // fact id -> rule idx

    void rebuild_indexes();
};

using FactValues = std::map<std::string, double>;

struct InferenceTrace {
    std::vector<std::string> rule_order;  // topological, ties by rule id
    FactValues values;                    // every resolved fact in the closure
};

struct InferenceResult {
    double value = 0.0;
    InferenceTrace trace;
};

// One contributing rule's share of the target, as reported by explain().
// path_weight is the sum over all directed paths from the rule's output fact
// to the target of the product of downstream slot weights; 1 for the
// target's own producer.
struct Contribution {
    std::string rule_id;
    double v1 = 0.0;
    double v2 = 0.0;
    double w1 = 0.0;
    double output = 0.0;
    double path_weight = 0.0;
};

// out = w1*v1 + (1-w1)*v2.  Throws std::domain_error on out-of-range args.
double evaluate_rule(double w1, double v1, double v2);

ValidationReport validate(const Network& net);

// Evaluates exactly the rules in the backward closure of `target`, in
// topological order with ties broken by rule id.  Throws std::runtime_error
// on missing inputs or unknown target, std::domain_error on out-of-range
// input values.
InferenceResult infer(const Network& net, const FactValues& inputs,
                      const std::string& target);

InferenceResult infer(const Network& net, const FactValues& inputs);

// Rules on some directed path to `target`, reverse-topological (target's
// producer first).  Empty when the target is an input fact.
std::vector<const Rule*> contributing_rules(const Network& net,
                                            const std::string& target);

std::vector<Contribution> explain(const Network& net, const FactValues& inputs,
                                  const std::string& target);

std::vector<Contribution> explain(const Network& net, const FactValues& inputs);

}  // namespace mles
