#include "mles/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mles {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

const char* violation_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::cycle: return "cycle";
        case ViolationKind::duplicate_producer: return "duplicate-producer";
        case ViolationKind::dangling_reference: return "dangling-reference";
        case ViolationKind::weight_bound: return "weight-bound";
        case ViolationKind::missing_target: return "missing-target";
        case ViolationKind::ambiguous_target: return "ambiguous-target";
        case ViolationKind::bad_kind: return "bad-kind";
        case ViolationKind::duplicate_id: return "duplicate-id";
    }
    return "unknown";
}

}  // namespace

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& v : errors)
        out << "error [" << violation_name(v.kind) << "] " << v.subject << ": "
            << v.message << "\n";
    for (const auto& v : warnings)
        out << "warning [" << violation_name(v.kind) << "] " << v.subject
            << ": " << v.message << "\n";
    return out.str();
}

Network::Network(std::vector<Fact> facts, std::vector<Rule> rules,
                 std::string target)
    : facts_(std::move(facts)), rules_(std::move(rules)),
      target_(std::move(target)) {
    rebuild_indexes();
}

void Network::rebuild_indexes() {
    fact_index_.clear();
    rule_index_.clear();
    producer_index_.clear();
    for (std::size_t i = 0; i < facts_.size(); ++i)
        fact_index_.emplace(facts_[i].id, i);
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        rule_index_.emplace(rules_[i].id, i);
        producer_index_.emplace(rules_[i].out, i);
    }
}

const Fact* Network::find_fact(const std::string& id) const {
    auto it = fact_index_.find(id);
    return it == fact_index_.end() ? nullptr : &facts_[it->second];
}

const Rule* Network::find_rule(const std::string& id) const {
    auto it = rule_index_.find(id);
    return it == rule_index_.end() ? nullptr : &rules_[it->second];
}

const Rule* Network::producer(const std::string& fact_id) const {
    auto it = producer_index_.find(fact_id);
    return it == producer_index_.end() ? nullptr : &rules_[it->second];
}

std::vector<std::string> Network::input_fact_ids() const {
    std::vector<std::string> out;
    for (const auto& f : facts_)
        if (f.kind == FactKind::input) out.push_back(f.id);
    return out;
}

void Network::set_weight(const std::string& rule_id, double w1) {
    auto it = rule_index_.find(rule_id);
    if (it == rule_index_.end())
        throw std::runtime_error("set_weight: unknown rule " + rule_id);
    if (!in_unit_interval(w1))
        throw std::domain_error("set_weight: w1 out of [0,1]");
    rules_[it->second].w1 = w1;
}

double evaluate_rule(double w1, double v1, double v2) {
    if (!in_unit_interval(w1)) throw std::domain_error("evaluate_rule: w1 out of [0,1]");
    if (!in_unit_interval(v1)) throw std::domain_error("evaluate_rule: v1 out of [0,1]");
    if (!in_unit_interval(v2)) throw std::domain_error("evaluate_rule: v2 out of [0,1]");
    double out = w1 * v1 + (1.0 - w1) * v2;
    // convex combination can wobble past the endpoints in the last ulp
    return std::clamp(out, std::min(v1, v2), std::max(v1, v2));
}

ValidationReport validate(const Network& net) {
    ValidationReport report;
    auto error = [&](ViolationKind kind, const std::string& subject,
                     const std::string& message) {
        report.errors.push_back({kind, subject, message});
    };

    std::set<std::string> fact_ids;
    for (const auto& f : net.facts())
        if (!fact_ids.insert(f.id).second)
            error(ViolationKind::duplicate_id, f.id, "fact id declared twice");

    std::set<std::string> rule_ids;
    std::map<std::string, std::vector<std::string>> producers;
    for (const auto& r : net.rules()) {
        if (!rule_ids.insert(r.id).second)
            error(ViolationKind::duplicate_id, r.id, "rule id declared twice");
        if (fact_ids.count(r.id))
            error(ViolationKind::duplicate_id, r.id,
                  "rule id collides with a fact id");
        for (const std::string* ref : {&r.in1, &r.in2, &r.out})
            if (!fact_ids.count(*ref))
                error(ViolationKind::dangling_reference, r.id,
                      "references unknown fact " + *ref);
        if (r.in1 == r.in2)
            error(ViolationKind::bad_kind, r.id, "in1 and in2 are the same fact");
        if (r.out == r.in1 || r.out == r.in2)
            error(ViolationKind::cycle, r.id, "rule output feeds its own input");
        if (!(r.w1 >= 0.0 && r.w1 <= 1.0 &&
              std::abs(r.w1 + r.w2() - 1.0) <= kWeightSumTolerance))
            error(ViolationKind::weight_bound, r.id, "w1 out of [0,1]");
        producers[r.out].push_back(r.id);
    }
    for (const auto& [fact, by] : producers)
        if (by.size() > 1) {
            std::string who;
            for (const auto& id : by) who += (who.empty() ? "" : ", ") + id;
            error(ViolationKind::duplicate_producer, fact,
                  "produced by multiple rules: " + who);
        }

    // target checks
    std::size_t output_count = 0;
    for (const auto& f : net.facts())
        if (f.kind == FactKind::output) ++output_count;
    const Fact* target = net.find_fact(net.target());
    if (net.target().empty() || !target)
        error(ViolationKind::missing_target, net.target(),
              "target fact not declared");
    else if (target->kind != FactKind::output)
        error(ViolationKind::bad_kind, net.target(),
              "target fact is not of output kind");
    if (output_count > 1)
        error(ViolationKind::ambiguous_target, net.target(),
              "more than one output fact declared");
    else if (output_count == 0 && target)
        error(ViolationKind::missing_target, net.target(),
              "no output fact declared");

    // kind vs producer agreement
    for (const auto& f : net.facts()) {
        bool produced = producers.count(f.id) > 0;
        if (f.kind == FactKind::input && produced)
            error(ViolationKind::bad_kind, f.id,
                  "input fact is produced by a rule");
        if (f.kind != FactKind::input && !produced)
            error(ViolationKind::bad_kind, f.id,
                  "non-input fact has no producing rule");
    }

    // cycle detection over fact graph (edges in -> out), iterative DFS
    std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
    for (const auto& start : net.facts()) {
        if (state[start.id]) continue;
        std::vector<std::pair<std::string, std::size_t>> stack;
        stack.emplace_back(start.id, 0);
        state[start.id] = 1;
        while (!stack.empty()) {
            auto& [fact, next] = stack.back();
            const Rule* prod = net.producer(fact);
            std::vector<std::string> preds;
            if (prod) preds = {prod->in1, prod->in2};
            if (next < preds.size()) {
                std::string pred = preds[next++];
                if (!net.find_fact(pred)) continue;  // dangling, reported above
                int s = state[pred];
                if (s == 1) {
                    std::string cyc;
                    for (const auto& [f, _] : stack) {
                        if (!cyc.empty() || f == pred) {
                            cyc += (cyc.empty() ? "" : ", ") + f;
                        }
                    }
                    if (cyc.empty()) cyc = pred;
                    error(ViolationKind::cycle, pred,
                          "rule graph contains a cycle through {" + cyc + "}");
                    state[pred] = 2;  // report each cycle once
                } else if (s == 0) {
                    state[pred] = 1;
                    stack.emplace_back(pred, 0);
                }
            } else {
                state[fact] = 2;
                stack.pop_back();
            }
        }
    }

    // reachability of the target from at least one input fact
    if (report.errors.empty()) {
        bool reachable = target->kind == FactKind::input;
        std::vector<std::string> work{net.target()};
        std::set<std::string> seen{net.target()};
        while (!work.empty() && !reachable) {
            std::string fact = work.back();
            work.pop_back();
            const Rule* prod = net.producer(fact);
            if (!prod) {
                if (net.find_fact(fact)->kind == FactKind::input) reachable = true;
                continue;
            }
            for (const auto& pred : {prod->in1, prod->in2})
                if (seen.insert(pred).second) work.push_back(pred);
        }
        if (!reachable)
            error(ViolationKind::missing_target, net.target(),
                  "target not reachable from any input fact");
    }

    // unreferenced facts are legal but suspicious
    for (const auto& f : net.facts()) {
        if (f.id == net.target()) continue;
        bool referenced = false;
        for (const auto& r : net.rules())
            if (r.in1 == f.id || r.in2 == f.id) { referenced = true; break; }
        if (!referenced)
            report.warnings.push_back({ViolationKind::dangling_reference, f.id,
                                       "fact feeds no rule"});
    }

    return report;
}

namespace {

// Backward closure of `target`: the producing rules of every fact with a
// directed path to it.
std::vector<const Rule*> closure_rules(const Network& net,
                                       const std::string& target) {
    std::vector<const Rule*> rules;
    std::set<std::string> seen{target};
    std::vector<std::string> work{target};
    while (!work.empty()) {
        std::string fact = work.back();
        work.pop_back();
        const Rule* prod = net.producer(fact);
        if (!prod) continue;
        rules.push_back(prod);
        for (const auto& pred : {prod->in1, prod->in2})
            if (seen.insert(pred).second) work.push_back(pred);
    }
    return rules;
}

// Topological order over the closure, ready rules picked by smallest id.
std::vector<const Rule*> topological_order(const Network& net,
                                           const std::string& target) {
    auto rules = closure_rules(net, target);
    std::set<std::string> pending_facts;  // facts still to be produced
    for (const Rule* r : rules) pending_facts.insert(r->out);

    std::vector<const Rule*> order;
    std::set<std::string> remaining;
    std::map<std::string, const Rule*> by_id;
    for (const Rule* r : rules) {
        remaining.insert(r->id);
        by_id.emplace(r->id, r);
    }
    while (!remaining.empty()) {
        const Rule* picked = nullptr;
        for (const auto& id : remaining) {  // sorted: smallest id wins ties
            const Rule* r = by_id[id];
            if (!pending_facts.count(r->in1) && !pending_facts.count(r->in2)) {
                picked = r;
                break;
            }
        }
        if (!picked)
            throw std::runtime_error("infer: rule graph is cyclic");
        order.push_back(picked);
        remaining.erase(picked->id);
        pending_facts.erase(picked->out);
    }
    return order;
}

}  // namespace

InferenceResult infer(const Network& net, const FactValues& inputs,
                      const std::string& target) {
    if (!net.find_fact(target))
        throw std::runtime_error("infer: unknown target fact " + target);
    {
        auto report = validate(net);
        if (!report.ok())
            throw std::runtime_error("infer: network is invalid:\n" +
                                     report.to_string());
    }
    for (const auto& [id, v] : inputs) {
        if (v < 0.0 || v > 1.0)
            throw std::domain_error("infer: input fact " + id +
                                    " out of [0,1]");
    }

    InferenceResult result;
    auto order = topological_order(net, target);

    // every input fact in the closure must be assigned
    for (const Rule* r : order)
        for (const auto& in : {r->in1, r->in2})
            if (!net.producer(in) && !inputs.count(in))
                throw std::runtime_error("infer: input fact " + in +
                                         " has no assigned value");
    if (order.empty() && !net.producer(target) && !inputs.count(target))
        throw std::runtime_error("infer: input fact " + target +
                                 " has no assigned value");

    FactValues& values = result.trace.values;
    auto resolved = [&](const std::string& id) {
        auto it = values.find(id);
        if (it != values.end()) return it->second;
        return inputs.at(id);
    };
    for (const Rule* r : order) {
        double v1 = resolved(r->in1);
        double v2 = resolved(r->in2);
        values[r->in1] = v1;
        values[r->in2] = v2;
        values[r->out] = evaluate_rule(r->w1, v1, v2);
        result.trace.rule_order.push_back(r->id);
    }
    if (order.empty()) values[target] = inputs.at(target);
    result.value = values.at(target);
    return result;
}

InferenceResult infer(const Network& net, const FactValues& inputs) {
    return infer(net, inputs, net.target());
}

std::vector<const Rule*> contributing_rules(const Network& net,
                                            const std::string& target) {
    if (!net.find_fact(target))
        throw std::runtime_error("contributing_rules: unknown target fact " +
                                 target);
    auto order = topological_order(net, target);
    std::reverse(order.begin(), order.end());
    return order;
}

std::vector<Contribution> explain(const Network& net, const FactValues& inputs,
                                  const std::string& target) {
    auto inference = infer(net, inputs, target);
    const auto& values = inference.trace.values;

    // path weight of a fact = sum over consuming rules in the closure of
    // (consumer's path weight) * (weight the consumer applies to it)
    std::map<std::string, double> fact_path_weight;
    fact_path_weight[target] = 1.0;
    auto rules = contributing_rules(net, target);  // reverse-topological
    std::vector<Contribution> out;
    for (const Rule* r : rules) {
        double pw = fact_path_weight[r->out];
        fact_path_weight[r->in1] += pw * r->w1;
        fact_path_weight[r->in2] += pw * r->w2();
        out.push_back({r->id, values.at(r->in1), values.at(r->in2), r->w1,
                       values.at(r->out), pw});
    }
    return out;
}

std::vector<Contribution> explain(const Network& net,
                                  const FactValues& inputs) {
    return explain(net, inputs, net.target());
}

}  // namespace mles
