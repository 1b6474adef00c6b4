#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "mles/core.hpp"
#include "mles/synth.hpp"

using namespace mles;
using namespace mles::testing;

TEST_CASE("evaluate_rule is the convex combination") {
    CHECK(evaluate_rule(0.5, 0.0, 0.0) == 0.0);
    CHECK(evaluate_rule(1.0, 0.3, 0.9) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(evaluate_rule(0.25, 0.4, 0.8) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("evaluate_rule rejects out-of-range arguments") {
    CHECK_THROWS_AS(evaluate_rule(1.1, 0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(evaluate_rule(0.5, -0.1, 0.5), std::domain_error);
    CHECK_THROWS_AS(evaluate_rule(0.5, 0.5, 2.0), std::domain_error);
}

TEST_CASE("evaluate_rule output stays between its inputs") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        double w = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double v1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double v2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double out = evaluate_rule(w, v1, v2);
        CHECK(out >= std::min(v1, v2));
        CHECK(out <= std::max(v1, v2));
    }
}

TEST_CASE("validate accepts a single-rule network") {
    auto report = validate(single_rule_network());
    CHECK(report.ok());
    CHECK(report.warnings.empty());
}

TEST_CASE("validate reports a two-cycle") {
    Network net({{"A", FactKind::intermediate},
                 {"B", FactKind::input},
                 {"C", FactKind::output},
                 {"D", FactKind::input}},
                {{"R1", "A", "B", "C", 0.5, true},
                 {"R2", "C", "D", "A", 0.5, true}},
                "C");
    auto report = validate(net);
    REQUIRE_FALSE(report.ok());
    bool found_cycle = false;
    for (const auto& v : report.errors)
        if (v.kind == ViolationKind::cycle &&
            v.message.find("A") != std::string::npos &&
            v.message.find("C") != std::string::npos)
            found_cycle = true;
    CHECK(found_cycle);
}

TEST_CASE("validate reports duplicate producers") {
    Network net({{"A", FactKind::input},
                 {"B", FactKind::input},
                 {"D", FactKind::input},
                 {"C", FactKind::output}},
                {{"R1", "A", "B", "C", 0.5, true},
                 {"R2", "A", "D", "C", 0.5, true}},
                "C");
    auto report = validate(net);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const auto& v : report.errors)
        if (v.kind == ViolationKind::duplicate_producer && v.subject == "C")
            found = true;
    CHECK(found);
}

TEST_CASE("validate reports dangling references and weight bounds") {
    Network net({{"A", FactKind::input},
                 {"B", FactKind::input},
                 {"C", FactKind::output}},
                {{"R1", "A", "MISSING", "C", 1.5, true}}, "C");
    auto report = validate(net);
    bool dangling = false, weight = false;
    for (const auto& v : report.errors) {
        if (v.kind == ViolationKind::dangling_reference && v.subject == "R1")
            dangling = true;
        if (v.kind == ViolationKind::weight_bound && v.subject == "R1")
            weight = true;
    }
    CHECK(dangling);
    CHECK(weight);
}

TEST_CASE("validate warns about unreferenced facts") {
    Network net({{"A", FactKind::input},
                 {"B", FactKind::input},
                 {"C", FactKind::output},
                 {"LOOSE", FactKind::input}},
                {{"R1", "A", "B", "C", 0.5, true}}, "C");
    auto report = validate(net);
    CHECK(report.ok());
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].subject == "LOOSE");
}

TEST_CASE("infer reads out the weight on unit inputs") {
    auto net = single_rule_network(0.7);
    auto result = infer(net, {{"A", 1.0}, {"B", 0.0}});
    CHECK(result.value == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(result.trace.rule_order == std::vector<std::string>{"R1"});
}

TEST_CASE("infer on an input-fact target is the identity") {
    auto net = single_rule_network();
    auto result = infer(net, {{"A", 0.42}, {"B", 0.0}}, "A");
    CHECK(result.value == 0.42);
    CHECK(result.trace.rule_order.empty());
}

TEST_CASE("infer evaluates a chain") {
    // hand-computed: P = 0.4, T = 0.7
    auto net = chain_network();
    auto result = infer(net, {{"A", 0.2}, {"B", 0.6}, {"C", 1.0}});
    CHECK(result.value == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(result.trace.values.at("P") == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("infer reports missing inputs and unknown targets") {
    auto net = single_rule_network();
    CHECK_THROWS_AS(infer(net, {{"A", 1.0}}), std::runtime_error);
    CHECK_THROWS_AS(infer(net, {{"A", 1.0}, {"B", 0.0}}, "NOPE"),
                    std::runtime_error);
    CHECK_THROWS_AS(infer(net, {{"A", 2.0}, {"B", 0.0}}), std::domain_error);
}

TEST_CASE("contributing_rules: single rule, diamond, input target") {
    auto single = single_rule_network();
    auto rules = contributing_rules(single, "C");
    REQUIRE(rules.size() == 1);
    CHECK(rules[0]->id == "R1");

    auto diamond = diamond_network();
    auto diamond_rules = contributing_rules(diamond, "T");
    REQUIRE(diamond_rules.size() == 3);
    CHECK(diamond_rules[0]->id == "R3");  // target's producer first
    std::vector<std::string> ids;
    for (auto* r : diamond_rules) ids.push_back(r->id);
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<std::string>{"R1", "R2", "R3"});

    CHECK(contributing_rules(single, "A").empty());
}

TEST_CASE("explain path weights: single rule, chain, diamond") {
    auto single = single_rule_network(0.5);
    auto contributions = explain(single, {{"A", 1.0}, {"B", 0.0}});
    REQUIRE(contributions.size() == 1);
    CHECK(contributions[0].path_weight == 1.0);

    auto chain = chain_network(0.5, 0.3);  // R2 applies 0.3 to R1's output
    auto chain_expl = explain(chain, {{"A", 0.2}, {"B", 0.6}, {"C", 1.0}});
    for (const auto& c : chain_expl) {
        if (c.rule_id == "R1")
            CHECK(c.path_weight == doctest::Approx(0.3).epsilon(1e-15));
        if (c.rule_id == "R2") CHECK(c.path_weight == 1.0);
    }

    auto diamond = diamond_network(0.6);
    auto diamond_expl =
        explain(diamond, {{"A", 1.0}, {"B", 0.0}, {"C", 1.0}, {"D", 0.0}});
    for (const auto& c : diamond_expl) {
        double expected = c.rule_id == "R3" ? 1.0 : c.rule_id == "R1" ? 0.6 : 0.4;
        CHECK(c.path_weight == doctest::Approx(expected).epsilon(1e-15));
        // agrees with explicit path enumeration from the rule's output fact
        const Rule* rule = diamond.find_rule(c.rule_id);
        CHECK(c.path_weight ==
              doctest::Approx(path_weight_by_enumeration(diamond, rule->out, "T"))
                  .epsilon(1e-15));
    }
}

TEST_CASE("property: resolved values stay in [0,1] on random networks") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        int rules = 1 + static_cast<int>(rng() % 25);
        auto net = generate_random_network(rules, rng());
        auto result = infer(net, random_inputs(net, rng));
        for (const auto& [id, v] : result.trace.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("property: infer matches the naive recursive oracle") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        int rules = 1 + static_cast<int>(rng() % 30);
        auto net = generate_random_network(rules, rng());
        auto inputs = random_inputs(net, rng);
        double engine = infer(net, inputs).value;
        double oracle = naive_eval(net, inputs, net.target());
        CHECK(engine == doctest::Approx(oracle).epsilon(0).scale(1).epsilon(1e-12));
    }
}

TEST_CASE("property: identical inputs give identical traces") {
    std::mt19937_64 rng(17);
    auto net = generate_random_network(15, 99);
    auto inputs = random_inputs(net, rng);
    auto a = infer(net, inputs);
    auto b = infer(net, inputs);
    CHECK(a.value == b.value);
    CHECK(a.trace.rule_order == b.trace.rule_order);
    CHECK(a.trace.values == b.trace.values);
}

TEST_CASE("property: raising one input never lowers the target") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        auto net = generate_random_network(1 + static_cast<int>(rng() % 15),
                                           rng());
        auto inputs = random_inputs(net, rng);
        double base = infer(net, inputs).value;
        for (const auto& id : net.input_fact_ids()) {
            auto raised = inputs;
            raised[id] = std::min(1.0, raised[id] + 0.25);
            CHECK(infer(net, raised).value >= base - 1e-12);
        }
    }
}

TEST_CASE("property: input-slot path weights sum to 1") {
    // brute-force confirmation on the small fixtures first
    for (const Network& net :
         {single_rule_network(0.3), chain_network(0.2, 0.7),
          diamond_network(0.25)}) {
        double total = 0.0;
        for (const auto& rule : net.rules()) {
            for (const auto* slot : {&rule.in1, &rule.in2}) {
                if (net.producer(*slot)) continue;
                double w = slot == &rule.in1 ? rule.w1 : rule.w2();
                total += w * path_weight_by_enumeration(net, rule.out,
                                                        net.target());
            }
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }

    // then the explain-based identity on random networks
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        auto net = generate_random_network(1 + static_cast<int>(rng() % 20),
                                           rng());
        auto contributions = explain(net, random_inputs(net, rng));
        double total = 0.0;
        for (const auto& c : contributions) {
            const Rule* rule = net.find_rule(c.rule_id);
            if (!net.producer(rule->in1)) total += c.path_weight * rule->w1;
            if (!net.producer(rule->in2)) total += c.path_weight * rule->w2();
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}
