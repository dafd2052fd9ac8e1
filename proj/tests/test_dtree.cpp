#include <doctest.h>

#include <sstream>

#include "illiq/dtree.hpp"

using namespace illiq::dtree;

TEST_SUITE_BEGIN("dtree");

TEST_CASE("depth-1 random walk: exact weights") {
    const auto market = DiscreteMarket::random_walk(1, 1);
    const auto e = enumerate_measures(market);
    CHECK(e.depth == 1);
    CHECK(e.paths.size() == 2);
    CHECK(e.qcheck_prob_tau_gt(1) == Rational(1, 2));
    CHECK(e.expected_z(1) == Rational(1, 2));
    // Q assigns no mass to absorbed paths.
    Rational q_absorbed = 0;
    for (const auto& p : e.paths) {
        if (p.tau_level >= 0) q_absorbed += p.q_weight;
    }
    CHECK(q_absorbed == 0);
}

TEST_CASE("strictly positive tree: mutual absolute continuity, unit deflator mean") {
    const auto market = DiscreteMarket::multiplicative(4);
    const auto e = enumerate_measures(market);
    for (const auto& p : e.paths) {
        CHECK(p.qcheck_weight > 0);
        CHECK(p.q_weight > 0);
        CHECK(p.tau_level == -1);
    }
    for (int t = 0; t <= 4; ++t) CHECK(e.expected_z(t) == 1);
}

TEST_CASE("identities hold exactly on random walks; single node is vacuous") {
    for (const int depth : {1, 4}) {
        const auto rep = verify_foellmer_identities(DiscreteMarket::random_walk(1, depth));
        CHECK(rep.ok);
    }
    std::vector<Node> solo{{0, 1, {}}};
    const auto rep = verify_foellmer_identities(DiscreteMarket::from_nodes(solo, 0));
    CHECK(rep.ok);
    CHECK(rep.checked_atoms >= 1);
}

TEST_CASE("exact invariants at every level") {
    for (const auto& market :
         {DiscreteMarket::random_walk(1, 6), DiscreteMarket::multiplicative(5)}) {
        const auto e = enumerate_measures(market);
        for (int t = 0; t <= e.depth; ++t) {
            CHECK(e.expected_z(t) == e.qcheck_prob_tau_gt(t));
        }
        // Node-by-node supermartingale property of Z under Q within the
        // tree: expected_z is non-increasing in t.
        for (int t = 1; t <= e.depth; ++t) {
            CHECK(e.expected_z(t) <= e.expected_z(t - 1));
        }
    }
}

TEST_CASE("corrupted transition probabilities are caught with a named event") {
    std::vector<Node> nodes{
        {0, 1, {{1, Rational(1, 3)}, {2, Rational(2, 3)}}}, {1, 0, {}}, {2, 2, {}}};
    const auto market = DiscreteMarket::from_nodes(nodes, 0);
    CHECK_THROWS_AS((void)enumerate_measures(market), std::invalid_argument);
    const auto rep = verify_foellmer_identities(market);
    CHECK(!rep.ok);
    CHECK(rep.violation.find("t=") != std::string::npos);
}

TEST_CASE("single-edge fault injection always breaks an identity") {
    // Perturb each branching node of a depth-2 walk in turn (keeping the
    // probabilities summing to one) and expect a violation every time.
    const auto base = DiscreteMarket::random_walk(1, 2);
    int perturbed = 0;
    for (std::size_t k = 0; k < base.nodes().size(); ++k) {
        if (base.nodes()[k].edges.size() < 2) continue;
        auto nodes = base.nodes();
        nodes[k].edges[0].second += Rational(1, 7);
        nodes[k].edges[1].second -= Rational(1, 7);
        const auto market = DiscreteMarket::from_nodes(nodes, base.root());
        CHECK(!verify_foellmer_identities(market).ok);
        ++perturbed;
    }
    CHECK(perturbed >= 2);
}

TEST_CASE("jump-to-zero classification with exact defects") {
    const auto walk1 = classify_jump_to_zero(DiscreteMarket::random_walk(1, 1));
    CHECK(walk1.classification == ZeroApproach::JumpsToZero);
    CHECK(walk1.defect == Rational(1, 2));

    const auto mult = classify_jump_to_zero(DiscreteMarket::multiplicative(3));
    CHECK(mult.classification == ZeroApproach::ReachesZeroContinuouslyOrNever);
    CHECK(mult.defect == 0);

    // Walk from 2 with one step: zero is unreachable, defect 0.
    const auto walk2 = classify_jump_to_zero(DiscreteMarket::random_walk(2, 1));
    CHECK(walk2.classification == ZeroApproach::ReachesZeroContinuouslyOrNever);
    CHECK(walk2.defect == 0);
}

TEST_CASE("text round trip and parse diagnostics") {
    const auto market = DiscreteMarket::random_walk(1, 3);
    std::istringstream in(market.to_text());
    const auto back = DiscreteMarket::parse(in);
    CHECK(back.depth() == market.depth());
    const auto a = enumerate_measures(market);
    const auto b = enumerate_measures(back);
    REQUIRE(a.paths.size() == b.paths.size());
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        CHECK(a.paths[i].qcheck_weight == b.paths[i].qcheck_weight);
        CHECK(a.paths[i].q_weight == b.paths[i].q_weight);
    }

    auto expect_throw = [](const std::string& text) {
        std::istringstream bad(text);
        CHECK_THROWS_AS((void)DiscreteMarket::parse(bad), std::invalid_argument);
    };
    expect_throw("0 x 1:1/2 2:1/2\n1 0\n2 2\n");       // bad rational
    expect_throw("0 1 1:1/2 2:1/3\n1 0\n2 2\n");       // probabilities not summing to 1
    expect_throw("0 2 1:1 \n1 2\n");                   // root zcheck != 1
    expect_throw("0 1 1:1\n0 1\n");                    // duplicate id
    expect_throw("0 1 1:1/2 2:1/2\n1 0 3:1\n2 2\n3 0\n");  // absorbed node with children
    expect_throw("");                                  // empty file
}

TEST_CASE("depth cap") {
    // A unary chain of depth 13 exceeds the enumeration cap.
    std::vector<Node> nodes;
    for (int i = 0; i <= 13; ++i) {
        Node n;
        n.id = i;
        n.zcheck = 1;
        if (i < 13) n.edges = {{i + 1, Rational(1)}};
        nodes.push_back(n);
    }
    CHECK_THROWS_WITH_AS((void)DiscreteMarket::from_nodes(nodes, 0),
                         doctest::Contains("depth cap"), std::invalid_argument);
    CHECK_NOTHROW((void)DiscreteMarket::random_walk(1, 12));
}

TEST_SUITE_END();
