#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "aid/framework.hpp"
#include "aid/s3vm.hpp"
#include "aid/svm.hpp"
#include "aid/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace aid;
using namespace aid::s3vm;
using testing_support::dataset;
using testing_support::rows;
using testing_support::vec;

namespace {

double hinge(double label, double f) { return std::max(0.0, 1.0 - label * f); }

// Small semi-supervised instance: labeled rows first, 0 marks unlabeled.
Dataset small_instance(std::uint64_t seed, std::size_t labeled, std::size_t unlabeled, double shift) {
    std::mt19937_64 gen(seed);
    const auto n = static_cast<Eigen::Index>(labeled + unlabeled);
    auto d = testing_support::classes(gen, n, 2, shift);
    for (Eigen::Index i = static_cast<Eigen::Index>(labeled); i < n; ++i) d.y(i) = 0.0;
    return d;
}

}  // namespace

TEST(S3vmAggregate, SingletonsAreTheIdentity) {
    const auto d = dataset(rows({{1, 0}, {-1, 0}, {0, 2}, {3, 1}}), vec({1, -1, 0, 0}));
    const S3vmOptions options;
    const auto inst = aggregate({ClusterPartition::singletons(4, std::vector<std::size_t>{0, 1}),
                                 ClusterPartition::singletons(4, std::vector<std::size_t>{2, 3})},
                                d, options);
    EXPECT_TRUE(inst.labeled_x.isApprox(d.x.topRows(2), 0.0));
    EXPECT_TRUE(inst.unlabeled_x.isApprox(d.x.bottomRows(2), 0.0));
    EXPECT_EQ(inst.labeled_cost, Vector::Constant(2, options.labeled_penalty));
    EXPECT_EQ(inst.unlabeled_cost, Vector::Constant(2, options.unlabeled_penalty));
    EXPECT_FALSE(inst.balance.has_value());
}

TEST(S3vmAggregate, UnlabeledPairMeanAndCostSums) {
    const auto d = dataset(rows({{1, 0}, {3, 0}, {-1, 0}, {0, 2}, {2, 4}}), vec({1, 1, -1, 0, 0}));
    S3vmOptions options;
    options.labeled_penalty = 2.0;
    options.unlabeled_penalty = 0.5;
    const auto inst = aggregate({ClusterPartition(5, {{0, 1}, {2}}), ClusterPartition(5, {{3, 4}})}, d, options);
    EXPECT_EQ(inst.unlabeled_x(0, 0), 1.0);
    EXPECT_EQ(inst.unlabeled_x(0, 1), 3.0);
    EXPECT_EQ(inst.unlabeled_cost(0), 1.0);
    EXPECT_EQ(inst.labeled_x(0, 0), 2.0);
    EXPECT_EQ(inst.labeled_cost(0), 4.0);
    EXPECT_EQ(inst.labeled_cost(1), 2.0);
    EXPECT_THROW(aggregate({ClusterPartition(5, {{0, 2}, {1}}), ClusterPartition(5, {{3, 4}})}, d, options),
                 std::invalid_argument);
}

TEST(S3vmAggregate, BalanceConstraintTarget) {
    const auto d = dataset(rows({{1, 0}, {3, 0}, {-1, 0}, {0, 2}, {2, 4}}), vec({1, 1, -1, 0, 0}));
    S3vmOptions options;
    options.balance = BalanceMode::constraint;
    const auto inst = aggregate({ClusterPartition::singletons(5, std::vector<std::size_t>{0, 1, 2}),
                                 ClusterPartition::singletons(5, std::vector<std::size_t>{3, 4})},
                                d, options);
    ASSERT_TRUE(inst.balance.has_value());
    EXPECT_EQ(inst.balance->center, vec({1, 3}));
    EXPECT_DOUBLE_EQ(inst.balance->target, 1.0 / 3.0);
}

TEST(S3vmLabeledCosts, BalanceCostMultipliers) {
    const auto d = dataset(rows({{0}, {0}, {0}, {0}, {0}}), vec({1, 1, 1, -1, 0}));
    S3vmOptions options;
    options.labeled_penalty = 2.0;
    options.balance = BalanceMode::cost;
    const double plus = 3, minus = 1;
    const Vector c = labeled_costs(d, options);
    EXPECT_DOUBLE_EQ(c(0), 2.0 * std::max(1.0, plus / minus));
    EXPECT_DOUBLE_EQ(c(3), 2.0 * std::max(1.0, minus / plus));
    EXPECT_EQ(c(4), 0.0);
    options.balance_cost_swapped = true;
    const Vector s = labeled_costs(d, options);
    EXPECT_DOUBLE_EQ(s(0), 2.0);
    EXPECT_DOUBLE_EQ(s(3), 6.0);
}

TEST(S3vmSolve, BalancedCostsEqualModeNone) {
    const Dataset d = small_instance(4, 10, 6, 1.0);
    S3vmOptions none;
    S3vmOptions cost;
    cost.balance = BalanceMode::cost;
    EXPECT_EQ(labeled_costs(d, none), labeled_costs(d, cost));
    S3vmProblem a(d, none), b(d, cost);
    a.initialize(10, 0);
    b.initialize(10, 0);
    EXPECT_EQ(a.solve(), b.solve());
}

TEST(S3vmSolve, NoUnlabeledEntriesIsWeightedSvm) {
    std::mt19937_64 gen(5);
    const auto d = testing_support::classes(gen, 20, 2, 0.6);
    S3vmOptions options;
    S3vmProblem problem(d, options);
    problem.initialize(S3vmPartitions{ClusterPartition::singletons(20), ClusterPartition{}});
    const double f = problem.solve();
    const auto ref = oracle::svm_interior_point_linear(d.x, d.y, Vector::Constant(20, options.labeled_penalty));
    EXPECT_LE(std::abs(f - ref.primal) / ref.primal, 1e-8);
}

TEST(S3vmSolve, OneUnlabeledClusterIsBestOfTwoLabelings) {
    const auto d = dataset(rows({{1, 0}, {-1, 0}, {0.2, 0.8}, {0.4, 1.2}}), vec({1, -1, 0, 0}));
    S3vmOptions options;
    S3vmProblem problem(d, options);
    problem.initialize(S3vmPartitions{ClusterPartition::singletons(4, std::vector<std::size_t>{0, 1}),
                                      ClusterPartition(4, {{2, 3}})});
    const double f = problem.solve();
    // The aggregated problem has one unlabeled centroid (0.3, 1) with cost 2 Mu.
    const RowMatrix x = rows({{1, 0}, {-1, 0}, {0.3, 1.0}});
    const Vector cost = vec({options.labeled_penalty, options.labeled_penalty, 2 * options.unlabeled_penalty});
    const double plus = oracle::svm_interior_point_linear(x, vec({1, -1, 1}), cost).primal;
    const double minus = oracle::svm_interior_point_linear(x, vec({1, -1, -1}), cost).primal;
    EXPECT_NEAR(f, std::min(plus, minus), 1e-7);
}

TEST(S3vmAssignLabels, SignRule) {
    const auto d = dataset(rows({{0.5}, {-0.5}, {0.0}}), vec({0, 0, 0}));
    EXPECT_EQ(assign_labels(vec({1.0}), 0.0, d, {0, 1, 2}), (std::vector<int>{1, -1, 1}));
}

TEST(S3vmClassifyMargins, Examples) {
    const auto d = dataset(rows({{0}, {0}, {0}, {0}, {0}, {0}}), vec({1, 1, 0, 0, 0, 0}));
    const Vector f = vec({3.0, 0.5, 2.0, -2.0, 0.5, -0.5});
    const auto sets = classify_margins(f, d);
    EXPECT_EQ(sets[0], MarginSet::labeled_nonpositive);  // far on the correct side
    EXPECT_EQ(sets[1], MarginSet::labeled_positive);     // inside the margin
    EXPECT_EQ(sets[2], MarginSet::minus_plus);
    EXPECT_EQ(sets[3], MarginSet::minus_minus);
    EXPECT_EQ(sets[4], MarginSet::plus_plus);
    EXPECT_EQ(sets[5], MarginSet::plus_minus);
}

TEST(S3vmClassifyMargins, ErrorMinimizingLabelsAreConsistent) {
    const Dataset d = small_instance(6, 8, 40, 0.5);
    std::mt19937_64 gen(7);
    const Vector w = testing_support::gaussian(gen, 2, 1).col(0);
    Vector f = d.x * w;
    f.array() += 0.1;
    const auto unlabeled = d.unlabeled_indices();
    const auto labels = assign_labels(w, 0.1, d, unlabeled);
    EXPECT_EQ(classify_margins(f, d), classify_margins(f, d, labels));
    for (std::size_t j = 0; j < unlabeled.size(); ++j) {
        const double fj = f(static_cast<Eigen::Index>(unlabeled[j]));
        EXPECT_LE(hinge(labels[j], fj), hinge(-labels[j], fj));
    }
    // every entry lands in exactly one set, of the right family
    const auto sets = classify_margins(f, d);
    ASSERT_EQ(sets.size(), d.n());
    for (std::size_t i = 0; i < d.n(); ++i) {
        const bool labeled_set = sets[i] == MarginSet::labeled_positive || sets[i] == MarginSet::labeled_nonpositive;
        EXPECT_EQ(labeled_set, d.y(static_cast<Eigen::Index>(i)) != 0.0);
    }
}

TEST(S3vmDecluster, UnlabeledCasesAndDroppedEmpties) {
    const auto d = dataset(rows({{0}, {0}, {0}, {0}, {0}, {0}, {0}, {0}, {0}}), vec({1, -1, 0, 0, 0, 0, 0, 0, 0}));
    const Vector f = vec({2, -2,
                          -3, -4,            // both minus_minus: kept
                          2.0, -2.0, 0.5, -0.5,  // all four sets
                          0.3});
    S3vmPartitions p{ClusterPartition::singletons(9, std::vector<std::size_t>{0, 1}),
                     ClusterPartition(9, {{2, 3}, {4, 5, 6, 7}, {8}})};
    const auto sets = classify_margins(f, d);
    EXPECT_FALSE(check_optimality(p, sets, f, d));
    EXPECT_TRUE(decluster(p, sets, f, d));
    EXPECT_EQ(p.unlabeled.cluster_of(2), p.unlabeled.cluster_of(3));
    std::set<std::size_t> ids;
    for (const std::size_t i : {4, 5, 6, 7}) ids.insert(p.unlabeled.cluster_of(i));
    EXPECT_EQ(ids.size(), 4u);
    EXPECT_EQ(p.unlabeled.size(), 6u);
    p.unlabeled.check_invariants();
    EXPECT_TRUE(check_optimality(p, classify_margins(f, d), f, d));

    // a cluster covering only two sets gets two children, not four
    S3vmPartitions q{ClusterPartition::singletons(9, std::vector<std::size_t>{0, 1}), ClusterPartition(9, {{4, 6}})};
    decluster(q, sets, f, d);
    EXPECT_EQ(q.unlabeled.size(), 2u);
}

TEST(S3vmDecluster, LabeledClustersUseRelaxedUniformity) {
    const auto d = dataset(rows({{0}, {0}, {0}, {0}}), vec({1, 1, 1, 1}));
    // hinge args 1 - f: -1, 0 (kept: all <= eps); 0.5, -0.5 (split)
    const Vector f = vec({2.0, 1.0, 0.5, 1.5});
    S3vmPartitions p{ClusterPartition(4, {{0, 1}, {2, 3}}), ClusterPartition{}};
    const auto sets = classify_margins(f, d);
    EXPECT_FALSE(check_optimality(p, sets, f, d));
    decluster(p, sets, f, d);
    EXPECT_EQ(p.labeled.cluster_of(0), p.labeled.cluster_of(1));
    EXPECT_NE(p.labeled.cluster_of(2), p.labeled.cluster_of(3));
    EXPECT_TRUE(check_optimality(S3vmPartitions{ClusterPartition::singletons(4), ClusterPartition{}}, sets, f, d));
}

TEST(S3vmEvaluate, SeparationAndPenaltyConsistency) {
    const auto d = dataset(rows({{2, 0}, {-2, 0}, {3, 1}, {-3, 0}}), vec({1, -1, 0, 0}));
    const Vector w = vec({1, 0});
    EXPECT_DOUBLE_EQ(evaluate(w, 0.0, d, labeled_costs(d, S3vmOptions{}), 1.0), 0.5);

    // Ml = Mu: same as a single-penalty SVM objective under error-minimizing labels.
    const Dataset r = small_instance(8, 6, 10, 0.2);
    S3vmOptions equal;
    equal.labeled_penalty = 0.7;
    equal.unlabeled_penalty = 0.7;
    const Vector v = vec({0.4, -0.3});
    Vector f = r.x * v;
    f.array() -= 0.05;
    Vector labels = r.y;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (labels(i) == 0.0) labels(i) = f(i) >= 0.0 ? 1.0 : -1.0;
    const double single = svm::primal_objective(v.squaredNorm(), svm::slacks(f, labels), 0.7);
    EXPECT_NEAR(evaluate(v, -0.05, r, labeled_costs(r, equal), 0.7), single, 1e-12);
}

TEST(S3vmProblem, CertifiedRunMatchesEnumeration) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Dataset d = small_instance(20 + seed, 12, 9, 1.0);
        S3vmOptions options;
        S3vmProblem problem(d, options);
        AidConfig config;
        std::vector<bool> exact;
        const auto log = run_aid(problem, config, [&](const IterationRecord& r, const S3vmProblem&) {
            exact.push_back(r.subproblem_exact);
        });
        EXPECT_TRUE(log.reason == TerminationReason::optimality_condition ||
                    log.reason == TerminationReason::singleton_clusters);
        const auto ref = oracle::s3vm_enumeration(d.x, d.y, labeled_costs(d, options), options.unlabeled_penalty);
        EXPECT_LE(std::abs(log.final_record().upper - ref.objective) / ref.objective, 1e-6) << "seed " << seed;
        EXPECT_TRUE(std::all_of(exact.begin(), exact.end(), [](bool b) { return b; }));
    }
}

TEST(S3vmProblem, FixedIterationModes) {
    SyntheticSpec spec;
    spec.kind = ProblemKind::s3vm;
    spec.n = 150;
    spec.m = 2;
    spec.labeled_fraction = 0.2;
    spec.seed = 3;
    const Dataset d = generate(spec);
    for (const std::size_t k : {1u, 5u}) {
        S3vmProblem problem(d);
        AidConfig config;
        config.fixed_iterations = k;
        const auto log = run_aid(problem, config);
        EXPECT_LE(log.iterations(), k);
        if (log.reason == TerminationReason::max_iterations) {
            EXPECT_EQ(log.iterations(), k);
        }
        EXPECT_EQ(problem.model().d.size(), d.unlabeled_indices().size());
    }
}

TEST(S3vmProblem, RejectsMissingClass) {
    const auto d = dataset(rows({{0}, {1}, {2}}), vec({1, 0, 0}));
    EXPECT_THROW(S3vmProblem problem(d), DataError);
    EXPECT_THROW(parse_balance("sometimes"), std::invalid_argument);
    EXPECT_EQ(parse_balance(to_string(BalanceMode::cost)), BalanceMode::cost);
}
