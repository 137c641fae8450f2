#include <gtest/gtest.h>

#include <random>

#include "aid/framework.hpp"
#include "aid/svm.hpp"
#include "aid/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace aid;
using namespace aid::svm;
using testing_support::dataset;
using testing_support::rows;
using testing_support::vec;

TEST(SvmAggregate, CentroidsLabelsWeights) {
    const auto d = dataset(rows({{0, 0}, {2, 0}, {5, 5}}), vec({1, 1, -1}));
    const auto single = aggregate_linear(ClusterPartition::singletons(3), d);
    EXPECT_TRUE(single.x.isApprox(d.x, 0.0));
    const auto agg = aggregate_linear(ClusterPartition(3, {{0, 1}, {2}}), d);
    EXPECT_EQ(agg.x(0, 0), 1.0);
    EXPECT_EQ(agg.x(0, 1), 0.0);
    EXPECT_EQ(agg.y(0), 1.0);
    EXPECT_EQ(agg.y(1), -1.0);
    EXPECT_EQ(agg.weights(0), 2.0);
    EXPECT_THROW(aggregate_linear(ClusterPartition(3, {{1, 2}, {0}}), d), std::invalid_argument);
}

TEST(SvmSlacks, MarginAndMisclassified) {
    const Vector xi = slacks(vec({1.0, -0.5, 3.0}), vec({1, 1, -1}));
    EXPECT_EQ(xi(0), 0.0);
    EXPECT_EQ(xi(1), 1.5);
    EXPECT_EQ(xi(2), 4.0);
    EXPECT_EQ(primal_objective(2.0, xi, 0.1), 0.5 * 2.0 + 0.1 * 5.5);
}

TEST(SvmConvertToAggregated, MeansOfSlacks) {
    const Vector xi = vec({0, 2, 0.5});
    EXPECT_EQ(convert_to_aggregated(xi, ClusterPartition::singletons(3)), xi);
    const Vector agg = convert_to_aggregated(xi, ClusterPartition(3, {{0, 1}, {2}}));
    EXPECT_EQ(agg(0), 1.0);
    EXPECT_EQ(agg(1), 0.5);
}

TEST(SvmConvertToAggregated, FeasibleForTheAggregatedConstraints) {
    std::mt19937_64 gen(1);
    const auto d = testing_support::classes(gen, 50, 3, 0.3);
    const ClusterPartition p = init_svm_clusters(d, 8, 0);
    const Vector w = testing_support::gaussian(gen, 3, 1).col(0);
    const double b = 0.2;
    Vector f = d.x * w;
    f.array() += b;
    const Vector xi_bar = convert_to_aggregated(slacks(f, d.y), p);
    const auto agg = aggregate_linear(p, d);
    for (Eigen::Index k = 0; k < agg.y.size(); ++k) {
        const double lhs = agg.y(k) * (agg.x.row(k).dot(w) + b);
        EXPECT_GE(lhs, 1.0 - xi_bar(k) - 1e-12);
    }
}

TEST(SvmDisaggregateDual, Examples) {
    const ClusterPartition p(4, {{0, 1, 2}, {3}});
    const Vector a = disaggregate_dual(vec({0.6, 0.0}), p, 1.0);
    EXPECT_NEAR(a(0), 0.2, 1e-15);
    EXPECT_NEAR(a(2), 0.2, 1e-15);
    EXPECT_EQ(a(3), 0.0);
    EXPECT_EQ(disaggregate_dual(vec({0, 0}), p, 1.0), Vector::Zero(4));
    EXPECT_THROW(disaggregate_dual(vec({3.5, 0}), p, 1.0), std::invalid_argument);
    EXPECT_THROW(disaggregate_dual(vec({-0.1, 0}), p, 1.0), std::invalid_argument);
}

TEST(SvmDisaggregateDual, HyperplaneIsPreserved) {
    std::mt19937_64 gen(2);
    const auto d = testing_support::classes(gen, 40, 3, 0.5);
    const ClusterPartition p = init_svm_clusters(d, 6, 0);
    const auto agg = aggregate_linear(p, d);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector alpha(agg.y.size());
    for (Eigen::Index k = 0; k < alpha.size(); ++k) alpha(k) = unit(gen) * agg.weights(k) * 0.1;
    const Vector a = disaggregate_dual(alpha, p, 0.1);
    // Both sides accumulated independently.
    Vector left = Vector::Zero(3);
    for (Eigen::Index i = 0; i < 40; ++i) left += a(i) * d.y(i) * d.x.row(i).transpose();
    Vector right = Vector::Zero(3);
    for (Eigen::Index k = 0; k < alpha.size(); ++k) right += alpha(k) * agg.y(k) * agg.x.row(k).transpose();
    EXPECT_LT((left - right).lpNorm<Eigen::Infinity>(), 1e-10);
}

namespace {

bool together(const ClusterPartition& p, std::size_t a, std::size_t b) { return p.cluster_of(a) == p.cluster_of(b); }

}  // namespace

TEST(SvmDecluster, Examples) {
    // labels all +1; decision values chosen for each case
    const Vector y = vec({1, 1, 1, 1, 1, 1});
    const Vector f = vec({2.0, 3.0,   // outside the margin: kept
                          0.5, 1.5,   // straddling: split
                          1.0, 0.2}); // on the margin (hinge 0) and inside
    ClusterPartition p(6, {{0, 1}, {2, 3}, {4, 5}});
    EXPECT_FALSE(check_optimality(p, f, y));
    EXPECT_TRUE(decluster(p, f, y));
    EXPECT_TRUE(together(p, 0, 1));
    EXPECT_FALSE(together(p, 2, 3));
    EXPECT_FALSE(together(p, 4, 5));
    EXPECT_EQ(p.size(), 5u);
    EXPECT_TRUE(check_optimality(p, f, y));
    // the margin member joins the nonpositive-hinge side with the outside one
    ClusterPartition q(3, {{0, 1, 2}});
    decluster(q, vec({1.0, 2.0, 0.5}), vec({1, 1, 1}));
    EXPECT_TRUE(together(q, 0, 1));
    EXPECT_FALSE(together(q, 0, 2));
    EXPECT_TRUE(check_optimality(ClusterPartition::singletons(6), f, y));
    EXPECT_FALSE(positive_hinge(0.0));
    EXPECT_FALSE(positive_hinge(1e-10));
    EXPECT_TRUE(positive_hinge(1e-6));
}

TEST(SvmProblem, AllSingletonsMatchDirectSolve) {
    std::mt19937_64 gen(3);
    const auto d = testing_support::classes(gen, 80, 3, 0.4);
    SvmProblem problem(d);
    problem.initialize(ClusterPartition::singletons(80));
    const double f = problem.solve();
    const auto ref = oracle::svm_interior_point_linear(d.x, d.y, Vector::Constant(80, 0.1));
    EXPECT_LE(std::abs(f - ref.primal) / ref.primal, 1e-8);
    EXPECT_NEAR(problem.evaluate(), f, 1e-9);
    EXPECT_TRUE(problem.optimality_condition());
}

TEST(SvmProblem, SymmetricTwoClusterInstance) {
    const auto d = dataset(rows({{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}), vec({1, 1, -1, -1}));
    SvmOptions options;
    options.penalty = 10.0;
    SvmProblem problem(d, options);
    problem.initialize(ClusterPartition(4, {{0, 1}, {2, 3}}));
    problem.solve();
    problem.evaluate();
    EXPECT_NEAR(problem.model().w(0), 1.0, 1e-9);
    EXPECT_NEAR(problem.model().w(1), 0.0, 1e-9);
    EXPECT_NEAR(problem.model().b, 0.0, 1e-9);
}

TEST(SvmProblem, RunInvariants) {
    SyntheticSpec spec;
    spec.kind = ProblemKind::svm;
    spec.n = 600;
    spec.m = 4;
    spec.seed = 8;
    const Dataset d = generate(spec);
    SvmProblem problem(d);
    AidConfig config;
    config.gap_tolerance = 0.0;
    std::vector<double> lower, upper;
    const auto log = run_aid(problem, config, [&](const IterationRecord& r, const SvmProblem& p) {
        lower.push_back(r.lower);
        upper.push_back(r.upper);
        EXPECT_GE(r.upper, r.lower - 1e-9);
        for (const auto& c : p.partition().clusters()) {
            for (const auto i : c) EXPECT_EQ(d.y(static_cast<Eigen::Index>(i)), d.y(static_cast<Eigen::Index>(c.front())));
        }
        if (r.optimal) {
            EXPECT_LE(std::abs(r.upper - r.lower), 1e-6 * std::max(1.0, r.upper));
        }
    });
    EXPECT_EQ(log.reason, TerminationReason::optimality_condition);
    for (std::size_t t = 1; t < lower.size(); ++t) EXPECT_GE(lower[t] - lower[t - 1], -1e-9);
    for (const double f : lower)
        for (const double e : upper) EXPECT_LE(f, e + 1e-6 * std::max(1.0, e));
    const auto ref = oracle::svm_interior_point_linear(d.x, d.y, Vector::Constant(600, 0.1));
    EXPECT_LE(std::abs(log.final_record().upper - ref.primal) / ref.primal, 1e-4);
}

TEST(SvmProblem, GramPathMatchesCentroidPath) {
    SyntheticSpec spec;
    spec.kind = ProblemKind::svm;
    spec.n = 300;
    spec.m = 3;
    spec.seed = 9;
    const Dataset d = generate(spec);
    SvmOptions gram;
    gram.gram_path = true;
    SvmProblem by_centroids(d), by_gram(d, gram);
    EXPECT_FALSE(by_centroids.uses_gram());
    EXPECT_TRUE(by_gram.uses_gram());
    AidConfig config;
    config.gap_tolerance = 0.0;
    std::vector<double> a, b;
    run_aid(by_centroids, config, [&](const IterationRecord& r, const SvmProblem&) { a.push_back(r.lower); });
    run_aid(by_gram, config, [&](const IterationRecord& r, const SvmProblem&) { b.push_back(r.lower); });
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t t = 0; t < a.size(); ++t) EXPECT_NEAR(a[t], b[t], 1e-8);
}

TEST(SvmProblem, RbfKernelReachesOracleObjective) {
    SyntheticSpec spec;
    spec.kind = ProblemKind::svm;
    spec.n = 250;
    spec.m = 2;
    spec.seed = 10;
    const Dataset d = generate(spec);
    SvmOptions options;
    options.kernel = Kernel::rbf(0.5);
    options.penalty = 1.0;
    SvmProblem problem(d, options);
    AidConfig config;
    config.gap_tolerance = 0.0;
    const auto log = run_aid(problem, config);
    const auto ref = oracle::svm_interior_point_gram(gram_matrix(d.x, options.kernel), d.y, Vector::Ones(250));
    EXPECT_LE(std::abs(log.final_record().upper - ref.primal) / ref.primal, 1e-4);
    const Vector f = decision_values(problem.model(), d.x);
    EXPECT_LT((f - problem.decision()).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(SvmProblem, RejectsBadLabels) {
    const auto d = dataset(rows({{0}, {1}}), vec({1, 2}));
    EXPECT_THROW(SvmProblem problem(d), DataError);
}
