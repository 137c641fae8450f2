#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "aid/kernel.hpp"
#include "aid/lad_lp.hpp"
#include "aid/s3vm_bnb.hpp"
#include "aid/svm_qp.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace aid;
using testing_support::gaussian;
using testing_support::rel;
using testing_support::rows;
using testing_support::vec;

// ---- oracles agree with each other before they judge anything else ----

TEST(Oracles, LadInteriorPointMatchesBasisEnumeration) {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index k = 6 + rep % 6;
        const Eigen::Index m = 1 + rep % 3;
        const RowMatrix x = gaussian(gen, k, m);
        const Vector y = gaussian(gen, k, 1).col(0);
        const Vector w = (gaussian(gen, k, 1).col(0).array().abs() + 0.5).matrix();
        const auto ipm = oracle::lad_interior_point(x, y, w);
        ASSERT_TRUE(ipm.converged);
        EXPECT_NEAR(ipm.primal, oracle::lad_bruteforce(x, y, w), 1e-8 * std::max(1.0, ipm.primal));
        EXPECT_NEAR(ipm.primal, ipm.dual, 1e-8 * std::max(1.0, ipm.primal));
    }
}

TEST(Oracles, SvmInteriorPointMatchesActiveSetEnumeration) {
    std::mt19937_64 gen(12);
    for (int rep = 0; rep < 15; ++rep) {
        const auto data = testing_support::classes(gen, 7, 2, 0.7);
        const Vector c = Vector::Constant(7, rep % 2 == 0 ? 0.5 : 4.0);
        const auto enumerated = oracle::svm_active_set_enumeration(gram_matrix(data.x, Kernel::linear()), data.y, c);
        const auto ipm = oracle::svm_interior_point_linear(data.x, data.y, c);
        ASSERT_TRUE(ipm.converged);
        EXPECT_NEAR(ipm.primal, enumerated.primal, 1e-8 * std::max(1.0, enumerated.primal));
        EXPECT_NEAR(ipm.dual, enumerated.dual, 1e-8 * std::max(1.0, enumerated.primal));
    }
}

// ---- weighted LAD ----

TEST(WeightedLad, InterceptOnlyUnitWeights) {
    const RowMatrix x = rows({{1}, {1}, {1}});
    const Vector y = vec({1, 2, 10});
    const Vector w = vec({1, 1, 1});
    const auto expected = oracle::weighted_median({1, 2, 10}, {1, 1, 1});
    EXPECT_DOUBLE_EQ(expected.beta, 2.0);
    EXPECT_DOUBLE_EQ(expected.objective, 9.0);
    const auto s = solve_weighted_lad(x, y, w);
    EXPECT_NEAR(s.beta(0), expected.beta, 1e-12);
    EXPECT_NEAR(s.objective, expected.objective, 1e-12);
}

TEST(WeightedLad, InterceptOnlyHeavyLastEntry) {
    const RowMatrix x = rows({{1}, {1}, {1}});
    const Vector y = vec({1, 2, 10});
    const Vector w = vec({1, 1, 5});
    const auto expected = oracle::weighted_median({1, 2, 10}, {1, 1, 5});
    EXPECT_DOUBLE_EQ(expected.beta, 10.0);
    EXPECT_DOUBLE_EQ(expected.objective, 17.0);
    const auto s = solve_weighted_lad(x, y, w);
    EXPECT_NEAR(s.beta(0), expected.beta, 1e-12);
    EXPECT_NEAR(s.objective, expected.objective, 1e-12);
}

TEST(WeightedLad, ExactFitHasZeroObjective) {
    std::mt19937_64 gen(3);
    const RowMatrix x = gaussian(gen, 30, 4);
    const Vector beta = vec({1.5, -2, 0.25, 3});
    const Vector y = x * beta;
    const auto s = solve_weighted_lad(x, y, Vector::Ones(30));
    EXPECT_NEAR(s.objective, 0.0, 1e-9);
    EXPECT_LT((s.beta - beta).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(WeightedLad, MatchesBasisEnumerationOnTinyInstances) {
    std::mt19937_64 gen(5);
    for (int rep = 0; rep < 60; ++rep) {
        const Eigen::Index k = 3 + rep % 10;  // up to 12
        const Eigen::Index m = std::min<Eigen::Index>(1 + rep % 3, k);
        const RowMatrix x = gaussian(gen, k, m);
        const Vector y = gaussian(gen, k, 1).col(0) * 3.0;
        Vector w = Vector::Ones(k);
        if (rep % 2 == 1) w = (gaussian(gen, k, 1).col(0).array().abs() * 4.0 + 1.0).matrix();
        const double expected = oracle::lad_bruteforce(x, y, w);
        const auto s = solve_weighted_lad(x, y, w);
        EXPECT_NEAR(s.objective, expected, 1e-9 * std::max(1.0, expected)) << "rep " << rep;
        EXPECT_NEAR(weighted_absolute_loss(x, y, w, s.beta), s.objective, 1e-9 * std::max(1.0, expected));
    }
}

TEST(WeightedLad, OptimalBasisInterpolatesRankRows) {
    std::mt19937_64 gen(6);
    const RowMatrix x = gaussian(gen, 50, 4);
    const Vector y = gaussian(gen, 50, 1).col(0);
    const auto s = solve_weighted_lad(x, y, Vector::Ones(50));
    const Vector r = y - x * s.beta;
    const auto zeros = std::count_if(r.begin(), r.end(), [](double v) { return std::abs(v) < 1e-9; });
    EXPECT_GE(zeros, 4);
    EXPECT_EQ(s.rank, 4u);
}

TEST(WeightedLad, MatchesInteriorPointOracleOnLargerInstances) {
    std::mt19937_64 gen(7);
    for (int rep = 0; rep < 6; ++rep) {
        const Eigen::Index k = 400;
        const Eigen::Index m = 2 + rep;
        const RowMatrix x = gaussian(gen, k, m);
        Vector y = x * gaussian(gen, m, 1).col(0);
        y += gaussian(gen, k, 1).col(0);
        const Vector w = (gaussian(gen, k, 1).col(0).array().abs() + 1.0).matrix();
        const auto ref = oracle::lad_interior_point(x, y, w);
        ASSERT_TRUE(ref.converged);
        const auto s = solve_weighted_lad(x, y, w);
        EXPECT_LE(rel(s.objective, ref.primal), 1e-9);
        LadSolverOptions ipm;
        ipm.force_interior_point = true;
        const auto warm = solve_weighted_lad(x, y, w, ipm);
        EXPECT_LE(rel(warm.objective, ref.primal), 1e-9);
        EXPECT_GT(warm.interior_iterations, 0u);
    }
}

TEST(WeightedLad, DependentColumnsAreReduced) {
    std::mt19937_64 gen(8);
    RowMatrix x(40, 3);
    x.leftCols(2) = gaussian(gen, 40, 2);
    x.col(2) = x.col(0) * 2.0;
    const Vector y = gaussian(gen, 40, 1).col(0);
    const auto s = solve_weighted_lad(x, y, Vector::Ones(40));
    const RowMatrix reduced = x.leftCols(2);
    const auto ref = oracle::lad_interior_point(reduced, y, Vector::Ones(40));
    EXPECT_EQ(s.rank, 2u);
    EXPECT_LE(rel(s.objective, ref.primal), 1e-9);
}

TEST(WeightedLad, RejectsBadInput) {
    const RowMatrix x = rows({{1}, {1}});
    EXPECT_THROW(solve_weighted_lad(x, vec({1, 2}), vec({1, 0})), std::invalid_argument);
    EXPECT_THROW(solve_weighted_lad(x, vec({1, 2, 3}), vec({1, 1, 1})), std::invalid_argument);
}

// ---- weighted SVM ----

namespace {

SvmInstance linear_instance(RowMatrix x, Vector y, Vector weights, double penalty) {
    SvmInstance inst;
    inst.x = std::move(x);
    inst.y = std::move(y);
    inst.weights = std::move(weights);
    inst.penalty = penalty;
    return inst;
}

// Symmetric instance: `copies` points at (1, 0) labeled +1 and as many at
// (-1, 0) labeled -1. Every Q entry equals 1, so by symmetry all alphas share
// one value a maximizing 2c a - (2c a)^2 / 2 over [0, M]: a = min(M, 1/(2c)).
struct SymmetricClosedForm {
    double alpha, w, b, xi, primal;
};
SymmetricClosedForm symmetric_pair(int copies, double penalty) {
    const double c = copies;
    const double a = std::min(penalty, 1.0 / (2.0 * c));
    const double w = 2.0 * c * a;
    const double xi = std::max(0.0, 1.0 - w);
    return {a, w, 0.0, xi, 0.5 * w * w + penalty * 2.0 * c * xi};
}

}  // namespace

TEST(WeightedSvm, SymmetricPairHandKkt) {
    const auto s = solve_weighted_svm(linear_instance(rows({{1, 0}, {-1, 0}}), vec({1, -1}), vec({1, 1}), 10.0));
    const auto expected = symmetric_pair(1, 10.0);
    EXPECT_NEAR(s.w(0), expected.w, 1e-9);
    EXPECT_NEAR(s.w(1), 0.0, 1e-12);
    EXPECT_NEAR(s.b, expected.b, 1e-9);
    EXPECT_NEAR(s.xi.maxCoeff(), 0.0, 1e-9);
    EXPECT_NEAR(s.primal, expected.primal, 1e-9);
    EXPECT_NEAR(s.alpha(0), expected.alpha, 1e-9);
    EXPECT_NEAR(s.primal, 0.5, 1e-9);
}

TEST(WeightedSvm, EqualWeightScalingKeepsHyperplane) {
    const auto s = solve_weighted_svm(linear_instance(rows({{1, 0}, {-1, 0}}), vec({1, -1}), vec({3, 3}), 10.0));
    EXPECT_NEAR(s.w(0), 1.0, 1e-9);
    EXPECT_NEAR(s.b, 0.0, 1e-9);
    EXPECT_NEAR(s.alpha(0), 0.5, 1e-9);
    EXPECT_LT(s.alpha(0), 30.0);
}

TEST(WeightedSvm, DuplicatedPairSmallPenaltyHitsBox) {
    const auto s = solve_weighted_svm(
        linear_instance(rows({{1, 0}, {1, 0}, {-1, 0}, {-1, 0}}), vec({1, 1, -1, -1}), Vector::Ones(4), 0.01));
    const auto expected = symmetric_pair(2, 0.01);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(s.alpha(i), expected.alpha, 1e-12);
    EXPECT_NEAR(s.w(0), expected.w, 1e-10);
    EXPECT_NEAR(s.xi(0), expected.xi, 1e-9);
    EXPECT_GT(s.xi(0), 0.0);
    EXPECT_NEAR(s.primal, expected.primal, 1e-9);
    EXPECT_NEAR(s.primal, s.dual, 1e-6);
}

TEST(WeightedSvm, MatchesActiveSetEnumerationOnTinyInstances) {
    std::mt19937_64 gen(21);
    for (int rep = 0; rep < 25; ++rep) {
        const auto data = testing_support::classes(gen, 8, 2, 0.5);
        Vector weights = Vector::Ones(8);
        if (rep % 3 == 1) weights = (gaussian(gen, 8, 1).col(0).array().abs() + 0.5).matrix();
        const double penalty = rep % 2 == 0 ? 0.3 : 5.0;
        const auto s = solve_weighted_svm(linear_instance(data.x, data.y, weights, penalty));
        const auto ref = oracle::svm_active_set_enumeration(gram_matrix(data.x, Kernel::linear()), data.y,
                                                            weights * penalty);
        EXPECT_NEAR(s.primal, ref.primal, 1e-8 * std::max(1.0, ref.primal)) << "rep " << rep;
        const Vector w_ref = data.x.transpose() * ref.alpha.cwiseProduct(data.y);
        EXPECT_LT((s.w - w_ref).lpNorm<Eigen::Infinity>(), 1e-6);
    }
}

TEST(WeightedSvm, MatchesInteriorPointAndDualityInvariants) {
    std::mt19937_64 gen(22);
    for (int rep = 0; rep < 5; ++rep) {
        const auto data = testing_support::classes(gen, 600, 5, 0.8);
        const Vector weights = (gaussian(gen, 600, 1).col(0).array().abs() + 0.2).matrix();
        const double penalty = 0.1;
        const auto s = solve_weighted_svm(linear_instance(data.x, data.y, weights, penalty));
        const auto ref = oracle::svm_interior_point_linear(data.x, data.y, weights * penalty);
        ASSERT_TRUE(ref.converged);
        EXPECT_LE(rel(s.primal, ref.primal), 1e-8);
        EXPECT_GE(s.primal, s.dual - 1e-6 * std::max(1.0, s.primal));
        EXPECT_NEAR(s.alpha.dot(data.y), 0.0, 1e-8);
        // complementary slackness: alpha_i xi_i ... slack at the upper bound only
        double cs = 0.0;
        for (Eigen::Index i = 0; i < 600; ++i) {
            const double margin = data.y(i) * s.decision(i) - 1.0 + s.xi(i);
            cs = std::max(cs, s.alpha(i) * std::abs(margin));
            cs = std::max(cs, (weights(i) * penalty - s.alpha(i)) * s.xi(i));
        }
        EXPECT_LE(cs, 1e-6);
    }
}

TEST(WeightedSvm, RbfMatchesInteriorPointOracle) {
    std::mt19937_64 gen(23);
    const auto data = testing_support::classes(gen, 120, 3, 0.6);
    const Kernel k = Kernel::rbf(0.5);
    SvmInstance inst;
    inst.x = data.x;
    inst.y = data.y;
    inst.weights = Vector::Ones(120);
    inst.penalty = 1.0;
    inst.kernel = k;
    const auto s = solve_weighted_svm(inst);
    const auto ref = oracle::svm_interior_point_gram(gram_matrix(data.x, k), data.y, Vector::Ones(120));
    ASSERT_TRUE(ref.converged);
    EXPECT_LE(rel(s.primal, ref.primal), 1e-8);
    EXPECT_LT((s.decision - ref.decision).lpNorm<Eigen::Infinity>(), 1e-5);
}

TEST(WeightedSvm, LinearAndPrecomputedGramAgree) {
    std::mt19937_64 gen(24);
    const auto data = testing_support::classes(gen, 200, 4, 0.5);
    const auto by_x = solve_weighted_svm(linear_instance(data.x, data.y, Vector::Ones(200), 0.1));
    SvmInstance inst;
    inst.gram = gram_matrix(data.x, Kernel::linear());
    inst.y = data.y;
    inst.weights = Vector::Ones(200);
    inst.penalty = 0.1;
    const auto by_gram = solve_weighted_svm(inst);
    EXPECT_NEAR(by_x.primal, by_gram.primal, 1e-8);
}

TEST(WeightedSvm, SingleClassNeedsFixedBias) {
    auto inst = linear_instance(rows({{1, 0}, {2, 0}}), vec({1, 1}), vec({1, 1}), 1.0);
    EXPECT_THROW(solve_weighted_svm(inst), std::invalid_argument);
    inst.fixed_bias = 0.0;
    const auto s = solve_weighted_svm(inst);
    EXPECT_DOUBLE_EQ(s.b, 0.0);
    EXPECT_NEAR(s.w(0), 1.0, 1e-8);  // 1/2 w^2 + (1 - w)_+ + (1 - 2w)_+ is minimized at w = 1
}

// ---- semi-supervised branch and bound ----

namespace {

S3vmBnbInstance bnb_instance(const RowMatrix& lx, const Vector& ly, double ml, const RowMatrix& ux, double mu) {
    S3vmBnbInstance inst;
    inst.labeled_x = lx;
    inst.labeled_y = ly;
    inst.labeled_cost = Vector::Constant(ly.size(), ml);
    inst.unlabeled_x = ux;
    inst.unlabeled_cost = Vector::Constant(ux.rows(), mu);
    return inst;
}

oracle::S3vmResult enumerate(const S3vmBnbInstance& inst, double mu) {
    const Eigen::Index l = inst.labeled_x.rows();
    const Eigen::Index u = inst.unlabeled_x.rows();
    RowMatrix x(l + u, inst.labeled_x.cols());
    x.topRows(l) = inst.labeled_x;
    x.bottomRows(u) = inst.unlabeled_x;
    Vector y = Vector::Zero(l + u);
    y.head(l) = inst.labeled_y;
    Vector cost = Vector::Zero(l + u);
    cost.head(l) = inst.labeled_cost;
    return oracle::s3vm_enumeration(x, y, cost, mu);
}

}  // namespace

TEST(S3vmBnb, NoUnlabeledReducesToWeightedSvm) {
    std::mt19937_64 gen(31);
    const auto data = testing_support::classes(gen, 30, 2, 0.7);
    const auto inst = bnb_instance(data.x, data.y, 2.0, RowMatrix(0, 2), 1.0);
    const auto r = solve_s3vm_bnb(inst);
    const auto svm = solve_weighted_svm(linear_instance(data.x, data.y, Vector::Ones(30), 2.0));
    EXPECT_TRUE(r.optimal);
    EXPECT_TRUE(r.d.empty());
    EXPECT_NEAR(r.objective, svm.primal, 1e-9);
}

TEST(S3vmBnb, OneUnlabeledClusterTakesBetterLabeling) {
    const auto inst = bnb_instance(rows({{1, 0}, {-1, 0}}), vec({1, -1}), 5.0, rows({{0.3, 1}}), 1.0);
    const auto r = solve_s3vm_bnb(inst);
    // Both labelings solved explicitly by the interior point oracle.
    const RowMatrix x = rows({{1, 0}, {-1, 0}, {0.3, 1}});
    const Vector cost = vec({5, 5, 1});
    const double plus = oracle::svm_interior_point_linear(x, vec({1, -1, 1}), cost).primal;
    const double minus = oracle::svm_interior_point_linear(x, vec({1, -1, -1}), cost).primal;
    EXPECT_TRUE(r.optimal);
    EXPECT_NEAR(r.objective, std::min(plus, minus), 1e-7);
    EXPECT_EQ(r.d.at(0), plus <= minus ? 1 : -1);
}

TEST(S3vmBnb, MatchesLabelingEnumeration) {
    std::mt19937_64 gen(32);
    for (int rep = 0; rep < 8; ++rep) {
        const auto labeled = testing_support::classes(gen, 10, 2, 1.0);
        const auto pool = testing_support::classes(gen, 4 + rep, 2, 1.0);
        const auto inst = bnb_instance(labeled.x, labeled.y, 5.0, pool.x, 1.0);
        const auto r = solve_s3vm_bnb(inst);
        const auto ref = enumerate(inst, 1.0);
        EXPECT_TRUE(r.optimal);
        EXPECT_LE(rel(r.objective, ref.objective), 1e-6) << "rep " << rep;
        EXPECT_NEAR(s3vm_objective(inst, r.w, r.b), r.objective, 1e-9 * std::max(1.0, r.objective));
    }
}

TEST(S3vmBnb, NodeLimitReportsNonOptimal) {
    std::mt19937_64 gen(33);
    const auto labeled = testing_support::classes(gen, 6, 2, 0.2);
    const auto pool = testing_support::classes(gen, 10, 2, 0.2);
    S3vmBnbOptions options;
    options.node_limit = 1;
    const auto r = solve_s3vm_bnb(bnb_instance(labeled.x, labeled.y, 5.0, pool.x, 1.0), options);
    EXPECT_LE(r.lower_bound, r.objective + 1e-9);
    if (!r.optimal) {
        EXPECT_EQ(r.nodes, 1u);
    }
}
