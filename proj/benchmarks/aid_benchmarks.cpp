// AID against a direct solve of the same instance, plus the aggregation
// primitives. Sizes stay at desk scale; pass --benchmark_filter to narrow.

#include <benchmark/benchmark.h>

#include "aid/framework.hpp"
#include "aid/lad.hpp"
#include "aid/s3vm.hpp"
#include "aid/svm.hpp"
#include "aid/synthetic.hpp"

using namespace aid;

namespace {

Dataset instance(ProblemKind kind, benchmark::State& state) {
    SyntheticSpec spec;
    spec.kind = kind;
    spec.n = static_cast<std::size_t>(state.range(0));
    spec.m = static_cast<std::size_t>(state.range(1));
    spec.labeled_fraction = 0.1;
    spec.seed = 1;
    return generate(spec);
}

void BM_LadAid(benchmark::State& state) {
    const Dataset d = instance(ProblemKind::lad, state);
    std::size_t iterations = 0;
    for (auto _ : state) {
        lad::LadProblem problem(d);
        const auto log = run_aid(problem, AidConfig{});
        iterations = log.iterations();
        benchmark::DoNotOptimize(log.final_record().upper);
    }
    state.counters["T"] = static_cast<double>(iterations);
}

void BM_LadDirect(benchmark::State& state) {
    const Dataset d = instance(ProblemKind::lad, state);
    for (auto _ : state) {
        const auto [model, f] = lad::solve(lad::aggregate(ClusterPartition::singletons(d.n()), d));
        benchmark::DoNotOptimize(f);
    }
}

void BM_SvmAid(benchmark::State& state) {
    const Dataset d = instance(ProblemKind::svm, state);
    std::size_t iterations = 0;
    for (auto _ : state) {
        svm::SvmProblem problem(d);
        const auto log = run_aid(problem, AidConfig{});
        iterations = log.iterations();
        benchmark::DoNotOptimize(log.final_record().upper);
    }
    state.counters["T"] = static_cast<double>(iterations);
}

void BM_SvmDirect(benchmark::State& state) {
    const Dataset d = instance(ProblemKind::svm, state);
    for (auto _ : state) {
        const auto solution = svm::solve_direct(d, 0.1);
        benchmark::DoNotOptimize(solution.primal);
    }
}

void BM_S3vmAidFixed(benchmark::State& state) {
    const Dataset d = instance(ProblemKind::s3vm, state);
    for (auto _ : state) {
        s3vm::S3vmProblem problem(d);
        AidConfig config;
        config.fixed_iterations = 5;
        const auto log = run_aid(problem, config);
        benchmark::DoNotOptimize(log.final_record().upper);
    }
}

void BM_AggregateKernel(benchmark::State& state) {
    const Dataset d = instance(ProblemKind::svm, state);
    const Matrix gram = gram_matrix(d.x, Kernel::rbf(0.5));
    const ClusterPartition p = init_svm_clusters(d, d.n() / 10, 0);
    for (auto _ : state) benchmark::DoNotOptimize(svm::aggregate_kernel(p, gram).sum());
}

}  // namespace

BENCHMARK(BM_LadAid)->Args({10000, 5})->Args({40000, 5})->Args({40000, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LadDirect)->Args({10000, 5})->Args({40000, 5})->Args({40000, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SvmAid)->Args({10000, 10})->Args({40000, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SvmDirect)->Args({10000, 10})->Args({40000, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_S3vmAidFixed)->Args({2000, 5})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateKernel)->Args({2000, 5})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
