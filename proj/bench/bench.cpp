// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>

#include "bbsim/engine.hpp"
#include "bbsim/planner.hpp"
#include "instances.hpp"

using namespace bbsim;

namespace {

void BM_exhaustive(benchmark::State& state) {
    const auto c = instances::random_cycle(static_cast<std::size_t>(state.range(0)), 42);
    const auto q = c.view();
    for (auto _ : state) benchmark::DoNotOptimize(exhaustive(q, c.base, c.now, 2.0).best.score);
}

void BM_exhaustive_serial(benchmark::State& state) {
    const auto c = instances::random_cycle(static_cast<std::size_t>(state.range(0)), 42);
    const auto q = c.view();
    for (auto _ : state) benchmark::DoNotOptimize(exhaustive_serial(q, c.base, c.now, 2.0).best.score);
}

std::vector<Permutation> shuffled(std::size_t n, std::size_t count) {
    std::mt19937_64 rng(7);
    std::vector<Permutation> out(count, Permutation(n));
    for (auto& p : out) {
        std::iota(p.begin(), p.end(), 0u);
        std::shuffle(p.begin(), p.end(), rng);
    }
    return out;
}

void BM_evaluate(benchmark::State& state) {
    const auto c = instances::random_cycle(20, 5);
    const auto q = c.view();
    const auto perms = shuffled(q.size(), static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_permutations(q, perms, c.base, c.now, 1.0));
}

void BM_evaluate_serial(benchmark::State& state) {
    const auto c = instances::random_cycle(20, 5);
    const auto q = c.view();
    const auto perms = shuffled(q.size(), static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_permutations_serial(q, perms, c.base, c.now, 1.0));
}

struct Batch {
    Platform platform = build_platform(PlatformConfig{});
    std::vector<JobSpec> jobs;
    std::vector<RunSpec> specs;
    Batch() {
        SyntheticWorkloadConfig wc;
        wc.n_jobs = 300;
        wc.bb_cap = platform.bb_capacity_total;
        jobs = synthetic_workload(wc, 1);
        for (const char* name : {"fcfs-easy", "filler", "fcfs-bb", "sjf-bb"}) {
            specs.push_back({&platform, &jobs, policy_from_name(name), SimConfig{}});
        }
    }
};

void BM_run_batch(benchmark::State& state) {
    const Batch b;
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(b.specs).size());
}

void BM_run_batch_serial(benchmark::State& state) {
    const Batch b;
    for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(b.specs).size());
}

}  // namespace

BENCHMARK(BM_exhaustive)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exhaustive_serial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate)->Arg(180)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_evaluate_serial)->Arg(180)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_run_batch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_run_batch_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
