#pragma once

#include <random>
#include <vector>

#include "bbsim/profile.hpp"
#include "bbsim/workload.hpp"
#include "oracle.hpp"

namespace instances {

/// A contended scheduling cycle: a small cluster with a few running jobs
/// and `n` queued jobs, mirrored into the naive profile.
struct Cycle {
    std::vector<bbsim::JobSpec> queue;
    bbsim::CapacityTimeline base;
    oracle::NaiveProfile naive;
    bbsim::Time now;

    [[nodiscard]] std::vector<const bbsim::JobSpec*> view() const {
        std::vector<const bbsim::JobSpec*> out;
        for (const auto& j : queue) out.push_back(&j);
        return out;
    }
};

inline Cycle random_cycle(std::size_t n, std::uint64_t seed) {
    constexpr int kProcs = 16;
    constexpr bbsim::Bytes kBB = 1000;
    const bbsim::Time now = 3600;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> procs(1, 12), running(0, 3);
    std::uniform_int_distribution<bbsim::Time> wall(1, 40), ago(0, 1800);
    std::uniform_int_distribution<bbsim::Bytes> bb(0, 700);
    Cycle c{{}, bbsim::CapacityTimeline(kProcs, kBB, now), {kProcs, kBB, {}}, now};
    for (int i = running(rng); i > 0; --i) {
        const int p = procs(rng) / 2;
        const bbsim::Bytes b = bb(rng) / 2;
        const bbsim::Time end = now + wall(rng) * 60;
        if (c.base.fits(p, b, now, end - now)) {
            c.base.reserve(now, end, p, b);
            c.naive.blocks.push_back({now, end, p, b});
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        bbsim::JobSpec j;
        j.id = static_cast<bbsim::JobId>(i + 1);
        j.submit = now - ago(rng);
        j.n_procs = procs(rng);
        j.bb_total = bb(rng);
        j.bb_per_proc = j.bb_total / j.n_procs;
        j.walltime = j.runtime = wall(rng) * 60;
        j.phases = {j.runtime};
        c.queue.push_back(j);
    }
    return c;
}

}  // namespace instances
