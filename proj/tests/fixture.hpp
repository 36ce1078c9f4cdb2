#pragma once

#include <vector>

#include "bbsim/platform.hpp"
#include "bbsim/workload.hpp"

namespace fixture {

inline constexpr bbsim::Bytes kTB = 1'000'000'000'000;
inline constexpr bbsim::Time kMin = 60;

/// The eight-job example: 4 CPUs, 10 TB, walltime equal to runtime.
inline std::vector<bbsim::JobSpec> example_jobs() {
    struct Row {
        int id, submit, runtime, procs, bb_tb;
    };
    const Row rows[] = {{1, 0, 10, 1, 4}, {2, 0, 4, 1, 2}, {3, 1, 1, 3, 8}, {4, 2, 3, 2, 4},
                        {5, 3, 1, 3, 4},  {6, 3, 1, 2, 2}, {7, 4, 5, 1, 2}, {8, 4, 3, 2, 4}};
    std::vector<bbsim::JobSpec> jobs;
    for (const auto& r : rows) {
        bbsim::JobSpec j;
        j.id = r.id;
        j.submit = r.submit * kMin;
        j.runtime = r.runtime * kMin;
        j.walltime = j.runtime;
        j.n_procs = r.procs;
        j.bb_total = r.bb_tb * kTB;
        j.bb_per_proc = j.bb_total / j.n_procs;
        j.phases = {j.runtime};
        jobs.push_back(j);
    }
    return jobs;
}

inline bbsim::Platform example_platform() { return bbsim::build_platform(bbsim::example_platform_config()); }

inline bbsim::JobSpec job(bbsim::JobId id, bbsim::Time submit, bbsim::Time walltime, int procs, bbsim::Bytes bb,
                          bbsim::Time runtime = 0) {
    bbsim::JobSpec j;
    j.id = id;
    j.submit = submit;
    j.runtime = runtime > 0 ? runtime : walltime;
    j.walltime = walltime;
    j.n_procs = procs;
    j.bb_total = bb;
    j.bb_per_proc = bb / procs;
    j.phases = {j.runtime};
    return j;
}

}  // namespace fixture
