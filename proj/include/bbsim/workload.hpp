#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bbsim/platform.hpp"
#include "bbsim/types.hpp"

namespace bbsim {

/// A rigid parallel job.
struct JobSpec {
    JobId id = 0;
    Time submit = 0;
    Time runtime = 0;   // actual processing time
    Time walltime = 0;  // user estimate, upper bound on runtime
    int n_procs = 1;
    Bytes bb_per_proc = 0;
    Bytes bb_total = 0;  // n_procs * bb_per_proc; bb_per_proc is the floor if indivisible
    int n_phases = 1;
    /// Compute phase durations; empty until generate_phases() fills them.
    std::vector<Time> phases;

    friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

/// Data movement and compute layout of one job.
struct PhasePlan {
    std::vector<Time> compute_durations;
    Bytes checkpoint_bytes = 0;  // written after every phase but the last
    Bytes stage_in_bytes = 0;
    Bytes stage_out_bytes = 0;

    [[nodiscard]] int n_checkpoints() const {
        return compute_durations.empty() ? 0 : static_cast<int>(compute_durations.size()) - 1;
    }
};

struct WorkloadPart {
    int index = 0;
    std::vector<JobSpec> jobs;  // submit times re-based to the part start
};

struct SwfParseResult {
    std::vector<JobSpec> jobs;
    std::size_t dropped = 0;   // records with runtime <= 0 or procs <= 0
    std::size_t clamped = 0;   // records whose walltime was raised to runtime
    std::size_t records = 0;   // data lines seen
};

/// Parses a Standard Workload Format trace. Burst-buffer and phase fields
/// are left unset. Throws ParseError (with the line number) on records that
/// do not have exactly 18 numeric fields.
[[nodiscard]] SwfParseResult parse_swf(std::istream& in);

/// Draws bb_per_proc i.i.d. from the model, keyed on (seed, job id), and
/// sets bb_total = n_procs * bb_per_proc.
void synthesize_bb(std::vector<JobSpec>& jobs, const LogNormalModel& model, std::uint64_t seed);

/// `n_phases` equal durations summing to `runtime`, remainder on the last.
/// Throws std::invalid_argument unless 1 <= n_phases <= runtime.
[[nodiscard]] std::vector<Time> split_runtime(Time runtime, int n_phases);

/// Splits the runtime into 1..10 equal phases (remainder to the last); the
/// count is uniform, keyed on (seed, job id), and capped at runtime seconds.
[[nodiscard]] PhasePlan generate_phases(const JobSpec& job, std::uint64_t seed);

/// Stage and checkpoint volumes for a job whose phases are already set.
[[nodiscard]] PhasePlan phase_plan(const JobSpec& job);

/// Applies generate_phases() to every job, storing n_phases and phases.
void attach_phases(std::vector<JobSpec>& jobs, std::uint64_t seed);

/// Sixteen three-week parts; jobs past the last part are discarded.
/// Input must be sorted by submit time.
[[nodiscard]] std::vector<WorkloadPart> split_parts(const std::vector<JobSpec>& jobs);

/// Throws ConfigError describing the first violated JobSpec invariant.
void validate_job(const JobSpec& job);

// Workload file: JSON lines, a header object followed by one job per line.
void write_workload(std::ostream& out, const std::vector<JobSpec>& jobs);
[[nodiscard]] std::vector<JobSpec> read_workload(std::istream& in);

/// Parameters of the synthetic generator used for stress and comparison runs.
struct SyntheticWorkloadConfig {
    std::size_t n_jobs = 2000;
    double mean_interarrival = 300.0;  // seconds, exponential
    int max_procs = 64;
    Time min_runtime = 60;
    Time max_runtime = 4 * 3600;
    double max_overestimate = 3.0;  // walltime = runtime * U(1, max_overestimate)
    LogNormalModel bb_model;
    /// Jobs whose total request exceeds this are redrawn; 0 disables the cap.
    Bytes bb_cap = 0;
};

/// Poisson arrivals, log-uniform sizes and runtimes, log-normal BB requests
/// and generated phases. Deterministic for a given seed.
[[nodiscard]] std::vector<JobSpec> synthetic_workload(const SyntheticWorkloadConfig& cfg, std::uint64_t seed);

/// Per-job random stream derived from (seed, job id, purpose).
[[nodiscard]] std::uint64_t job_stream_seed(std::uint64_t seed, JobId id, std::uint64_t salt);

}  // namespace bbsim
