#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbsim/link.hpp"
#include "bbsim/metrics.hpp"
#include "bbsim/platform.hpp"
#include "bbsim/policies.hpp"
#include "bbsim/workload.hpp"

namespace bbsim {

struct SimConfig {
    Time tick_period_s = 60;
    /// Off: jobs hold their resources for exactly `runtime`, no transfers.
    bool io_model = true;
    /// Also run a cycle on the next whole second after any submission or
    /// completion instead of waiting for the next tick.
    bool event_triggered = false;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Kinds in tie-break priority order: at equal time a lower value runs first.
enum class EventKind : std::uint8_t {
    job_finished = 0,
    transfer_complete = 1,
    phase_complete = 2,
    walltime_expired = 3,
    job_submitted = 4,
    scheduler_tick = 5,
};

[[nodiscard]] const char* to_string(EventKind kind);

struct Event {
    Nanos time = 0;
    EventKind kind = EventKind::scheduler_tick;
    std::uint64_t seq = 0;  // insertion order, final tie-break
    JobId job = 0;
    /// Job stage token or link generation; stale events are dropped.
    std::uint64_t token = 0;
};

/// Strict total order (time, kind, seq).
[[nodiscard]] bool event_before(const Event& a, const Event& b);

enum class Stage { stage_in, compute, checkpoint, stage_out, finished };

[[nodiscard]] const char* to_string(Stage stage);

struct RunningJob {
    const JobSpec* job = nullptr;
    PhasePlan plan;
    std::vector<NodeId> nodes;
    /// Bytes held on each storage node, indexed like Platform::storage_nodes.
    std::vector<Bytes> bb_shares;
    Time start = 0;
    Stage stage = Stage::stage_in;
    int phase = 0;  // current compute phase, 0-based
    std::uint64_t token = 0;
    std::optional<TransferId> stage_transfer;  // stage-in or stage-out in flight
    bool stage_out_done = false;
    std::vector<Bytes> drain_queue;             // checkpoints waiting to drain, FIFO
    std::optional<TransferId> drain_transfer;  // drain in flight
    int checkpoints_done = 0;
    int drains_done = 0;
};

/// Read-only view handed to observers.
struct EngineView {
    const Platform& platform;
    Nanos now;
    const std::map<JobId, RunningJob>& running;
    const std::vector<const JobSpec*>& queue;
    const SharedLink& pfs;
};

/// Hooks for tests and tracing. Called after the engine's own checks.
class SimObserver {
public:
    virtual ~SimObserver() = default;
    virtual void on_event(const Event&, const EngineView&) {}
    /// `after` holds the cycle's final profile and queue.
    virtual void on_cycle(const ScheduleDecision&, const SchedulerState& /*after*/, const EngineView&) {}
};

struct SimStats {
    std::size_t events = 0;
    std::size_t cycles = 0;
    std::size_t killed = 0;
    std::size_t transfers = 0;
    Bytes bytes_moved = 0;
    std::map<std::string, std::size_t> plan_paths;  // cycles per search path
    std::size_t plan_evaluations = 0;
    Nanos end_time = 0;
};

struct SimResult {
    std::vector<JobRecord> records;  // in workload order
    SimStats stats;
};

/// Ids of jobs that can never run: more processors than compute nodes or
/// more burst buffer than the platform holds.
[[nodiscard]] std::vector<JobId> find_infeasible(const Platform& platform, const std::vector<JobSpec>& jobs);

/// Simulates `jobs` (sorted by submit) to completion. Throws InfeasibleError
/// if any job can never run and InternalError on a broken invariant.
/// With `trace`, writes one JSON object per line for every job start and end.
[[nodiscard]] SimResult run(const Platform& platform, const std::vector<JobSpec>& jobs, const PolicyConfig& policy,
                            const SimConfig& sim, SimObserver* observer = nullptr, std::ostream* trace = nullptr);

/// Independent simulations for batch evaluation.
struct RunSpec {
    const Platform* platform = nullptr;
    const std::vector<JobSpec>* jobs = nullptr;
    PolicyConfig policy;
    SimConfig sim;
};

/// Runs every spec; OpenMP-parallel over specs, results in spec order.
[[nodiscard]] std::vector<SimResult> run_batch(const std::vector<RunSpec>& specs);
/// Serial reference of run_batch().
[[nodiscard]] std::vector<SimResult> run_batch_serial(const std::vector<RunSpec>& specs);

}  // namespace bbsim
