#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bbsim/profile.hpp"
#include "bbsim/workload.hpp"

namespace bbsim {

enum class QueueOrder { fcfs, sjf };

/// Simulated-annealing parameters of the plan-based policy.
struct AnnealConfig {
    double alpha = 1.0;
    double cooling_rate = 0.9;  // r
    int cooling_steps = 30;     // N
    int steps_per_temperature = 6;  // M
    std::size_t exhaustive_threshold = 5;

    void validate() const;
};

struct PolicyConfig {
    std::string name = "fcfs-bb";
    QueueOrder order = QueueOrder::fcfs;
    bool reserve_bb = true;
    bool backfilling = true;
    /// Filler: backfill without any head reservation.
    bool head_reservation = true;
    bool plan = false;
    AnnealConfig anneal;

    /// Name used in records: the policy name, or "plan-<alpha>".
    [[nodiscard]] std::string display_name() const;
};

/// One of fcfs, fcfs-easy, filler, fcfs-bb, sjf-bb, plan, plan-<alpha>.
/// Throws ConfigError on anything else.
[[nodiscard]] PolicyConfig policy_from_name(const std::string& name, double alpha = 1.0);

/// Queue and profile handed to one scheduling cycle. Jobs are owned by the
/// caller and outlive the state.
struct SchedulerState {
    std::vector<const JobSpec*> queue;
    AvailabilityProfile profile;
    Time now = 0;
};

enum class PlanPath { none, exhaustive, candidates, anneal };

[[nodiscard]] const char* to_string(PlanPath path);

/// What a cycle decided, plus diagnostics for invariant checks.
struct ScheduleDecision {
    std::vector<JobId> launches;  // launch order
    /// Reservations held during the cycle for jobs that did not start.
    std::vector<Reservation> future;
    /// EASY head reservation, and the head's earliest slot recomputed after
    /// backfilling with its own reservation removed.
    std::optional<Reservation> head_reservation;
    std::optional<Time> head_recheck;
    PlanPath plan_path = PlanPath::none;
    std::size_t plan_evaluations = 0;
    double plan_score = 0.0;
};

/// Launches queue jobs in order while they fit now; stops at the first
/// that does not. Launched jobs leave the queue and enter the profile.
std::vector<JobId> fcfs_pass(SchedulerState& state);

/// Launches every queue job that fits over its whole walltime without
/// touching the reservations already in the profile. No stop rule.
std::vector<JobId> backfill_pass(SchedulerState& state);

/// EASY backfilling: FCFS pass, reservation for the head (processors only,
/// or processors and burst buffers with reserve_bb), optional SJF sort of
/// the rest, backfill, then the head goes back to the front of the queue.
ScheduleDecision easy_schedule(SchedulerState& state, const PolicyConfig& cfg);

/// Greedy first fit in queue order with no reservations.
ScheduleDecision filler_schedule(SchedulerState& state);

/// Stable SJF order used by sjf-bb: walltime, then submit time, then id.
void sort_sjf(std::vector<const JobSpec*>& jobs);

}  // namespace bbsim
