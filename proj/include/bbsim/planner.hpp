#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "bbsim/policies.hpp"
#include "bbsim/profile.hpp"
#include "bbsim/workload.hpp"

namespace bbsim {

/// Queue positions, i.e. indices into the queue in arrival order.
using Permutation = std::vector<std::uint32_t>;
using QueueView = std::span<const JobSpec* const>;

/// Planned start of every queued job for one ordering.
struct ExecutionPlan {
    Permutation order;
    std::vector<Time> planned_start;  // indexed like `order`
    std::vector<Time> waits;          // planned_start - submit, indexed like `order`
    double score = 0.0;               // sum of waits^alpha
};

/// sum over jobs of wait^alpha, waits in seconds.
[[nodiscard]] double score(std::span<const Time> waits, double alpha);
[[nodiscard]] inline double score(const ExecutionPlan& plan, double alpha) { return score(plan.waits, alpha); }

/// Places each job of `order` at its earliest slot on a copy of `base`,
/// reserving its walltime before moving to the next.
/// Throws InfeasibleError for a job larger than the platform.
[[nodiscard]] ExecutionPlan build_plan(QueueView queue, const Permutation& order, const CapacityTimeline& base,
                                       Time now, double alpha);

/// Reusable scratch space for repeated plan construction.
class PlanBuilder {
public:
    PlanBuilder(QueueView queue, const CapacityTimeline& base, Time now, double alpha)
        : queue_(queue), base_(base), scratch_(base), now_(now), alpha_(alpha) {}

    /// Score only; cheaper than build() when the plan itself is not needed.
    [[nodiscard]] double evaluate(const Permutation& order);
    [[nodiscard]] ExecutionPlan build(const Permutation& order);

private:
    QueueView queue_;
    const CapacityTimeline& base_;
    CapacityTimeline scratch_;
    std::vector<Time> waits_;
    Time now_;
    double alpha_;
};

inline constexpr std::size_t kCandidateCount = 9;

/// FCFS, then ascending/descending by processors, by BB per processor, by
/// BB-per-processor over processors, and by walltime. Each is a stable sort
/// of the arrival order.
[[nodiscard]] std::array<Permutation, kCandidateCount> initial_candidates(QueueView queue);

struct SearchResult {
    ExecutionPlan best;
    std::size_t evaluations = 0;  // plan constructions
    PlanPath path = PlanPath::none;
};

/// Scores a batch of permutations; OpenMP-parallel over the batch.
[[nodiscard]] std::vector<double> evaluate_permutations(QueueView queue, std::span<const Permutation> perms,
                                                        const CapacityTimeline& base, Time now, double alpha);
/// Serial reference of evaluate_permutations().
[[nodiscard]] std::vector<double> evaluate_permutations_serial(QueueView queue, std::span<const Permutation> perms,
                                                               const CapacityTimeline& base, Time now, double alpha);

/// Largest queue exhaustive() accepts.
inline constexpr std::size_t kExhaustiveLimit = 10;

/// Minimum-score plan over all |Q|! orderings; ties go to the
/// lexicographically smallest permutation. OpenMP-parallel.
[[nodiscard]] SearchResult exhaustive(QueueView queue, const CapacityTimeline& base, Time now, double alpha);
/// Serial reference of exhaustive(), walking std::next_permutation.
[[nodiscard]] SearchResult exhaustive_serial(QueueView queue, const CapacityTimeline& base, Time now, double alpha);

/// k-th permutation of [0, n) in lexicographic order.
[[nodiscard]] Permutation nth_permutation(std::size_t n, std::uint64_t k);

/// Metropolis rule for an uphill move. With temperature <= 0 only strict
/// improvements pass.
[[nodiscard]] bool metropolis_accept(double current, double candidate, double temperature, double u);

/// Simulated annealing seeded by the nine initial candidates. Skips the
/// search and returns the best candidate when all candidates score equal.
[[nodiscard]] SearchResult anneal(QueueView queue, const CapacityTimeline& base, Time now, const AnnealConfig& cfg,
                                  std::mt19937_64& rng);

/// Plan-based cycle: exhaustive search for small queues, annealing above
/// the threshold. Jobs planned at `now` launch; the rest get reservations
/// for this cycle only.
ScheduleDecision plan_schedule(SchedulerState& state, const AnnealConfig& cfg, std::mt19937_64& rng);

}  // namespace bbsim
