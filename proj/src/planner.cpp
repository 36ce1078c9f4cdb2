#include "bbsim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bbsim/error.hpp"

namespace bbsim {

double score(std::span<const Time> waits, double alpha) {
    double total = 0.0;
    if (alpha == 1.0) {
        for (Time w : waits) total += static_cast<double>(w);
    } else {
        for (Time w : waits) total += std::pow(static_cast<double>(w), alpha);
    }
    return total;
}

double PlanBuilder::evaluate(const Permutation& order) {
    scratch_ = base_;
    waits_.clear();
    for (std::uint32_t index : order) {
        const JobSpec& job = *queue_[index];
        const Time start = scratch_.earliest_slot(job.n_procs, job.bb_total, job.walltime, now_);
        scratch_.reserve(start, start + job.walltime, job.n_procs, job.bb_total);
        waits_.push_back(start - job.submit);
    }
    return score(waits_, alpha_);
}

ExecutionPlan PlanBuilder::build(const Permutation& order) {
    ExecutionPlan plan;
    plan.order = order;
    plan.score = evaluate(order);
    plan.waits = waits_;
    plan.planned_start.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        plan.planned_start.push_back(waits_[i] + queue_[order[i]]->submit);
    }
    return plan;
}

ExecutionPlan build_plan(QueueView queue, const Permutation& order, const CapacityTimeline& base, Time now,
                         double alpha) {
    PlanBuilder builder(queue, base, now, alpha);
    return builder.build(order);
}

std::array<Permutation, kCandidateCount> initial_candidates(QueueView queue) {
    Permutation arrival(queue.size());
    std::iota(arrival.begin(), arrival.end(), 0U);

    auto sorted_by = [&](auto key, bool ascending) {
        Permutation p = arrival;
        std::stable_sort(p.begin(), p.end(), [&](std::uint32_t a, std::uint32_t b) {
            const auto ka = key(*queue[a]);
            const auto kb = key(*queue[b]);
            return ascending ? ka < kb : kb < ka;
        });
        return p;
    };
    auto procs = [](const JobSpec& j) { return j.n_procs; };
    auto bb_per_proc = [](const JobSpec& j) { return j.bb_per_proc; };
    auto ratio = [](const JobSpec& j) { return static_cast<double>(j.bb_per_proc) / j.n_procs; };
    auto walltime = [](const JobSpec& j) { return j.walltime; };

    return {arrival,
            sorted_by(procs, true),
            sorted_by(procs, false),
            sorted_by(bb_per_proc, true),
            sorted_by(bb_per_proc, false),
            sorted_by(ratio, true),
            sorted_by(ratio, false),
            sorted_by(walltime, true),
            sorted_by(walltime, false)};
}

namespace {

std::vector<ExecutionPlan> build_plans(QueueView queue, std::span<const Permutation> perms,
                                       const CapacityTimeline& base, Time now, double alpha) {
    std::vector<ExecutionPlan> plans(perms.size());
    const auto n = static_cast<std::ptrdiff_t>(perms.size());
    // Fan out only when the batch is worth a thread team.
#pragma omp parallel if (n * static_cast<std::ptrdiff_t>(queue.size()) >= 256)
    {
        PlanBuilder builder(queue, base, now, alpha);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            plans[static_cast<std::size_t>(i)] = builder.build(perms[static_cast<std::size_t>(i)]);
        }
    }
    return plans;
}

std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

void check_exhaustive_size(QueueView queue) {
    if (queue.size() > kExhaustiveLimit) {
        throw std::invalid_argument("exhaustive search limited to " + std::to_string(kExhaustiveLimit) + " jobs");
    }
}

}  // namespace

std::vector<double> evaluate_permutations(QueueView queue, std::span<const Permutation> perms,
                                          const CapacityTimeline& base, Time now, double alpha) {
    std::vector<double> scores(perms.size());
    const auto n = static_cast<std::ptrdiff_t>(perms.size());
#pragma omp parallel if (n * static_cast<std::ptrdiff_t>(queue.size()) >= 256)
    {
        PlanBuilder builder(queue, base, now, alpha);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            scores[static_cast<std::size_t>(i)] = builder.evaluate(perms[static_cast<std::size_t>(i)]);
        }
    }
    return scores;
}

std::vector<double> evaluate_permutations_serial(QueueView queue, std::span<const Permutation> perms,
                                                 const CapacityTimeline& base, Time now, double alpha) {
    std::vector<double> scores;
    scores.reserve(perms.size());
    PlanBuilder builder(queue, base, now, alpha);
    for (const auto& p : perms) scores.push_back(builder.evaluate(p));
    return scores;
}

Permutation nth_permutation(std::size_t n, std::uint64_t k) {
    std::vector<std::uint32_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0U);
    Permutation out;
    out.reserve(n);
    for (std::size_t i = n; i > 0; --i) {
        const std::uint64_t block = factorial(i - 1);
        const auto pick = static_cast<std::size_t>(k / block);
        k %= block;
        out.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return out;
}

SearchResult exhaustive(QueueView queue, const CapacityTimeline& base, Time now, double alpha) {
    check_exhaustive_size(queue);
    const std::uint64_t total = factorial(queue.size());
    double best_score = std::numeric_limits<double>::infinity();
    std::uint64_t best_index = 0;

#pragma omp parallel if (total >= 720)
    {
        int nthreads = 1;
        int tid = 0;
#ifdef _OPENMP
        nthreads = omp_get_num_threads();
        tid = omp_get_thread_num();
#endif
        // Contiguous lexicographic ranges keep next_permutation usable per thread.
        const std::uint64_t lo = total * static_cast<std::uint64_t>(tid) / static_cast<std::uint64_t>(nthreads);
        const std::uint64_t hi = total * static_cast<std::uint64_t>(tid + 1) / static_cast<std::uint64_t>(nthreads);
        double local_score = std::numeric_limits<double>::infinity();
        std::uint64_t local_index = 0;
        if (lo < hi) {
            PlanBuilder builder(queue, base, now, alpha);
            Permutation p = nth_permutation(queue.size(), lo);
            for (std::uint64_t k = lo; k < hi; ++k) {
                const double s = builder.evaluate(p);
                if (s < local_score) {
                    local_score = s;
                    local_index = k;
                }
                std::next_permutation(p.begin(), p.end());
            }
        }
#pragma omp critical(bbsim_exhaustive_reduce)
        {
            if (local_score < best_score || (local_score == best_score && local_index < best_index)) {
                best_score = local_score;
                best_index = local_index;
            }
        }
    }

    SearchResult result;
    result.best = build_plan(queue, nth_permutation(queue.size(), best_index), base, now, alpha);
    result.evaluations = static_cast<std::size_t>(total);
    result.path = PlanPath::exhaustive;
    return result;
}

SearchResult exhaustive_serial(QueueView queue, const CapacityTimeline& base, Time now, double alpha) {
    check_exhaustive_size(queue);
    PlanBuilder builder(queue, base, now, alpha);
    Permutation p(queue.size());
    std::iota(p.begin(), p.end(), 0U);
    Permutation best_order = p;
    double best_score = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    do {
        const double s = builder.evaluate(p);
        ++evaluations;
        if (s < best_score) {
            best_score = s;
            best_order = p;
        }
    } while (std::next_permutation(p.begin(), p.end()));

    SearchResult result;
    result.best = builder.build(best_order);
    result.evaluations = evaluations;
    result.path = PlanPath::exhaustive;
    return result;
}

bool metropolis_accept(double current, double candidate, double temperature, double u) {
    if (candidate < current) return true;
    if (!(temperature > 0.0)) return false;
    return u < std::exp((current - candidate) / temperature);
}

SearchResult anneal(QueueView queue, const CapacityTimeline& base, Time now, const AnnealConfig& cfg,
                    std::mt19937_64& rng) {
    cfg.validate();
    if (queue.size() < 2) throw std::invalid_argument("annealing needs at least two jobs");

    const auto candidates = initial_candidates(queue);
    auto plans = build_plans(queue, candidates, base, now, cfg.alpha);

    SearchResult result;
    result.evaluations = plans.size();
    std::size_t best_i = 0;
    std::size_t worst_i = 0;
    for (std::size_t i = 1; i < plans.size(); ++i) {
        if (plans[i].score < plans[best_i].score) best_i = i;
        if (plans[i].score > plans[worst_i].score) worst_i = i;
    }
    const double worst_score = plans[worst_i].score;
    result.best = std::move(plans[best_i]);
    if (result.best.score == worst_score) {
        result.path = PlanPath::candidates;
        return result;
    }
    result.path = PlanPath::anneal;

    double temperature = worst_score - result.best.score;
    Permutation current = result.best.order;
    double current_score = result.best.score;

    PlanBuilder builder(queue, base, now, cfg.alpha);
    std::uniform_int_distribution<std::size_t> first_pos(0, queue.size() - 1);
    std::uniform_int_distribution<std::size_t> second_pos(0, queue.size() - 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int outer = 0; outer < cfg.cooling_steps; ++outer) {
        for (int inner = 0; inner < cfg.steps_per_temperature; ++inner) {
            const std::size_t a = first_pos(rng);
            std::size_t b = second_pos(rng);
            if (b >= a) ++b;
            Permutation next = current;
            std::swap(next[a], next[b]);

            ExecutionPlan plan = builder.build(next);
            ++result.evaluations;
            if (plan.score < result.best.score) {
                current = next;
                current_score = plan.score;
                result.best = std::move(plan);
            } else if (plan.score < current_score ||
                       metropolis_accept(current_score, plan.score, temperature, unit(rng))) {
                current = std::move(next);
                current_score = plan.score;
            }
        }
        temperature *= cfg.cooling_rate;
    }
    return result;
}

ScheduleDecision plan_schedule(SchedulerState& state, const AnnealConfig& cfg, std::mt19937_64& rng) {
    ScheduleDecision decision;
    if (state.queue.empty()) return decision;

    const QueueView queue(state.queue);
    const CapacityTimeline& base = state.profile.timeline();
    SearchResult search = queue.size() <= cfg.exhaustive_threshold || queue.size() < 2
                              ? exhaustive(queue, base, state.now, cfg.alpha)
                              : anneal(queue, base, state.now, cfg, rng);

    std::vector<bool> launched(queue.size(), false);
    const ExecutionPlan& plan = search.best;
    for (std::size_t i = 0; i < plan.order.size(); ++i) {
        const JobSpec& job = *queue[plan.order[i]];
        const Time start = plan.planned_start[i];
        if (start == state.now) {
            state.profile.add_reservation(
                {job.id, start, start + job.walltime, job.n_procs, job.bb_total, ReservationKind::running});
            decision.launches.push_back(job.id);
            launched[plan.order[i]] = true;
        } else {
            decision.future.push_back(
                {job.id, start, start + job.walltime, job.n_procs, job.bb_total, ReservationKind::future});
        }
    }
    std::vector<const JobSpec*> remaining;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        if (!launched[i]) remaining.push_back(queue[i]);
    }
    state.queue = std::move(remaining);

    decision.plan_path = search.path;
    decision.plan_evaluations = search.evaluations;
    decision.plan_score = plan.score;
    return decision;
}

}  // namespace bbsim
