#include "bbsim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "bbsim/error.hpp"

namespace bbsim {

void AnnealConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw ConfigError("cooling rate must lie in (0, 1)");
    if (cooling_steps < 1 || steps_per_temperature < 1) throw ConfigError("annealing step counts must be >= 1");
    if (exhaustive_threshold > 10) throw ConfigError("exhaustive threshold is limited to 10 jobs");
}

std::string PolicyConfig::display_name() const {
    if (!plan) return name;
    std::ostringstream os;
    os << "plan-" << anneal.alpha;
    return os.str();
}

PolicyConfig policy_from_name(const std::string& name, double alpha) {
    PolicyConfig cfg;
    cfg.name = name;
    if (name == "fcfs") {
        cfg.backfilling = false;
        cfg.reserve_bb = false;
    } else if (name == "fcfs-easy") {
        cfg.reserve_bb = false;
    } else if (name == "filler") {
        cfg.head_reservation = false;
        cfg.reserve_bb = false;
    } else if (name == "fcfs-bb") {
        // defaults
    } else if (name == "sjf-bb") {
        cfg.order = QueueOrder::sjf;
    } else if (name == "plan" || name.rfind("plan-", 0) == 0) {
        cfg.plan = true;
        cfg.name = "plan";
        cfg.anneal.alpha = alpha;
        if (name != "plan") {
            const std::string value = name.substr(5);
            try {
                std::size_t used = 0;
                cfg.anneal.alpha = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ConfigError("bad alpha in policy name '" + name + "'");
            }
        }
        cfg.anneal.validate();
    } else {
        throw ConfigError("unknown policy '" + name + "' (expected fcfs, fcfs-easy, filler, fcfs-bb, sjf-bb, plan)");
    }
    return cfg;
}

const char* to_string(PlanPath path) {
    switch (path) {
        case PlanPath::none: return "none";
        case PlanPath::exhaustive: return "exhaustive";
        case PlanPath::candidates: return "candidates";
        case PlanPath::anneal: return "anneal";
    }
    return "?";
}

namespace {

void launch(SchedulerState& state, const JobSpec& job) {
    state.profile.add_reservation(
        {job.id, state.now, state.now + job.walltime, job.n_procs, job.bb_total, ReservationKind::running});
}

bool fits_now(const SchedulerState& state, const JobSpec& job) {
    return state.profile.fits(job.n_procs, job.bb_total, state.now, job.walltime);
}

}  // namespace

void sort_sjf(std::vector<const JobSpec*>& jobs) {
    std::stable_sort(jobs.begin(), jobs.end(), [](const JobSpec* a, const JobSpec* b) {
        return std::tie(a->walltime, a->submit, a->id) < std::tie(b->walltime, b->submit, b->id);
    });
}

std::vector<JobId> fcfs_pass(SchedulerState& state) {
    std::vector<JobId> launched;
    auto it = state.queue.begin();
    while (it != state.queue.end() && fits_now(state, **it)) {
        launch(state, **it);
        launched.push_back((*it)->id);
        ++it;
    }
    state.queue.erase(state.queue.begin(), it);
    return launched;
}

std::vector<JobId> backfill_pass(SchedulerState& state) {
    std::vector<JobId> launched;
    std::vector<const JobSpec*> remaining;
    remaining.reserve(state.queue.size());
    for (const JobSpec* job : state.queue) {
        if (fits_now(state, *job)) {
            launch(state, *job);
            launched.push_back(job->id);
        } else {
            remaining.push_back(job);
        }
    }
    state.queue = std::move(remaining);
    return launched;
}

ScheduleDecision easy_schedule(SchedulerState& state, const PolicyConfig& cfg) {
    ScheduleDecision decision;
    decision.launches = fcfs_pass(state);
    if (!cfg.backfilling || state.queue.empty()) return decision;

    const JobSpec* head = state.queue.front();
    state.queue.erase(state.queue.begin());

    const Bytes reserved_bb = cfg.reserve_bb ? head->bb_total : 0;
    const Time start = state.profile.earliest_slot(head->n_procs, reserved_bb, head->walltime, state.now);
    const Reservation head_res{head->id, start, start + head->walltime, head->n_procs, reserved_bb,
                               ReservationKind::future};
    state.profile.add_reservation(head_res);

    if (cfg.order == QueueOrder::sjf) sort_sjf(state.queue);
    const auto backfilled = backfill_pass(state);
    decision.launches.insert(decision.launches.end(), backfilled.begin(), backfilled.end());

    // Reacquired next cycle.
    state.profile.remove_reservation(head->id);
    decision.head_recheck = state.profile.earliest_slot(head->n_procs, reserved_bb, head->walltime, state.now);
    decision.head_reservation = head_res;
    decision.future.push_back(head_res);
    state.queue.insert(state.queue.begin(), head);
    return decision;
}

ScheduleDecision filler_schedule(SchedulerState& state) {
    ScheduleDecision decision;
    decision.launches = backfill_pass(state);
    return decision;
}

}  // namespace bbsim
