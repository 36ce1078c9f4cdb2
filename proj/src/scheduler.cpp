#include "bbsim/scheduler.hpp"

#include <utility>

#include "bbsim/planner.hpp"

namespace bbsim {

Scheduler::Scheduler(PolicyConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
    if (cfg_.plan) cfg_.anneal.validate();
}

ScheduleDecision Scheduler::cycle(SchedulerState& state) {
    if (cfg_.plan) return plan_schedule(state, cfg_.anneal, rng_);
    if (!cfg_.head_reservation) return filler_schedule(state);
    return easy_schedule(state, cfg_);
}

}  // namespace bbsim
