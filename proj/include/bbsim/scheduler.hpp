#pragma once

#include <cstdint>
#include <random>

#include "bbsim/policies.hpp"

namespace bbsim {

/// Runs one scheduling cycle of the configured policy. Owns the random
/// stream used by annealing so a simulation replays exactly from its seed.
class Scheduler {
public:
    Scheduler(PolicyConfig cfg, std::uint64_t seed);

    ScheduleDecision cycle(SchedulerState& state);

    [[nodiscard]] const PolicyConfig& config() const { return cfg_; }
    /// True when a cycle on unchanged state launches nothing, so idle ticks
    /// can be skipped without altering the schedule.
    [[nodiscard]] bool idempotent() const { return !cfg_.plan; }

private:
    PolicyConfig cfg_;
    std::mt19937_64 rng_;
};

}  // namespace bbsim
