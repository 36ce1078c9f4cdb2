#include "bbsim/engine.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "bbsim/error.hpp"
#include "bbsim/profile.hpp"
#include "bbsim/scheduler.hpp"

namespace bbsim {

void SimConfig::validate() const {
    if (tick_period_s < 1) throw ConfigError("tick period must be at least one second");
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::job_finished: return "job_finished";
        case EventKind::transfer_complete: return "transfer_complete";
        case EventKind::phase_complete: return "phase_complete";
        case EventKind::walltime_expired: return "walltime_expired";
        case EventKind::job_submitted: return "job_submitted";
        case EventKind::scheduler_tick: return "scheduler_tick";
    }
    return "?";
}

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::stage_in: return "stage_in";
        case Stage::compute: return "compute";
        case Stage::checkpoint: return "checkpoint";
        case Stage::stage_out: return "stage_out";
        case Stage::finished: return "finished";
    }
    return "?";
}

bool event_before(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.seq < b.seq;
}

std::vector<JobId> find_infeasible(const Platform& platform, const std::vector<JobSpec>& jobs) {
    std::vector<JobId> bad;
    for (const auto& job : jobs) {
        if (job.n_procs > platform.n_compute() || job.bb_total > platform.bb_capacity_total) bad.push_back(job.id);
    }
    return bad;
}

namespace {

double seconds(Nanos t) { return static_cast<double>(t) / static_cast<double>(kNanosPerSecond); }

class Engine {
public:
    Engine(const Platform& platform, const std::vector<JobSpec>& jobs, const PolicyConfig& policy,
           const SimConfig& sim, SimObserver* observer, std::ostream* trace)
        : platform_(platform),
          jobs_(jobs),
          sim_(sim),
          scheduler_(policy, sim.seed),
          policy_name_(policy.display_name()),
          observer_(observer),
          trace_(trace),
          pfs_(platform.pfs_link.bandwidth),
          pools_(platform.bb_capacity_per_node),
          records_(jobs.size()) {
        for (int i = 0; i < platform.n_compute(); ++i) free_nodes_.insert(platform.compute_nodes[i].id);
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            if (!index_.emplace(jobs[i].id, i).second) {
                throw ConfigError("duplicate job id " + std::to_string(jobs[i].id));
            }
        }
    }

    SimResult run() {
        for (const auto& job : jobs_) push(to_nanos(job.submit), EventKind::job_submitted, job.id, 0);
        while (!events_.empty()) {
            const Event ev = events_.top();
            events_.pop();
            if (ev.time < now_) throw InternalError("event queue went back in time");
            now_ = ev.time;
            if (!dispatch(ev)) continue;
            ++stats_.events;
            stats_.end_time = now_;
            sync_link();
            check_invariants();
            if (observer_) observer_->on_event(ev, view());
        }
        if (!queue_.empty() || !running_.empty() || pfs_.active() != 0) {
            throw InternalError("simulation ended with " + std::to_string(queue_.size()) + " queued and " +
                                std::to_string(running_.size()) + " running jobs");
        }
        SimResult result;
        result.records = std::move(records_);
        result.stats = std::move(stats_);
        return result;
    }

private:
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const { return event_before(b, a); }
    };

    EngineView view() const { return EngineView{platform_, now_, running_, queue_, pfs_}; }

    void push(Nanos t, EventKind kind, JobId job, std::uint64_t token) {
        events_.push(Event{t, kind, next_seq_++, job, token});
    }

    /// Returns false for stale events.
    bool dispatch(const Event& ev) {
        switch (ev.kind) {
            case EventKind::job_submitted: return on_submit(ev);
            case EventKind::scheduler_tick: return on_tick(ev);
            case EventKind::transfer_complete: return on_transfers(ev);
            case EventKind::phase_complete: return on_phase(ev);
            case EventKind::walltime_expired: return on_walltime(ev);
            case EventKind::job_finished: return on_finished(ev);
        }
        return false;
    }

    // Ticks fall on multiples of the period. Idempotent policies only need a
    // cycle after something changed; the others tick while jobs wait.
    void request_tick(Nanos at) {
        if (next_tick_ && *next_tick_ <= at) return;
        next_tick_ = at;
        push(at, EventKind::scheduler_tick, 0, ++tick_token_);
    }

    Nanos tick_at_or_after(Nanos t) const {
        const Nanos period = to_nanos(sim_.tick_period_s);
        return (t + period - 1) / period * period;
    }

    void mark_changed() {
        dirty_ = true;
        if (sim_.event_triggered) {
            request_tick((now_ + kNanosPerSecond - 1) / kNanosPerSecond * kNanosPerSecond);
        } else {
            request_tick(tick_at_or_after(now_));
        }
    }

    bool on_submit(const Event& ev) {
        const JobSpec& job = jobs_[index_.at(ev.job)];
        queue_.push_back(&job);
        trace_line({{"event", "submit"}, {"job", job.id}});
        mark_changed();
        return true;
    }

    bool on_tick(const Event& ev) {
        if (ev.token != tick_token_) return false;
        next_tick_.reset();
        if (!dirty_ && scheduler_.idempotent()) return false;
        dirty_ = false;
        if (now_ % kNanosPerSecond != 0) throw InternalError("scheduler tick off the second grid");
        const Time now_s = now_ / kNanosPerSecond;

        SchedulerState state{queue_, AvailabilityProfile(platform_.n_compute(), platform_.bb_capacity_total, now_s),
                             now_s};
        for (const auto& [id, rj] : running_) {
            const Time end = rj.start + rj.job->walltime;
            if (end <= now_s) throw InternalError("job " + std::to_string(id) + " outlived its walltime");
            state.profile.add_reservation(
                {id, now_s, end, rj.job->n_procs, rj.job->bb_total, ReservationKind::running});
        }

        const ScheduleDecision decision = scheduler_.cycle(state);
        ++stats_.cycles;
        if (decision.plan_path != PlanPath::none) {
            ++stats_.plan_paths[to_string(decision.plan_path)];
            stats_.plan_evaluations += decision.plan_evaluations;
        }
        if (decision.head_reservation && decision.head_recheck &&
            *decision.head_recheck != decision.head_reservation->start) {
            throw InternalError("backfilling delayed the reservation of job " +
                                std::to_string(decision.head_reservation->job_id));
        }
        queue_ = state.queue;
        for (JobId id : decision.launches) launch(jobs_[index_.at(id)], now_s);

        if (!scheduler_.idempotent() && !queue_.empty()) request_tick(now_ + to_nanos(sim_.tick_period_s));
        if (observer_) observer_->on_cycle(decision, state, view());
        return true;
    }

    void launch(const JobSpec& job, Time start) {
        RunningJob rj;
        rj.job = &job;
        rj.start = start;
        rj.nodes = allocate_nodes(free_nodes_, job.n_procs);
        for (NodeId n : rj.nodes) free_nodes_.erase(n);
        rj.bb_shares = allocate_bb(pools_, job.bb_total);
        for (std::size_t i = 0; i < pools_.size(); ++i) pools_[i] -= rj.bb_shares[i];
        rj.plan = phase_plan(job);
        if (!sim_.io_model) rj.plan.compute_durations = {job.runtime};

        auto& rec = records_[index_.at(job.id)];
        rec.job_id = job.id;
        rec.submit = static_cast<double>(job.submit);
        rec.start = static_cast<double>(start);
        rec.n_procs = job.n_procs;
        rec.bb_total = job.bb_total;
        rec.policy = policy_name_;

        if (trace_) {
            nlohmann::json bb = nlohmann::json::array();
            for (std::size_t i = 0; i < rj.bb_shares.size(); ++i) {
                if (rj.bb_shares[i] > 0) bb.push_back({platform_.storage_nodes[i].id, rj.bb_shares[i]});
            }
            trace_line({{"event", "start"}, {"job", job.id}, {"nodes", rj.nodes}, {"bb", bb}});
        }

        auto [it, inserted] = running_.emplace(job.id, std::move(rj));
        if (!inserted) throw InternalError("job " + std::to_string(job.id) + " launched twice");
        push(to_nanos(start + job.walltime), EventKind::walltime_expired, job.id, 0);

        RunningJob& r = it->second;
        if (!sim_.io_model || r.plan.stage_in_bytes <= 0) {
            begin_compute(r, 0);
        } else {
            r.stage = Stage::stage_in;
            start_transfer(r, Route::pfs_to_bb, r.plan.stage_in_bytes, r.stage_transfer);
        }
    }

    void start_transfer(RunningJob& rj, Route route, Bytes bytes, std::optional<TransferId>& slot) {
        const TransferId id = pfs_.start(now_, route, rj.job->id, bytes);
        owner_[id] = rj.job->id;
        slot = id;
    }

    void begin_compute(RunningJob& rj, int phase) {
        rj.stage = Stage::compute;
        rj.phase = phase;
        const Time duration = rj.plan.compute_durations.at(static_cast<std::size_t>(phase));
        push(now_ + to_nanos(duration), EventKind::phase_complete, rj.job->id, ++rj.token);
    }

    void begin_stage_out(RunningJob& rj) {
        rj.stage = Stage::stage_out;
        if (sim_.io_model && rj.plan.stage_out_bytes > 0) {
            start_transfer(rj, Route::bb_to_pfs, rj.plan.stage_out_bytes, rj.stage_transfer);
        } else {
            rj.stage_out_done = true;
        }
        maybe_finish(rj);
    }

    void enqueue_drain(RunningJob& rj, Bytes bytes) {
        rj.drain_queue.push_back(bytes);
        if (!rj.drain_transfer) start_next_drain(rj);
    }

    void start_next_drain(RunningJob& rj) {
        if (rj.drain_queue.empty()) return;
        const Bytes bytes = rj.drain_queue.front();
        rj.drain_queue.erase(rj.drain_queue.begin());
        start_transfer(rj, Route::bb_to_pfs, bytes, rj.drain_transfer);
    }

    void maybe_finish(RunningJob& rj) {
        if (rj.stage != Stage::stage_out || !rj.stage_out_done || rj.drain_transfer || !rj.drain_queue.empty()) return;
        rj.stage = Stage::finished;
        push(now_, EventKind::job_finished, rj.job->id, ++rj.token);
    }

    RunningJob* find_running(JobId id) {
        auto it = running_.find(id);
        return it == running_.end() ? nullptr : &it->second;
    }

    bool on_phase(const Event& ev) {
        RunningJob* rj = find_running(ev.job);
        if (!rj || ev.token != rj->token) return false;
        const int last = static_cast<int>(rj->plan.compute_durations.size()) - 1;
        if (rj->stage == Stage::compute) {
            if (rj->phase < last) {
                const Bytes bytes = rj->plan.checkpoint_bytes;
                if (bytes <= 0) {
                    begin_compute(*rj, rj->phase + 1);
                } else {
                    // Computation is suspended while the checkpoint is written.
                    rj->stage = Stage::checkpoint;
                    const Bytes widest = *std::max_element(rj->bb_shares.begin(), rj->bb_shares.end());
                    const Nanos duration = dedicated_transfer_time(widest, platform_.compute_link_bw);
                    push(now_ + duration, EventKind::phase_complete, rj->job->id, ++rj->token);
                }
            } else {
                begin_stage_out(*rj);
            }
        } else if (rj->stage == Stage::checkpoint) {
            ++rj->checkpoints_done;
            ++stats_.transfers;
            stats_.bytes_moved += rj->plan.checkpoint_bytes;
            enqueue_drain(*rj, rj->plan.checkpoint_bytes);
            begin_compute(*rj, rj->phase + 1);
        } else {
            throw InternalError("phase event for job " + std::to_string(ev.job) + " in stage " +
                                to_string(rj->stage));
        }
        return true;
    }

    bool on_transfers(const Event& ev) {
        if (ev.token != pfs_.generation()) return false;
        for (const Transfer& t : pfs_.collect(now_)) {
            if (t.remaining != 0) throw InternalError("transfer collected before completion");
            ++stats_.transfers;
            stats_.bytes_moved += t.total;
            const JobId id = owner_.at(t.id);
            owner_.erase(t.id);
            RunningJob* rj = find_running(id);
            if (!rj) throw InternalError("transfer " + std::to_string(t.id) + " outlived its job");
            if (rj->stage_transfer == t.id) {
                rj->stage_transfer.reset();
                if (rj->stage == Stage::stage_in) {
                    begin_compute(*rj, 0);
                } else if (rj->stage == Stage::stage_out) {
                    rj->stage_out_done = true;
                    maybe_finish(*rj);
                } else {
                    throw InternalError("stage transfer finished in stage " + std::string(to_string(rj->stage)));
                }
            } else if (rj->drain_transfer == t.id) {
                rj->drain_transfer.reset();
                ++rj->drains_done;
                start_next_drain(*rj);
                maybe_finish(*rj);
            } else {
                throw InternalError("unowned transfer " + std::to_string(t.id));
            }
        }
        return true;
    }

    bool on_finished(const Event& ev) {
        RunningJob* rj = find_running(ev.job);
        if (!rj || ev.token != rj->token || rj->stage != Stage::finished) return false;
        end_job(*rj, false);
        return true;
    }

    bool on_walltime(const Event& ev) {
        RunningJob* rj = find_running(ev.job);
        if (!rj) return false;
        for (auto* slot : {&rj->stage_transfer, &rj->drain_transfer}) {
            if (*slot) {
                pfs_.cancel(now_, **slot);
                owner_.erase(**slot);
                slot->reset();
            }
        }
        ++stats_.killed;
        end_job(*rj, true);
        return true;
    }

    void end_job(RunningJob& rj, bool killed) {
        const JobSpec& job = *rj.job;
        for (NodeId n : rj.nodes) free_nodes_.insert(n);
        for (std::size_t i = 0; i < pools_.size(); ++i) pools_[i] += rj.bb_shares[i];
        auto& rec = records_[index_.at(job.id)];
        rec.finish = seconds(now_);
        rec.killed = killed;
        trace_line({{"event", killed ? "killed" : "finish"}, {"job", job.id}});
        running_.erase(job.id);
        mark_changed();
    }

    void sync_link() {
        if (pfs_.generation() == scheduled_generation_) return;
        scheduled_generation_ = pfs_.generation();
        if (auto t = pfs_.next_completion()) push(*t, EventKind::transfer_complete, 0, scheduled_generation_);
    }

    void check_invariants() const {
        int procs = 0;
        Bytes bb = 0;
        std::vector<Bytes> held(pools_.size(), 0);
        for (const auto& [id, rj] : running_) {
            procs += rj.job->n_procs;
            bb += rj.job->bb_total;
            for (std::size_t i = 0; i < held.size(); ++i) held[i] += rj.bb_shares[i];
        }
        if (procs > platform_.n_compute() ||
            procs + static_cast<int>(free_nodes_.size()) != platform_.n_compute()) {
            throw InternalError("processor accounting broken at t=" + std::to_string(seconds(now_)));
        }
        if (bb > platform_.bb_capacity_total) throw InternalError("burst buffer over capacity");
        for (std::size_t i = 0; i < held.size(); ++i) {
            if (held[i] > platform_.bb_capacity_per_node[i] || pools_[i] < 0 ||
                held[i] + pools_[i] != platform_.bb_capacity_per_node[i]) {
                throw InternalError("storage node " + std::to_string(i) + " over capacity");
            }
        }
    }

    void trace_line(nlohmann::json line) {
        if (!trace_) return;
        line["t"] = seconds(now_);
        *trace_ << line.dump() << '\n';
    }

    const Platform& platform_;
    const std::vector<JobSpec>& jobs_;
    SimConfig sim_;
    Scheduler scheduler_;
    std::string policy_name_;
    SimObserver* observer_;
    std::ostream* trace_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    std::uint64_t next_seq_ = 0;
    Nanos now_ = 0;
    std::optional<Nanos> next_tick_;
    std::uint64_t tick_token_ = 0;
    bool dirty_ = false;

    SharedLink pfs_;
    std::uint64_t scheduled_generation_ = 0;
    std::unordered_map<TransferId, JobId> owner_;

    std::set<NodeId> free_nodes_;
    std::vector<Bytes> pools_;
    std::vector<const JobSpec*> queue_;
    std::map<JobId, RunningJob> running_;
    std::unordered_map<JobId, std::size_t> index_;
    std::vector<JobRecord> records_;
    SimStats stats_;
};

}  // namespace

SimResult run(const Platform& platform, const std::vector<JobSpec>& jobs, const PolicyConfig& policy,
              const SimConfig& sim, SimObserver* observer, std::ostream* trace) {
    sim.validate();
    if (!std::is_sorted(jobs.begin(), jobs.end(),
                        [](const JobSpec& a, const JobSpec& b) { return a.submit < b.submit; })) {
        throw ConfigError("workload must be sorted by submit time");
    }
    for (const auto& job : jobs) validate_job(job);
    const auto bad = find_infeasible(platform, jobs);
    if (!bad.empty()) {
        std::string msg = "jobs that can never run on this platform:";
        for (JobId id : bad) msg += " " + std::to_string(id);
        throw InfeasibleError(msg);
    }
    Engine engine(platform, jobs, policy, sim, observer, trace);
    return engine.run();
}

std::vector<SimResult> run_batch_serial(const std::vector<RunSpec>& specs) {
    std::vector<SimResult> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back(run(*s.platform, *s.jobs, s.policy, s.sim));
    return out;
}

std::vector<SimResult> run_batch(const std::vector<RunSpec>& specs) {
    std::vector<SimResult> out(specs.size());
    std::vector<std::exception_ptr> errors(specs.size());
    const auto n = static_cast<std::ptrdiff_t>(specs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& s = specs[static_cast<std::size_t>(i)];
        try {
            out[static_cast<std::size_t>(i)] = run(*s.platform, *s.jobs, s.policy, s.sim);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace bbsim
