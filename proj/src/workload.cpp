#include "bbsim/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bbsim/error.hpp"

namespace bbsim {

namespace {

constexpr std::uint64_t kBbSalt = 0x6262'7265'7175'6573ULL;     // "bbreques"
constexpr std::uint64_t kPhaseSalt = 0x7068'6173'6573'0000ULL;  // "phases"
constexpr int kMaxPhases = 10;
constexpr int kSwfFields = 18;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

bool parse_number(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

std::uint64_t job_stream_seed(std::uint64_t seed, JobId id, std::uint64_t salt) {
    return splitmix64(splitmix64(seed ^ salt) ^ static_cast<std::uint64_t>(id));
}

SwfParseResult parse_swf(std::istream& in) {
    SwfParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == ';') continue;
        ++result.records;

        double fields[kSwfFields];
        int count = 0;
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) {
            if (count == kSwfFields) {
                throw ParseError("SWF record has more than 18 fields", line_no);
            }
            if (!parse_number(token, fields[count])) {
                throw ParseError("SWF field " + std::to_string(count + 1) + " is not numeric: '" + token + "'",
                                 line_no);
            }
            ++count;
        }
        if (count != kSwfFields) {
            throw ParseError("SWF record has " + std::to_string(count) + " fields, expected 18", line_no);
        }

        // 1-based SWF field numbers.
        auto field = [&](int k) { return static_cast<std::int64_t>(std::llround(fields[k - 1])); };
        JobSpec job;
        job.id = field(1);
        job.submit = field(2);
        job.runtime = field(4);
        const std::int64_t requested = field(8);
        const std::int64_t procs = requested != -1 ? requested : field(5);
        const std::int64_t requested_time = field(9);
        if (job.runtime <= 0 || procs <= 0) {
            ++result.dropped;
            continue;
        }
        job.n_procs = static_cast<int>(procs);
        job.walltime = requested_time != -1 ? requested_time : job.runtime;
        if (job.walltime < job.runtime) {
            job.walltime = job.runtime;
            ++result.clamped;
        }
        result.jobs.push_back(std::move(job));
    }
    return result;
}

void synthesize_bb(std::vector<JobSpec>& jobs, const LogNormalModel& model, std::uint64_t seed) {
    model.validate();
    for (auto& job : jobs) {
        std::mt19937_64 rng(job_stream_seed(seed, job.id, kBbSalt));
        std::lognormal_distribution<double> dist(model.mu, model.sigma);
        job.bb_per_proc = static_cast<Bytes>(std::llround(dist(rng)));
        job.bb_total = job.bb_per_proc * job.n_procs;
    }
}

std::vector<Time> split_runtime(Time runtime, int n_phases) {
    if (runtime <= 0 || n_phases < 1 || n_phases > runtime) {
        throw std::invalid_argument("cannot split " + std::to_string(runtime) + " s into " +
                                    std::to_string(n_phases) + " phases");
    }
    std::vector<Time> durations(static_cast<std::size_t>(n_phases), runtime / n_phases);
    durations.back() += runtime % n_phases;
    return durations;
}

PhasePlan generate_phases(const JobSpec& job, std::uint64_t seed) {
    if (job.runtime <= 0) throw ConfigError("job " + std::to_string(job.id) + " has no runtime to split");
    std::mt19937_64 rng(job_stream_seed(seed, job.id, kPhaseSalt));
    std::uniform_int_distribution<int> count_dist(1, kMaxPhases);
    const auto n = static_cast<Time>(std::min<Time>(count_dist(rng), job.runtime));

    PhasePlan plan;
    plan.compute_durations = split_runtime(job.runtime, static_cast<int>(n));
    plan.checkpoint_bytes = job.bb_total;
    plan.stage_in_bytes = job.bb_total;
    plan.stage_out_bytes = job.bb_total;
    return plan;
}

PhasePlan phase_plan(const JobSpec& job) {
    PhasePlan plan;
    plan.compute_durations = job.phases.empty() ? std::vector<Time>{job.runtime} : job.phases;
    plan.checkpoint_bytes = job.bb_total;
    plan.stage_in_bytes = job.bb_total;
    plan.stage_out_bytes = job.bb_total;
    return plan;
}

void attach_phases(std::vector<JobSpec>& jobs, std::uint64_t seed) {
    for (auto& job : jobs) {
        job.phases = generate_phases(job, seed).compute_durations;
        job.n_phases = static_cast<int>(job.phases.size());
    }
}

std::vector<WorkloadPart> split_parts(const std::vector<JobSpec>& jobs) {
    std::vector<WorkloadPart> parts(kPartCount);
    for (int i = 0; i < kPartCount; ++i) parts[static_cast<std::size_t>(i)].index = i;
    for (const auto& job : jobs) {
        if (job.submit < 0) continue;
        const Time index = job.submit / kPartLength;
        if (index >= kPartCount) continue;
        JobSpec rebased = job;
        rebased.submit -= index * kPartLength;
        parts[static_cast<std::size_t>(index)].jobs.push_back(std::move(rebased));
    }
    return parts;
}

void validate_job(const JobSpec& job) {
    const std::string who = "job " + std::to_string(job.id) + ": ";
    if (job.runtime <= 0) throw ConfigError(who + "runtime must be positive");
    if (job.walltime < job.runtime) throw ConfigError(who + "walltime is shorter than runtime");
    if (job.n_procs < 1) throw ConfigError(who + "needs at least one processor");
    if (job.bb_per_proc < 0 || job.bb_total < 0) throw ConfigError(who + "negative burst-buffer request");
    // Totals not divisible by n_procs (hand-made workloads) keep bb_per_proc as the floor.
    if (job.bb_per_proc != job.bb_total / job.n_procs) throw ConfigError(who + "bb_per_proc != bb_total / n_procs");
    if (job.n_phases < 1 || job.n_phases > kMaxPhases) throw ConfigError(who + "n_phases outside [1, 10]");
    if (!job.phases.empty()) {
        if (static_cast<int>(job.phases.size()) != job.n_phases) throw ConfigError(who + "phase count mismatch");
        Time sum = 0;
        for (Time d : job.phases) {
            if (d <= 0) throw ConfigError(who + "phase durations must be positive");
            sum += d;
        }
        if (sum != job.runtime) throw ConfigError(who + "phase durations do not sum to runtime");
    }
}

void write_workload(std::ostream& out, const std::vector<JobSpec>& jobs) {
    out << nlohmann::json{{"format", "bbsim-workload"}, {"version", 1}}.dump() << '\n';
    for (const auto& job : jobs) {
        nlohmann::json j{{"id", job.id},
                         {"submit", job.submit},
                         {"runtime", job.runtime},
                         {"walltime", job.walltime},
                         {"n_procs", job.n_procs},
                         {"bb_per_proc", job.bb_per_proc},
                         {"bb_total", job.bb_total},
                         {"n_phases", job.n_phases},
                         {"phases", job.phases}};
        out << j.dump() << '\n';
    }
}

std::vector<JobSpec> read_workload(std::istream& in) {
    std::vector<JobSpec> jobs;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!header_seen) {
            if (j.value("format", "") != "bbsim-workload") {
                throw ParseError("missing bbsim-workload header", line_no);
            }
            if (j.value("version", 0) != 1) throw ParseError("unsupported workload version", line_no);
            header_seen = true;
            continue;
        }
        try {
            JobSpec job;
            job.id = j.at("id").get<JobId>();
            job.submit = j.at("submit").get<Time>();
            job.runtime = j.at("runtime").get<Time>();
            job.walltime = j.at("walltime").get<Time>();
            job.n_procs = j.at("n_procs").get<int>();
            job.bb_per_proc = j.value("bb_per_proc", Bytes{0});
            job.bb_total = j.value("bb_total", job.bb_per_proc * job.n_procs);
            job.phases = j.value("phases", std::vector<Time>{});
            job.n_phases = j.value("n_phases", job.phases.empty() ? 1 : static_cast<int>(job.phases.size()));
            validate_job(job);
            jobs.push_back(std::move(job));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad job record: ") + e.what(), line_no);
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    if (!header_seen && line_no > 0) throw ParseError("missing bbsim-workload header", 1);
    return jobs;
}

std::vector<JobSpec> synthetic_workload(const SyntheticWorkloadConfig& cfg, std::uint64_t seed) {
    cfg.bb_model.validate();
    if (cfg.max_procs < 1 || cfg.min_runtime < 1 || cfg.max_runtime < cfg.min_runtime ||
        !(cfg.max_overestimate >= 1.0) || !(cfg.mean_interarrival > 0.0)) {
        throw ConfigError("invalid synthetic workload parameters");
    }
    std::mt19937_64 rng(splitmix64(seed));
    std::exponential_distribution<double> gap(1.0 / cfg.mean_interarrival);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double log_max_procs = std::log2(static_cast<double>(cfg.max_procs) + 1.0);
    const double log_min_rt = std::log(static_cast<double>(cfg.min_runtime));
    const double log_max_rt = std::log(static_cast<double>(cfg.max_runtime));

    std::vector<JobSpec> jobs;
    jobs.reserve(cfg.n_jobs);
    double clock = 0.0;
    for (std::size_t i = 0; i < cfg.n_jobs; ++i) {
        if (i > 0) clock += gap(rng);
        JobSpec job;
        job.id = static_cast<JobId>(i + 1);
        job.submit = static_cast<Time>(std::floor(clock));
        const double p = std::exp2(unit(rng) * log_max_procs) - 1.0;
        job.n_procs = std::clamp(static_cast<int>(std::ceil(p)), 1, cfg.max_procs);
        job.runtime = static_cast<Time>(std::llround(std::exp(log_min_rt + unit(rng) * (log_max_rt - log_min_rt))));
        job.runtime = std::clamp(job.runtime, cfg.min_runtime, cfg.max_runtime);
        const double over = 1.0 + unit(rng) * (cfg.max_overestimate - 1.0);
        job.walltime = std::max(job.runtime, static_cast<Time>(std::ceil(static_cast<double>(job.runtime) * over)));
        jobs.push_back(std::move(job));
    }

    for (auto& job : jobs) {
        std::mt19937_64 bb_rng(job_stream_seed(seed, job.id, kBbSalt));
        std::lognormal_distribution<double> dist(cfg.bb_model.mu, cfg.bb_model.sigma);
        for (;;) {
            job.bb_per_proc = static_cast<Bytes>(std::llround(dist(bb_rng)));
            job.bb_total = job.bb_per_proc * job.n_procs;
            if (cfg.bb_cap <= 0 || job.bb_total <= cfg.bb_cap) break;
        }
    }
    attach_phases(jobs, seed);
    return jobs;
}

}  // namespace bbsim
