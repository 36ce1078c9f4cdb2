#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbsim/engine.hpp"
#include "bbsim/metrics.hpp"
#include "bbsim/platform.hpp"
#include "bbsim/policies.hpp"
#include "bbsim/workload.hpp"

namespace bbsim {

inline constexpr const char* kVersion = "1.0.0";

/// Everything a simulation depends on besides the workload file.
struct RunConfig {
    PlatformConfig platform;
    SimConfig sim;
    std::vector<std::string> policies{"fcfs-bb"};
    AnnealConfig anneal;
    /// Run each three-week part as an independent simulation.
    bool split = false;
};

// Config file keys (all optional):
//   platform: compute_nodes, storage_nodes, groups, chassis, routers,
//             nodes_per_router, compute_link_bw, pfs_link_bw,
//             bb_capacity_total (bytes or null), bb_mu, bb_sigma
//   sim:      tick_period_s, io_model ("on"|"off"), event_triggered, seed
//   policy:   names (list), alpha, cooling_rate, cooling_steps,
//             steps_per_temperature, exhaustive_threshold
//   split:    bool
//   convert:  jobs, mean_interarrival, max_procs, min_runtime, max_runtime,
//             max_overestimate
// Unknown keys are rejected.
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);
/// Starts from `base` and overwrites the keys present in `j`.
[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});

[[nodiscard]] nlohmann::json read_json_file(const std::string& path);
[[nodiscard]] std::string sha256_file(const std::string& path);

/// Seed from BBSIM_SEED, or `fallback` when unset. Throws ConfigError on
/// a malformed value.
[[nodiscard]] std::uint64_t env_seed(std::uint64_t fallback = 0);

[[nodiscard]] Platform platform_for(const RunConfig& cfg);

struct ConvertOptions {
    std::string swf_path;  // empty with `synthetic`
    bool synthetic = false;
    SyntheticWorkloadConfig synth;
    LogNormalModel bb_model;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string manifest_path;  // empty: no manifest
};

struct ConvertReport {
    std::size_t jobs = 0;
    std::size_t dropped = 0;
    std::size_t clamped = 0;
    std::size_t records = 0;
};

[[nodiscard]] nlohmann::json to_json(const ConvertOptions& opts);
/// Reads the "convert" section, bb_mu/bb_sigma and sim.seed of a config file.
[[nodiscard]] ConvertOptions convert_options_from_json(const nlohmann::json& j, ConvertOptions base = {});
[[nodiscard]] ConvertOptions convert_options_from_manifest(const nlohmann::json& manifest);

ConvertReport cmd_convert(const ConvertOptions& opts, std::ostream& log);

struct SimulateOptions {
    RunConfig config;
    std::string workload_path;
    std::string out_path;
    std::string manifest_path;  // empty: <out_path>.manifest.json
    std::string trace_path;     // empty: no trace
};

struct SimulateReport {
    std::vector<JobRecord> records;
    nlohmann::json manifest;
};

/// Loads config and paths from a simulate manifest; outputs may be
/// replaced afterwards. Throws ConfigError for other manifests.
[[nodiscard]] SimulateOptions simulate_options_from_manifest(const nlohmann::json& manifest);

SimulateReport cmd_simulate(const SimulateOptions& opts, std::ostream& log);

struct AnalyzeOptions {
    std::vector<std::string> inputs;
    Metric metric = Metric::waiting_time;
    bool split = false;
    std::string reference = "sjf-bb";
    std::size_t tail = 0;  // 0: no tail file
    std::string out_prefix;
};

struct AnalyzeReport {
    std::vector<std::string> written;
    std::size_t summary_rows = 0;
    std::size_t normalized_rows = 0;
};

AnalyzeReport cmd_analyze(const AnalyzeOptions& opts, std::ostream& log);

struct GanttOptions {
    std::string input;  // JSON-lines trace, or records CSV
    std::string out_path;
    std::optional<std::size_t> first;
};

struct GanttRow {
    JobId job_id = 0;
    NodeId node = 0;
    double start = 0.0;
    double finish = 0.0;
    std::string bb_shares;  // "storage_id:bytes;..."
};

/// Throws ParseError when the input lacks node bindings (a records CSV
/// with jobs in it); an empty records file yields no rows.
[[nodiscard]] std::vector<GanttRow> gantt_rows(std::istream& in, std::optional<std::size_t> first);
void write_gantt(std::ostream& out, const std::vector<GanttRow>& rows);

std::size_t cmd_gantt(const GanttOptions& opts, std::ostream& log);

}  // namespace bbsim
