#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bbsim/commands.hpp"
#include "bbsim/error.hpp"

using namespace bbsim;

namespace {

bool given(const CLI::Option* opt) { return opt->count() > 0; }

int run_convert(const std::string& config_path, const std::string& from_manifest, ConvertOptions flags,
                const CLI::App& cmd) {
    ConvertOptions opts;
    opts.seed = env_seed(0);
    if (!from_manifest.empty()) {
        opts = convert_options_from_manifest(read_json_file(from_manifest));
    } else if (!config_path.empty()) {
        opts = convert_options_from_json(read_json_file(config_path), opts);
    }
    if (given(cmd.get_option("--swf"))) opts.swf_path = flags.swf_path;
    if (given(cmd.get_option("--synthetic"))) opts.synthetic = flags.synthetic;
    if (given(cmd.get_option("--out"))) opts.out_path = flags.out_path;
    if (given(cmd.get_option("--manifest"))) opts.manifest_path = flags.manifest_path;
    if (given(cmd.get_option("--seed"))) opts.seed = flags.seed;
    if (given(cmd.get_option("--bb-mu"))) opts.bb_model.mu = flags.bb_model.mu;
    if (given(cmd.get_option("--bb-sigma"))) opts.bb_model.sigma = flags.bb_model.sigma;
    if (given(cmd.get_option("--jobs"))) opts.synth.n_jobs = flags.synth.n_jobs;
    if (given(cmd.get_option("--max-procs"))) opts.synth.max_procs = flags.synth.max_procs;
    if (given(cmd.get_option("--mean-interarrival"))) opts.synth.mean_interarrival = flags.synth.mean_interarrival;
    if (given(cmd.get_option("--bb-cap"))) opts.synth.bb_cap = flags.synth.bb_cap;

    if (opts.out_path.empty()) throw ConfigError("convert needs --out");
    if (opts.synthetic == !opts.swf_path.empty()) throw ConfigError("convert needs exactly one of --swf or --synthetic");
    (void)cmd_convert(opts, std::cerr);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Burst-buffer aware batch scheduling simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("bbsim ") + kVersion);

    // convert
    auto* convert = app.add_subcommand("convert", "SWF trace or synthetic generator to a workload file");
    std::string convert_config, convert_manifest_in;
    ConvertOptions cflags;
    convert->add_option("--swf", cflags.swf_path, "Standard Workload Format trace")->check(CLI::ExistingFile);
    convert->add_flag("--synthetic", cflags.synthetic, "Generate a synthetic workload instead");
    convert->add_option("-o,--out", cflags.out_path, "Workload file to write");
    convert->add_option("--manifest", cflags.manifest_path, "Also write a manifest for this run");
    convert->add_option("--seed", cflags.seed, "Seed (default: BBSIM_SEED or 0)");
    convert->add_option("--bb-mu", cflags.bb_model.mu, "Log-normal mu of the per-processor request (log bytes)");
    convert->add_option("--bb-sigma", cflags.bb_model.sigma, "Log-normal sigma of the per-processor request");
    convert->add_option("--jobs", cflags.synth.n_jobs, "Synthetic job count");
    convert->add_option("--max-procs", cflags.synth.max_procs, "Synthetic maximum processors per job");
    convert->add_option("--mean-interarrival", cflags.synth.mean_interarrival, "Synthetic mean interarrival (s)");
    convert->add_option("--bb-cap", cflags.synth.bb_cap, "Redraw synthetic BB requests above this many bytes");
    convert->add_option("--config", convert_config, "JSON config file")->check(CLI::ExistingFile);
    convert->add_option("--from-manifest", convert_manifest_in, "Re-run a convert manifest")->check(CLI::ExistingFile);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run policies over a workload");
    std::string sim_config, sim_manifest_in, io_model;
    SimulateOptions sflags;
    std::vector<std::string> policies;
    double alpha = 1.0;
    Bytes bb_capacity = 0;
    simulate->add_option("-w,--workload", sflags.workload_path, "Workload file")->check(CLI::ExistingFile);
    simulate->add_option("-o,--out", sflags.out_path, "Records CSV to write");
    simulate->add_option("--manifest", sflags.manifest_path, "Manifest path (default: <out>.manifest.json)");
    simulate->add_option("--trace", sflags.trace_path, "JSON-lines event trace with node bindings");
    simulate->add_option("--policy", policies, "fcfs, fcfs-easy, filler, fcfs-bb, sjf-bb, plan, plan-<alpha>")
        ->delimiter(',');
    simulate->add_option("--alpha", alpha, "Waiting-time exponent of plan");
    AnnealConfig sa;
    simulate->add_option("--sa-r", sa.cooling_rate, "Annealing cooling rate");
    simulate->add_option("--sa-n", sa.cooling_steps, "Annealing cooling steps");
    simulate->add_option("--sa-m", sa.steps_per_temperature, "Annealing steps per temperature");
    simulate->add_flag("--event-triggered", sflags.config.sim.event_triggered,
                       "Also schedule right after submissions and completions");
    simulate->add_option("--io-model", io_model, "on or off")->check(CLI::IsMember({"on", "off"}));
    simulate->add_option("--tick", sflags.config.sim.tick_period_s, "Scheduler period in seconds");
    simulate->add_option("--seed", sflags.config.sim.seed, "Seed (default: BBSIM_SEED or 0)");
    simulate->add_option("--bb-capacity", bb_capacity, "Total burst-buffer capacity in bytes");
    simulate->add_flag("--split", sflags.config.split, "Simulate each three-week part independently");
    simulate->add_option("--config", sim_config, "JSON config file")->check(CLI::ExistingFile);
    simulate->add_option("--from-manifest", sim_manifest_in, "Re-run a simulate manifest")->check(CLI::ExistingFile);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Summaries and per-part normalization of records");
    AnalyzeOptions aopts;
    std::string metric = "waiting_time";
    analyze->add_option("records", aopts.inputs, "Records CSV files")->required()->check(CLI::ExistingFile);
    analyze->add_option("-o,--out-prefix", aopts.out_prefix, "Prefix of the CSVs to write")->required();
    analyze->add_option("--metric", metric, "waiting_time or bounded_slowdown")
        ->check(CLI::IsMember({"waiting_time", "bounded_slowdown"}));
    analyze->add_flag("--split", aopts.split, "Per-part means normalized by the reference policy");
    analyze->add_option("--reference", aopts.reference, "Reference policy for normalization");
    analyze->add_option("--tail", aopts.tail, "Write the k largest values per policy");

    // gantt
    auto* gantt = app.add_subcommand("gantt", "Per-node occupancy rows from a simulate trace");
    GanttOptions gopts;
    std::size_t first = 0;
    gantt->add_option("input", gopts.input, "Trace from simulate --trace")->required()->check(CLI::ExistingFile);
    gantt->add_option("-o,--out", gopts.out_path, "Gantt CSV to write")->required();
    auto* first_opt = gantt->add_option("--first", first, "Keep the first N jobs by start time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*convert) return run_convert(convert_config, convert_manifest_in, cflags, *convert);

        if (*simulate) {
            SimulateOptions opts;
            opts.config.sim.seed = env_seed(0);
            if (!sim_manifest_in.empty()) {
                opts = simulate_options_from_manifest(read_json_file(sim_manifest_in));
            } else if (!sim_config.empty()) {
                opts.config = run_config_from_json(read_json_file(sim_config), opts.config);
            }
            auto& cfg = opts.config;
            if (given(simulate->get_option("--workload"))) opts.workload_path = sflags.workload_path;
            if (given(simulate->get_option("--out"))) opts.out_path = sflags.out_path;
            if (given(simulate->get_option("--manifest"))) opts.manifest_path = sflags.manifest_path;
            if (given(simulate->get_option("--trace"))) opts.trace_path = sflags.trace_path;
            if (given(simulate->get_option("--policy"))) cfg.policies = policies;
            if (given(simulate->get_option("--alpha"))) cfg.anneal.alpha = alpha;
            if (given(simulate->get_option("--sa-r"))) cfg.anneal.cooling_rate = sa.cooling_rate;
            if (given(simulate->get_option("--sa-n"))) cfg.anneal.cooling_steps = sa.cooling_steps;
            if (given(simulate->get_option("--sa-m"))) cfg.anneal.steps_per_temperature = sa.steps_per_temperature;
            if (given(simulate->get_option("--event-triggered"))) {
                cfg.sim.event_triggered = sflags.config.sim.event_triggered;
            }
            if (given(simulate->get_option("--io-model"))) cfg.sim.io_model = io_model == "on";
            if (given(simulate->get_option("--tick"))) cfg.sim.tick_period_s = sflags.config.sim.tick_period_s;
            if (given(simulate->get_option("--seed"))) cfg.sim.seed = sflags.config.sim.seed;
            if (given(simulate->get_option("--bb-capacity"))) cfg.platform.bb_capacity_total = bb_capacity;
            if (given(simulate->get_option("--split"))) cfg.split = sflags.config.split;
            if (opts.workload_path.empty()) throw ConfigError("simulate needs --workload");
            (void)cmd_simulate(opts, std::cerr);
            return 0;
        }

        if (*analyze) {
            aopts.metric = metric == "bounded_slowdown" ? Metric::bounded_slowdown : Metric::waiting_time;
            (void)cmd_analyze(aopts, std::cerr);
            return 0;
        }

        if (*gantt) {
            if (given(first_opt)) gopts.first = first;
            (void)cmd_gantt(gopts, std::cerr);
            return 0;
        }
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
