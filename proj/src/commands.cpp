#include "bbsim/commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "bbsim/error.hpp"

namespace bbsim {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const char* section, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string("config section '") + section + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
            throw ConfigError(std::string("unknown key '") + key + "' in config section '" + section + "'");
        }
    }
}

template <class T>
void read_key(const json& obj, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->template get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for config key '") + key + "'");
    }
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    return out;
}

void write_json_file(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::string io_model_name(bool on) { return on ? "on" : "off"; }

bool parse_io_model(const std::string& s) {
    if (s == "on") return true;
    if (s == "off") return false;
    throw ConfigError("io_model must be 'on' or 'off', got '" + s + "'");
}

}  // namespace

json to_json(const RunConfig& cfg) {
    const auto& p = cfg.platform;
    json platform = {
        {"compute_nodes", p.n_compute_nodes},
        {"storage_nodes", p.n_storage_nodes},
        {"groups", p.groups},
        {"chassis", p.chassis},
        {"routers", p.routers},
        {"nodes_per_router", p.nodes_per_router},
        {"compute_link_bw", p.compute_link_bw},
        {"pfs_link_bw", p.pfs_link_bw},
        {"bb_capacity_total", p.bb_capacity_total ? json(*p.bb_capacity_total) : json(nullptr)},
        {"bb_mu", p.bb_request_model.mu},
        {"bb_sigma", p.bb_request_model.sigma},
    };
    json sim = {
        {"tick_period_s", cfg.sim.tick_period_s},
        {"io_model", io_model_name(cfg.sim.io_model)},
        {"event_triggered", cfg.sim.event_triggered},
        {"seed", cfg.sim.seed},
    };
    json policy = {
        {"names", cfg.policies},
        {"alpha", cfg.anneal.alpha},
        {"cooling_rate", cfg.anneal.cooling_rate},
        {"cooling_steps", cfg.anneal.cooling_steps},
        {"steps_per_temperature", cfg.anneal.steps_per_temperature},
        {"exhaustive_threshold", cfg.anneal.exhaustive_threshold},
    };
    return {{"platform", platform}, {"sim", sim}, {"policy", policy}, {"split", cfg.split}};
}

RunConfig run_config_from_json(const json& j, RunConfig cfg) {
    check_keys(j, "root", {"platform", "sim", "policy", "split", "convert"});
    if (auto it = j.find("platform"); it != j.end()) {
        const json& p = *it;
        check_keys(p, "platform",
                   {"compute_nodes", "storage_nodes", "groups", "chassis", "routers", "nodes_per_router",
                    "compute_link_bw", "pfs_link_bw", "bb_capacity_total", "bb_mu", "bb_sigma"});
        auto& pc = cfg.platform;
        read_key(p, "compute_nodes", pc.n_compute_nodes);
        read_key(p, "storage_nodes", pc.n_storage_nodes);
        read_key(p, "groups", pc.groups);
        read_key(p, "chassis", pc.chassis);
        read_key(p, "routers", pc.routers);
        read_key(p, "nodes_per_router", pc.nodes_per_router);
        read_key(p, "compute_link_bw", pc.compute_link_bw);
        read_key(p, "pfs_link_bw", pc.pfs_link_bw);
        read_key(p, "bb_mu", pc.bb_request_model.mu);
        read_key(p, "bb_sigma", pc.bb_request_model.sigma);
        if (auto cap = p.find("bb_capacity_total"); cap != p.end()) {
            if (cap->is_null()) {
                pc.bb_capacity_total.reset();
            } else {
                Bytes v = 0;
                read_key(p, "bb_capacity_total", v);
                pc.bb_capacity_total = v;
            }
        }
    }
    if (auto it = j.find("sim"); it != j.end()) {
        check_keys(*it, "sim", {"tick_period_s", "io_model", "event_triggered", "seed"});
        read_key(*it, "tick_period_s", cfg.sim.tick_period_s);
        read_key(*it, "event_triggered", cfg.sim.event_triggered);
        read_key(*it, "seed", cfg.sim.seed);
        if (auto io = it->find("io_model"); io != it->end()) {
            std::string s;
            read_key(*it, "io_model", s);
            cfg.sim.io_model = parse_io_model(s);
        }
    }
    if (auto it = j.find("policy"); it != j.end()) {
        check_keys(*it, "policy",
                   {"names", "alpha", "cooling_rate", "cooling_steps", "steps_per_temperature",
                    "exhaustive_threshold"});
        read_key(*it, "names", cfg.policies);
        read_key(*it, "alpha", cfg.anneal.alpha);
        read_key(*it, "cooling_rate", cfg.anneal.cooling_rate);
        read_key(*it, "cooling_steps", cfg.anneal.cooling_steps);
        read_key(*it, "steps_per_temperature", cfg.anneal.steps_per_temperature);
        read_key(*it, "exhaustive_threshold", cfg.anneal.exhaustive_threshold);
    }
    read_key(j, "split", cfg.split);
    return cfg;
}

ConvertOptions convert_options_from_json(const json& j, ConvertOptions opts) {
    const RunConfig run = run_config_from_json(j);
    opts.bb_model = run.platform.bb_request_model;
    if (j.contains("sim") && j["sim"].contains("seed")) opts.seed = run.sim.seed;
    if (auto it = j.find("convert"); it != j.end()) {
        check_keys(*it, "convert",
                   {"jobs", "mean_interarrival", "max_procs", "min_runtime", "max_runtime", "max_overestimate"});
        auto& s = opts.synth;
        read_key(*it, "jobs", s.n_jobs);
        read_key(*it, "mean_interarrival", s.mean_interarrival);
        read_key(*it, "max_procs", s.max_procs);
        read_key(*it, "min_runtime", s.min_runtime);
        read_key(*it, "max_runtime", s.max_runtime);
        read_key(*it, "max_overestimate", s.max_overestimate);
    }
    return opts;
}

json read_json_file(const std::string& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string sha256_file(const std::string& path) {
    auto in = open_in(path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw InternalError("sha256 init failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount())) != 1) {
            throw InternalError("sha256 update failed");
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) throw InternalError("sha256 final failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

std::uint64_t env_seed(std::uint64_t fallback) {
    const char* value = std::getenv("BBSIM_SEED");
    if (!value || !*value) return fallback;
    std::uint64_t seed = 0;
    const char* end = value + std::char_traits<char>::length(value);
    auto [ptr, ec] = std::from_chars(value, end, seed);
    if (ec != std::errc() || ptr != end) throw ConfigError(std::string("BBSIM_SEED is not an integer: '") + value + "'");
    return seed;
}

Platform platform_for(const RunConfig& cfg) { return build_platform(cfg.platform); }

// --- convert ---------------------------------------------------------------

json to_json(const ConvertOptions& opts) {
    const auto& s = opts.synth;
    return {
        {"swf", opts.swf_path},
        {"synthetic", opts.synthetic},
        {"seed", opts.seed},
        {"bb_mu", opts.bb_model.mu},
        {"bb_sigma", opts.bb_model.sigma},
        {"synth",
         {{"jobs", s.n_jobs},
          {"mean_interarrival", s.mean_interarrival},
          {"max_procs", s.max_procs},
          {"min_runtime", s.min_runtime},
          {"max_runtime", s.max_runtime},
          {"max_overestimate", s.max_overestimate},
          {"bb_cap", s.bb_cap}}},
    };
}

ConvertOptions convert_options_from_manifest(const json& m) {
    if (m.value("command", "") != "convert") throw ConfigError("not a convert manifest");
    try {
        const json& c = m.at("config");
        ConvertOptions o;
        o.swf_path = c.at("swf").get<std::string>();
        o.synthetic = c.at("synthetic").get<bool>();
        o.seed = c.at("seed").get<std::uint64_t>();
        o.bb_model.mu = c.at("bb_mu").get<double>();
        o.bb_model.sigma = c.at("bb_sigma").get<double>();
        const json& s = c.at("synth");
        o.synth.n_jobs = s.at("jobs").get<std::size_t>();
        o.synth.mean_interarrival = s.at("mean_interarrival").get<double>();
        o.synth.max_procs = s.at("max_procs").get<int>();
        o.synth.min_runtime = s.at("min_runtime").get<Time>();
        o.synth.max_runtime = s.at("max_runtime").get<Time>();
        o.synth.max_overestimate = s.at("max_overestimate").get<double>();
        o.synth.bb_cap = s.at("bb_cap").get<Bytes>();
        o.synth.bb_model = o.bb_model;
        o.out_path = m.at("outputs").at("workload").get<std::string>();
        if (!o.synthetic) {
            const std::string expected = m.at("inputs").at("swf").at("sha256").get<std::string>();
            if (sha256_file(o.swf_path) != expected) {
                throw ConfigError("'" + o.swf_path + "' changed since the manifest was written");
            }
        }
        return o;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed convert manifest: ") + e.what());
    }
}

ConvertReport cmd_convert(const ConvertOptions& opts, std::ostream& log) {
    opts.bb_model.validate();
    ConvertReport report;
    std::vector<JobSpec> jobs;
    if (opts.synthetic) {
        SyntheticWorkloadConfig synth = opts.synth;
        synth.bb_model = opts.bb_model;
        jobs = synthetic_workload(synth, opts.seed);
        report.records = jobs.size();
    } else {
        auto in = open_in(opts.swf_path);
        SwfParseResult parsed = parse_swf(in);
        report.dropped = parsed.dropped;
        report.clamped = parsed.clamped;
        report.records = parsed.records;
        jobs = std::move(parsed.jobs);
        std::stable_sort(jobs.begin(), jobs.end(),
                         [](const JobSpec& a, const JobSpec& b) { return a.submit < b.submit; });
        synthesize_bb(jobs, opts.bb_model, opts.seed);
        attach_phases(jobs, opts.seed);
        if (jobs.empty()) log << "warning: '" << opts.swf_path << "' holds no usable jobs\n";
    }
    report.jobs = jobs.size();
    {
        auto out = open_out(opts.out_path);
        write_workload(out, jobs);
    }
    log << "converted " << report.records << " records into " << report.jobs << " jobs (" << report.dropped
        << " dropped, " << report.clamped << " walltimes raised to runtime)\n";

    if (!opts.manifest_path.empty()) {
        json inputs = json::object();
        if (!opts.synthetic) inputs["swf"] = {{"path", opts.swf_path}, {"sha256", sha256_file(opts.swf_path)}};
        json manifest = {
            {"tool", "bbsim"},
            {"version", kVersion},
            {"command", "convert"},
            {"config", to_json(opts)},
            {"seeds", {{"convert", opts.seed}}},
            {"inputs", inputs},
            {"outputs", {{"workload", opts.out_path}}},
            {"results",
             {{"jobs", report.jobs}, {"dropped", report.dropped}, {"clamped", report.clamped},
              {"workload_sha256", sha256_file(opts.out_path)}}},
        };
        write_json_file(opts.manifest_path, manifest);
    }
    return report;
}

// --- simulate --------------------------------------------------------------

SimulateOptions simulate_options_from_manifest(const json& m) {
    if (m.value("command", "") != "simulate") throw ConfigError("not a simulate manifest");
    try {
        SimulateOptions o;
        o.config = run_config_from_json(m.at("config"));
        o.workload_path = m.at("inputs").at("workload").at("path").get<std::string>();
        const std::string expected = m.at("inputs").at("workload").at("sha256").get<std::string>();
        if (sha256_file(o.workload_path) != expected) {
            throw ConfigError("'" + o.workload_path + "' changed since the manifest was written");
        }
        o.out_path = m.at("outputs").at("records").get<std::string>();
        const json& trace = m.at("outputs").at("trace");
        if (!trace.is_null()) o.trace_path = trace.get<std::string>();
        return o;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed simulate manifest: ") + e.what());
    }
}

namespace {

void shift(JobRecord& r, Time offset) {
    const auto d = static_cast<double>(offset);
    r.submit += d;
    r.start += d;
    r.finish += d;
}

}  // namespace

SimulateReport cmd_simulate(const SimulateOptions& opts, std::ostream& log) {
    const RunConfig& cfg = opts.config;
    cfg.sim.validate();
    if (cfg.policies.empty()) throw ConfigError("no policy given");
    if (opts.out_path.empty()) throw ConfigError("no output path given");

    std::vector<PolicyConfig> policies;
    for (const auto& name : cfg.policies) {
        PolicyConfig p = policy_from_name(name, cfg.anneal.alpha);
        if (p.plan) {
            const double alpha = p.anneal.alpha;
            p.anneal = cfg.anneal;
            p.anneal.alpha = alpha;
            p.anneal.validate();
        }
        policies.push_back(std::move(p));
    }
    const bool tracing = !opts.trace_path.empty();
    if (tracing && (policies.size() != 1 || cfg.split)) {
        throw ConfigError("--trace needs a single policy and no --split");
    }

    const Platform platform = platform_for(cfg);
    std::vector<JobSpec> jobs;
    {
        auto in = open_in(opts.workload_path);
        jobs = read_workload(in);
    }
    const auto bad = find_infeasible(platform, jobs);
    if (!bad.empty()) {
        log << "rejected " << bad.size() << " infeasible job(s) (more processors than " << platform.n_compute()
            << " or more burst buffer than " << platform.bb_capacity_total << " bytes):";
        for (JobId id : bad) log << ' ' << id;
        log << '\n';
        throw InfeasibleError(std::to_string(bad.size()) + " job(s) can never run on this platform");
    }

    std::vector<WorkloadPart> parts;
    if (cfg.split) {
        parts = split_parts(jobs);
    } else {
        parts.push_back(WorkloadPart{0, jobs});
    }

    std::vector<RunSpec> specs;
    for (const auto& policy : policies) {
        for (const auto& part : parts) specs.push_back(RunSpec{&platform, &part.jobs, policy, cfg.sim});
    }

    std::vector<SimResult> results;
    if (tracing) {
        auto trace = open_out(opts.trace_path);
        results.push_back(run(platform, jobs, policies.front(), cfg.sim, nullptr, &trace));
    } else {
        results = run_batch(specs);
    }

    SimulateReport report;
    json per_policy = json::object();
    for (std::size_t p = 0; p < policies.size(); ++p) {
        json paths = json::object();
        std::size_t evaluations = 0;
        std::size_t killed = 0;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            SimResult& r = results[p * parts.size() + k];
            for (auto& rec : r.records) {
                if (cfg.split) shift(rec, static_cast<Time>(parts[k].index) * kPartLength);
                report.records.push_back(rec);
            }
            for (const auto& [path, count] : r.stats.plan_paths) {
                paths[path] = paths.value(path, std::size_t{0}) + count;
            }
            evaluations += r.stats.plan_evaluations;
            killed += r.stats.killed;
        }
        per_policy[policies[p].display_name()] = {
            {"plan_paths", paths}, {"plan_evaluations", evaluations}, {"killed", killed}};
    }

    {
        auto out = open_out(opts.out_path);
        write_records(out, report.records);
    }
    log << "simulated " << jobs.size() << " jobs under " << policies.size() << " polic"
        << (policies.size() == 1 ? "y" : "ies") << " -> " << opts.out_path << '\n';

    const std::string manifest_path = opts.manifest_path.empty() ? opts.out_path + ".manifest.json" : opts.manifest_path;
    report.manifest = {
        {"tool", "bbsim"},
        {"version", kVersion},
        {"command", "simulate"},
        {"config", to_json(cfg)},
        {"seeds", {{"sim", cfg.sim.seed}}},
        {"policy", cfg.policies},
        {"inputs", {{"workload", {{"path", opts.workload_path}, {"sha256", sha256_file(opts.workload_path)}}}}},
        {"outputs", {{"records", opts.out_path}, {"trace", tracing ? json(opts.trace_path) : json(nullptr)}}},
        {"results", per_policy},
    };
    write_json_file(manifest_path, report.manifest);
    return report;
}

// --- analyze ---------------------------------------------------------------

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

}  // namespace

AnalyzeReport cmd_analyze(const AnalyzeOptions& opts, std::ostream& log) {
    if (opts.inputs.empty()) throw ConfigError("no records files given");
    if (opts.out_prefix.empty()) throw ConfigError("no output prefix given");

    std::map<std::string, std::vector<JobRecord>> by_policy;
    for (const auto& path : opts.inputs) {
        auto in = open_in(path);
        for (auto& r : read_records(in)) by_policy[r.policy].push_back(std::move(r));
    }
    if (by_policy.empty()) throw ConfigError("records files hold no jobs");

    AnalyzeReport report;
    const auto& levels = letter_value_levels();

    {
        const std::string path = opts.out_prefix + ".summary.csv";
        auto out = open_out(path);
        out << "policy,metric,count,killed,mean,ci95,max";
        for (double p : levels) out << ",q" << fmt(p);
        out << '\n';
        for (const auto& [policy, recs] : by_policy) {
            const Summary s = summarize(recs, opts.metric, 0);
            out << policy << ',' << to_string(opts.metric) << ',' << s.count << ',' << s.killed << ',' << fmt(s.mean)
                << ',' << fmt(s.ci95) << ',' << fmt(s.max);
            for (double q : s.quantiles) out << ',' << fmt(q);
            out << '\n';
            ++report.summary_rows;
        }
        report.written.push_back(path);
    }

    if (opts.tail > 0) {
        const std::string path = opts.out_prefix + ".tail.csv";
        auto out = open_out(path);
        out << "policy,rank,job_id," << to_string(opts.metric) << '\n';
        for (const auto& [policy, recs] : by_policy) {
            std::vector<std::pair<double, JobId>> values;
            for (const auto& r : recs) values.emplace_back(metric_value(r, opts.metric), r.job_id);
            std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
            const std::size_t k = std::min(opts.tail, values.size());
            for (std::size_t i = 0; i < k; ++i) {
                out << policy << ',' << i + 1 << ',' << values[i].second << ',' << fmt(values[i].first) << '\n';
            }
        }
        report.written.push_back(path);
    }

    if (opts.split) {
        if (!by_policy.count(opts.reference)) {
            throw ConfigError("reference policy '" + opts.reference +
                              "' is not in the records; normalization needs it (see --reference)");
        }
        PartMeans means;
        for (const auto& [policy, recs] : by_policy) {
            std::map<int, std::pair<double, std::size_t>> acc;
            for (const auto& r : recs) {
                const int part = part_of(r);
                if (part < 0) continue;
                auto& [sum, n] = acc[part];
                sum += metric_value(r, opts.metric);
                ++n;
            }
            for (const auto& [part, sn] : acc) means[policy][part] = sn.first / static_cast<double>(sn.second);
        }
        PartMeans normalized;
        try {
            normalized = normalize_by_reference(means, opts.reference);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }

        const std::string parts_path = opts.out_prefix + ".parts.csv";
        const std::string norm_path = opts.out_prefix + ".normalized.csv";
        auto parts_out = open_out(parts_path);
        auto norm_out = open_out(norm_path);
        parts_out << "policy,part,metric,mean\n";
        norm_out << "policy,part,metric,normalized\n";
        for (const auto& [policy, parts] : means) {
            for (const auto& [part, mean] : parts) {
                parts_out << policy << ',' << part << ',' << to_string(opts.metric) << ',' << fmt(mean) << '\n';
                norm_out << policy << ',' << part << ',' << to_string(opts.metric) << ','
                         << fmt(normalized.at(policy).at(part)) << '\n';
                ++report.normalized_rows;
            }
        }
        report.written.push_back(parts_path);
        report.written.push_back(norm_path);
    }

    for (const auto& path : report.written) log << "wrote " << path << '\n';
    return report;
}

// --- gantt -----------------------------------------------------------------

std::vector<GanttRow> gantt_rows(std::istream& in, std::optional<std::size_t> first) {
    struct Open {
        double start = 0.0;
        std::vector<NodeId> nodes;
        std::string bb;
    };
    std::map<JobId, Open> open;
    struct Done {
        JobId job;
        Open occ;
        double finish;
    };
    std::vector<Done> done;

    std::string line;
    std::size_t line_no = 0;
    bool is_trace = false;
    bool decided = false;
    std::size_t data_rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!decided) {
            is_trace = line.front() == '{';
            decided = true;
        }
        if (!is_trace) {
            if (line.front() != '#' && line.rfind("job_id,", 0) != 0) ++data_rows;
            continue;
        }
        json ev;
        try {
            ev = json::parse(line);
        } catch (const json::parse_error&) {
            throw ParseError("trace line is not JSON", line_no);
        }
        const std::string kind = ev.value("event", "");
        if (kind == "start") {
            if (!ev.contains("nodes")) throw ParseError("start event without node bindings", line_no);
            Open o;
            o.start = ev.at("t").get<double>();
            o.nodes = ev.at("nodes").get<std::vector<NodeId>>();
            std::ostringstream bb;
            bool sep = false;
            for (const auto& share : ev.value("bb", json::array())) {
                if (sep) bb << ';';
                bb << share.at(0).get<NodeId>() << ':' << share.at(1).get<Bytes>();
                sep = true;
            }
            o.bb = bb.str();
            open[ev.at("job").get<JobId>()] = std::move(o);
        } else if (kind == "finish" || kind == "killed") {
            const JobId id = ev.at("job").get<JobId>();
            auto it = open.find(id);
            if (it == open.end()) throw ParseError("job " + std::to_string(id) + " ends before it starts", line_no);
            done.push_back(Done{id, std::move(it->second), ev.at("t").get<double>()});
            open.erase(it);
        }
    }
    if (!is_trace && data_rows > 0) {
        throw ParseError("records carry no node bindings; rerun simulate with --trace and pass the trace", 0);
    }

    std::sort(done.begin(), done.end(), [](const Done& a, const Done& b) {
        return a.occ.start != b.occ.start ? a.occ.start < b.occ.start : a.job < b.job;
    });
    if (first && done.size() > *first) done.resize(*first);

    std::vector<GanttRow> rows;
    for (const auto& d : done) {
        for (NodeId n : d.occ.nodes) rows.push_back(GanttRow{d.job, n, d.occ.start, d.finish, d.occ.bb});
    }
    return rows;
}

void write_gantt(std::ostream& out, const std::vector<GanttRow>& rows) {
    out << "job_id,node,start,finish,bb_shares\n";
    for (const auto& r : rows) {
        out << r.job_id << ',' << r.node << ',' << fmt(r.start) << ',' << fmt(r.finish) << ',' << r.bb_shares << '\n';
    }
}

std::size_t cmd_gantt(const GanttOptions& opts, std::ostream& log) {
    auto in = open_in(opts.input);
    const auto rows = gantt_rows(in, opts.first);
    auto out = open_out(opts.out_path);
    write_gantt(out, rows);
    log << "wrote " << rows.size() << " occupancy rows to " << opts.out_path << '\n';
    return rows.size();
}

}  // namespace bbsim
