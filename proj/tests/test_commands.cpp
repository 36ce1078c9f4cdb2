#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bbsim/commands.hpp"
#include "bbsim/error.hpp"

using namespace bbsim;
namespace fs = std::filesystem;

namespace {

const std::string kData = BBSIM_DATA_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("bbsim-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    [[nodiscard]] std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::size_t lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n' ? 1 : 0;
    return n;
}

SimulateOptions example_options(const TempDir& dir, const std::string& policy) {
    SimulateOptions o;
    o.config = run_config_from_json(read_json_file(kData + "/example_platform.json"));
    o.config.policies = {policy};
    o.workload_path = kData + "/example.jsonl";
    o.out_path = dir / (policy + ".csv");
    return o;
}

std::map<JobId, double> starts(const std::vector<JobRecord>& rs) {
    std::map<JobId, double> out;
    for (const auto& r : rs) out[r.job_id] = r.start;
    return out;
}

}  // namespace

TEST_CASE("config round trip and overrides") {
    RunConfig cfg;
    cfg.platform.bb_capacity_total = 123;
    cfg.sim.io_model = false;
    cfg.sim.seed = 42;
    cfg.policies = {"sjf-bb", "plan-2"};
    cfg.anneal.cooling_steps = 7;
    cfg.split = true;
    const RunConfig back = run_config_from_json(to_json(cfg));
    CHECK(back.platform.bb_capacity_total == 123);
    CHECK_FALSE(back.sim.io_model);
    CHECK(back.sim.seed == 42);
    CHECK(back.policies == cfg.policies);
    CHECK(back.anneal.cooling_steps == 7);
    CHECK(back.split);
    CHECK(to_json(back) == to_json(cfg));

    // Only the keys present override the base.
    const auto partial = run_config_from_json(nlohmann::json{{"sim", {{"tick_period_s", 30}}}}, cfg);
    CHECK(partial.sim.tick_period_s == 30);
    CHECK(partial.sim.seed == 42);
    CHECK(partial.policies == cfg.policies);
    const auto auto_cap = run_config_from_json(nlohmann::json{{"platform", {{"bb_capacity_total", nullptr}}}}, cfg);
    CHECK_FALSE(auto_cap.platform.bb_capacity_total);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS((void)run_config_from_json(nlohmann::json{{"platfrom", nlohmann::json::object()}}), ConfigError);
    CHECK_THROWS_AS((void)run_config_from_json(nlohmann::json{{"sim", {{"io", "on"}}}}), ConfigError);
    CHECK_THROWS_AS((void)run_config_from_json(nlohmann::json{{"sim", {{"io_model", "maybe"}}}}), ConfigError);
    CHECK_THROWS_AS((void)run_config_from_json(nlohmann::json{{"sim", {{"seed", "x"}}}}), ConfigError);
    TempDir dir;
    spit(dir / "bad.json", "{ not json");
    CHECK_THROWS_AS((void)read_json_file(dir / "bad.json"), ConfigError);
    CHECK_THROWS_AS((void)read_json_file(dir / "missing.json"), ConfigError);
}

TEST_CASE("BBSIM_SEED supplies the default seed") {
    ::unsetenv("BBSIM_SEED");
    CHECK(env_seed(5) == 5);
    ::setenv("BBSIM_SEED", "1234", 1);
    CHECK(env_seed(5) == 1234);
    ::setenv("BBSIM_SEED", "12x", 1);
    CHECK_THROWS_AS((void)env_seed(), ConfigError);
    ::unsetenv("BBSIM_SEED");
}

TEST_CASE("sha256 of a known file") {
    TempDir dir;
    spit(dir / "abc", "abc");
    CHECK(sha256_file(dir / "abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("convert: SWF with drops, clamps and a manifest") {
    TempDir dir;
    spit(dir / "log.swf",
         "; comment\n"
         "1 0 0 600 4 -1 -1 4 900 -1 1 1 1 1 1 -1 -1 -1\n"
         "2 5 0 -1 4 -1 -1 4 900 -1 0 1 1 1 1 -1 -1 -1\n"
         "3 9 0 500 2 -1 -1 2 100 -1 1 1 1 1 1 -1 -1 -1\n");
    ConvertOptions o;
    o.swf_path = dir / "log.swf";
    o.out_path = dir / "w.jsonl";
    o.manifest_path = dir / "w.manifest.json";
    o.seed = 3;
    std::ostringstream log;
    const auto r = cmd_convert(o, log);
    CHECK(r.jobs == 2);
    CHECK(r.dropped == 1);
    CHECK(r.clamped == 1);
    std::ifstream in(o.out_path);
    const auto jobs = read_workload(in);
    REQUIRE(jobs.size() == 2);
    CHECK(jobs[0].bb_total == jobs[0].bb_per_proc * 4);
    CHECK(jobs[1].walltime == 500);

    const auto again = convert_options_from_manifest(read_json_file(o.manifest_path));
    CHECK(again.swf_path == o.swf_path);
    CHECK(again.seed == 3);
    const std::string first = slurp(o.out_path);
    std::ostringstream log2;
    (void)cmd_convert(again, log2);
    CHECK(slurp(o.out_path) == first);

    spit(o.swf_path, "1 0 0 60 1 -1 -1 1 60 -1 1 1 1 1 1 -1 -1 -1\n");
    CHECK_THROWS_AS((void)convert_options_from_manifest(read_json_file(o.manifest_path)), ConfigError);
}

TEST_CASE("convert: empty SWF warns, corrupt SWF names the line") {
    TempDir dir;
    spit(dir / "empty.swf", "; nothing\n");
    ConvertOptions o;
    o.swf_path = dir / "empty.swf";
    o.out_path = dir / "w.jsonl";
    std::ostringstream log;
    CHECK(cmd_convert(o, log).jobs == 0);
    CHECK(log.str().find("warning") != std::string::npos);
    std::ifstream in(o.out_path);
    CHECK(read_workload(in).empty());

    spit(dir / "bad.swf", "1 0 0 600 4 -1 -1 4 900 -1 1 1 1 1 1 -1 -1 -1\n2 0 0 60\n");
    o.swf_path = dir / "bad.swf";
    try {
        (void)cmd_convert(o, log);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("simulate: fixture under fcfs-bb reproduces the golden starts") {
    TempDir dir;
    std::ostringstream log;
    const auto r = cmd_simulate(example_options(dir, "fcfs-bb"), log);
    const auto s = starts(r.records);
    const std::map<JobId, double> golden{{1, 0}, {2, 0}, {3, 600}, {4, 120}, {5, 540}, {6, 300}, {7, 240}, {8, 360}};
    CHECK(s == golden);
    CHECK(fs::exists(dir / "fcfs-bb.csv.manifest.json"));
}

TEST_CASE("simulate: plan-2 on small queues takes the exhaustive path") {
    TempDir dir;
    std::ostringstream log;
    const auto r = cmd_simulate(example_options(dir, "plan-2"), log);
    const auto& paths = r.manifest.at("results").at("plan-2").at("plan_paths");
    CHECK(paths.at("exhaustive").get<std::size_t>() > 0);
    CHECK_FALSE(paths.contains("anneal"));
}

TEST_CASE("simulate: reruns and manifest replays are byte-identical") {
    TempDir dir;
    std::ostringstream log;
    auto o = example_options(dir, "sjf-bb");
    o.config.policies = {"sjf-bb", "plan-1", "fcfs-easy"};
    o.out_path = dir / "a.csv";
    (void)cmd_simulate(o, log);
    o.out_path = dir / "b.csv";
    (void)cmd_simulate(o, log);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

    auto replay = simulate_options_from_manifest(read_json_file(dir / "a.csv.manifest.json"));
    CHECK(replay.out_path == dir / "a.csv");
    replay.out_path = dir / "c.csv";
    (void)cmd_simulate(replay, log);
    CHECK(slurp(dir / "c.csv") == slurp(dir / "a.csv"));
}

TEST_CASE("simulate: manifest refuses a changed workload") {
    TempDir dir;
    std::ostringstream log;
    auto o = example_options(dir, "fcfs");
    fs::copy_file(o.workload_path, dir / "w.jsonl");
    o.workload_path = dir / "w.jsonl";
    (void)cmd_simulate(o, log);
    std::ofstream(dir / "w.jsonl", std::ios::app) << "\n";
    CHECK_THROWS_AS((void)simulate_options_from_manifest(read_json_file(dir / "fcfs.csv.manifest.json")),
                    ConfigError);
    CHECK_THROWS_AS((void)simulate_options_from_manifest(nlohmann::json{{"command", "convert"}}), ConfigError);
}

TEST_CASE("simulate: infeasible jobs are listed and rejected") {
    TempDir dir;
    std::ostringstream log;
    auto o = example_options(dir, "fcfs");
    o.config.platform.bb_capacity_total = 5'000'000'000'000;  // job 3 wants 8 TB
    CHECK_THROWS_AS((void)cmd_simulate(o, log), InfeasibleError);
    CHECK(log.str().find(" 3") != std::string::npos);
    CHECK_FALSE(fs::exists(o.out_path));
}

TEST_CASE("simulate: trace needs one policy") {
    TempDir dir;
    std::ostringstream log;
    auto o = example_options(dir, "fcfs");
    o.config.policies = {"fcfs", "filler"};
    o.trace_path = dir / "t.jsonl";
    CHECK_THROWS_AS((void)cmd_simulate(o, log), ConfigError);
}

TEST_CASE("gantt: rows per node from a trace") {
    TempDir dir;
    std::ostringstream log;
    auto o = example_options(dir, "fcfs-bb");
    o.trace_path = dir / "t.jsonl";
    (void)cmd_simulate(o, log);

    std::ifstream in(o.trace_path);
    const auto rows = gantt_rows(in, std::nullopt);
    std::size_t procs = 0;
    for (const auto& j : {1, 1, 3, 2, 3, 2, 1, 2}) procs += static_cast<std::size_t>(j);
    CHECK(rows.size() == procs);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].start <= rows[i].start);
    std::size_t job3 = 0;
    for (const auto& r : rows) {
        if (r.job_id != 3) continue;
        ++job3;
        CHECK(r.start == 600.0);
        CHECK(r.finish == 660.0);
        CHECK(r.bb_shares == "4:8000000000000");
    }
    CHECK(job3 == 3);

    std::ifstream again(o.trace_path);
    const auto first2 = gantt_rows(again, 2);
    CHECK(first2.size() == 2);  // jobs 1 and 2, one node each

    GanttOptions g{o.trace_path, dir / "g.csv", std::nullopt};
    CHECK(cmd_gantt(g, log) == procs);
    CHECK(slurp(dir / "g.csv").rfind("job_id,node,start,finish,bb_shares\n", 0) == 0);
}

TEST_CASE("gantt: records without bindings and empty records") {
    TempDir dir;
    std::ostringstream log;
    const auto o = example_options(dir, "fcfs");
    (void)cmd_simulate(o, log);
    std::ifstream in(o.out_path);
    try {
        (void)gantt_rows(in, std::nullopt);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("--trace") != std::string::npos);
    }
    std::stringstream empty;
    write_records(empty, {});
    CHECK(gantt_rows(empty, std::nullopt).empty());
    std::ostringstream out;
    write_gantt(out, {});
    CHECK(out.str() == "job_id,node,start,finish,bb_shares\n");
}

TEST_CASE("analyze: one policy, no split, one summary row") {
    TempDir dir;
    std::ostringstream log;
    const auto o = example_options(dir, "fcfs-easy");
    (void)cmd_simulate(o, log);
    AnalyzeOptions a;
    a.inputs = {o.out_path};
    a.out_prefix = dir / "an";
    const auto r = cmd_analyze(a, log);
    CHECK(r.summary_rows == 1);
    const std::string summary = slurp(dir / "an.summary.csv");
    CHECK(lines(summary) == 2);
    CHECK(summary.find("fcfs-easy,waiting_time,8,0,") != std::string::npos);
}

TEST_CASE("analyze: six policies over sixteen parts, tails and normalization") {
    TempDir dir;
    std::vector<JobRecord> recs;
    const char* names[] = {"fcfs-easy", "filler", "fcfs-bb", "sjf-bb", "plan-1", "plan-2"};
    JobId id = 1;
    for (int p = 0; p < 6; ++p) {
        for (int k = 0; k < 16; ++k) {
            for (int i = 0; i < 200; ++i) {
                const double submit = static_cast<double>(k) * kPartLength + i * 60.0;
                recs.push_back({id++, submit, submit + 10.0 * (p + 1) + i, submit + 1000.0 + i, 1, 0, false,
                                names[p]});
            }
        }
    }
    {
        std::ofstream out(dir / "all.csv");
        write_records(out, recs);
    }
    std::ostringstream log;
    AnalyzeOptions a;
    a.inputs = {dir / "all.csv"};
    a.out_prefix = dir / "an";
    a.split = true;
    a.tail = 3000;
    const auto r = cmd_analyze(a, log);
    CHECK(r.summary_rows == 6);
    CHECK(r.normalized_rows == 96);
    CHECK(lines(slurp(dir / "an.normalized.csv")) == 97);
    CHECK(lines(slurp(dir / "an.tail.csv")) == 1 + 6 * 3000);
    const std::string norm = slurp(dir / "an.normalized.csv");
    CHECK(norm.find("sjf-bb,0,waiting_time,1\n") != std::string::npos);

    a.reference = "fcfs";
    CHECK_THROWS_AS((void)cmd_analyze(a, log), ConfigError);
}
