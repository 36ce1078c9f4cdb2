#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bbsim/types.hpp"

namespace bbsim {

/// Outcome of one job. Times in seconds; finish may be fractional when
/// transfers stretch the job.
struct JobRecord {
    JobId job_id = 0;
    double submit = 0.0;
    double start = 0.0;
    double finish = 0.0;
    int n_procs = 0;
    Bytes bb_total = 0;
    bool killed = false;
    std::string policy;

    friend bool operator==(const JobRecord&, const JobRecord&) = default;
};

inline constexpr double kSlowdownBound = 600.0;

[[nodiscard]] double waiting_time(const JobRecord& rec);

/// max(1, (wait + run) / max(run, bound)) with run = finish - start. For a
/// killed job finish - start is its walltime.
[[nodiscard]] double bounded_slowdown(const JobRecord& rec, double bound = kSlowdownBound);

enum class Metric { waiting_time, bounded_slowdown };

[[nodiscard]] const char* to_string(Metric metric);
[[nodiscard]] double metric_value(const JobRecord& rec, Metric metric);

/// Letter-value probabilities 1/64, 1/32, ..., 1/2, ..., 31/32, 63/64.
[[nodiscard]] const std::vector<double>& letter_value_levels();

struct Summary {
    std::size_t count = 0;
    std::size_t killed = 0;
    double mean = 0.0;
    double ci95 = 0.0;  // half-width, 1.96 * sd / sqrt(n)
    double max = 0.0;
    std::vector<double> quantiles;  // at letter_value_levels()
    std::vector<double> tail;       // largest values, descending
};

/// Nearest-rank quantile: the ceil(p * n)-th smallest value.
[[nodiscard]] double nearest_rank(const std::vector<double>& sorted, double p);

/// Throws std::invalid_argument on empty input.
[[nodiscard]] Summary summarize(const std::vector<double>& values, std::size_t tail_k = 3000);
[[nodiscard]] Summary summarize(const std::vector<JobRecord>& records, Metric metric, std::size_t tail_k = 3000);

/// mean[policy][part] / mean[reference][part]. Throws std::invalid_argument
/// if the reference lacks a part another policy has.
using PartMeans = std::map<std::string, std::map<int, double>>;
[[nodiscard]] PartMeans normalize_by_reference(const PartMeans& means, const std::string& reference);

/// Part index of a record by submit time, or -1 past the last part.
[[nodiscard]] int part_of(const JobRecord& rec);

// Records CSV: a "# bbsim-records v1" line, a header, one row per job.
void write_records(std::ostream& out, const std::vector<JobRecord>& records);
[[nodiscard]] std::vector<JobRecord> read_records(std::istream& in);

}  // namespace bbsim
