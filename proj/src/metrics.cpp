#include "bbsim/metrics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bbsim/error.hpp"

namespace bbsim {

double waiting_time(const JobRecord& rec) { return rec.start - rec.submit; }

double bounded_slowdown(const JobRecord& rec, double bound) {
    const double run = rec.finish - rec.start;
    const double wait = waiting_time(rec);
    return std::max(1.0, (wait + run) / std::max(run, bound));
}

const char* to_string(Metric metric) {
    return metric == Metric::waiting_time ? "waiting_time" : "bounded_slowdown";
}

double metric_value(const JobRecord& rec, Metric metric) {
    return metric == Metric::waiting_time ? waiting_time(rec) : bounded_slowdown(rec);
}

const std::vector<double>& letter_value_levels() {
    static const std::vector<double> levels = [] {
        std::vector<double> lv;
        for (int k = 6; k >= 1; --k) lv.push_back(std::ldexp(1.0, -k));
        for (int k = 2; k <= 6; ++k) lv.push_back(1.0 - std::ldexp(1.0, -k));
        return lv;
    }();
    return levels;
}

double nearest_rank(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

Summary summarize(const std::vector<double>& values, std::size_t tail_k) {
    if (values.empty()) throw std::invalid_argument("cannot summarize an empty sample");
    Summary s;
    s.count = values.size();
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    s.max = sorted.back();
    for (double p : letter_value_levels()) s.quantiles.push_back(nearest_rank(sorted, p));
    const std::size_t k = std::min(tail_k, sorted.size());
    s.tail.assign(sorted.rbegin(), sorted.rbegin() + static_cast<std::ptrdiff_t>(k));
    return s;
}

Summary summarize(const std::vector<JobRecord>& records, Metric metric, std::size_t tail_k) {
    std::vector<double> values;
    values.reserve(records.size());
    std::size_t killed = 0;
    for (const auto& r : records) {
        values.push_back(metric_value(r, metric));
        killed += r.killed ? 1 : 0;
    }
    Summary s = summarize(values, tail_k);
    s.killed = killed;
    return s;
}

PartMeans normalize_by_reference(const PartMeans& means, const std::string& reference) {
    auto ref_it = means.find(reference);
    if (ref_it == means.end()) throw std::invalid_argument("reference policy '" + reference + "' has no results");
    const auto& ref = ref_it->second;
    PartMeans out;
    for (const auto& [policy, parts] : means) {
        for (const auto& [part, mean] : parts) {
            auto r = ref.find(part);
            if (r == ref.end()) {
                throw std::invalid_argument("reference policy '" + reference + "' is missing part " +
                                            std::to_string(part));
            }
            double value;
            if (r->second == 0.0) {
                value = mean == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
            } else {
                value = mean / r->second;
            }
            out[policy][part] = value;
        }
    }
    return out;
}

int part_of(const JobRecord& rec) {
    if (rec.submit < 0) return -1;
    const auto index = static_cast<long long>(std::floor(rec.submit / static_cast<double>(kPartLength)));
    return index < kPartCount ? static_cast<int>(index) : -1;
}

namespace {

constexpr const char* kRecordsMagic = "# bbsim-records v1";
constexpr const char* kRecordsHeader = "job_id,submit,start,finish,n_procs,bb_total,killed,policy";

std::string format_seconds(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    // Trim trailing zeros so integral times print as integers.
    std::string s(buf);
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void write_records(std::ostream& out, const std::vector<JobRecord>& records) {
    out << kRecordsMagic << '\n' << kRecordsHeader << '\n';
    for (const auto& r : records) {
        out << r.job_id << ',' << format_seconds(r.submit) << ',' << format_seconds(r.start) << ','
            << format_seconds(r.finish) << ',' << r.n_procs << ',' << r.bb_total << ',' << (r.killed ? 1 : 0) << ','
            << r.policy << '\n';
    }
}

std::vector<JobRecord> read_records(std::istream& in) {
    std::vector<JobRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kRecordsHeader) throw ParseError("unexpected records header '" + line + "'", line_no);
            header_seen = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 8) throw ParseError("expected 8 columns, got " + std::to_string(f.size()), line_no);
        try {
            JobRecord r;
            r.job_id = std::stoll(f[0]);
            r.submit = std::stod(f[1]);
            r.start = std::stod(f[2]);
            r.finish = std::stod(f[3]);
            r.n_procs = std::stoi(f[4]);
            r.bb_total = std::stoll(f[5]);
            r.killed = f[6] == "1";
            r.policy = f[7];
            records.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError("malformed record", line_no);
        }
    }
    return records;
}

}  // namespace bbsim
