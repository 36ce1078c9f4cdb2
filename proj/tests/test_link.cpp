#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "bbsim/error.hpp"
#include "bbsim/link.hpp"
#include "oracle.hpp"

using namespace bbsim;

namespace {

struct Arrival {
    Nanos at;
    Bytes bytes;
};

struct Outcome {
    std::map<TransferId, Nanos> finish;  // by start order (ids are sequential)
    std::map<TransferId, Bytes> delivered;
    std::size_t updates = 0;
};

// Drives the link the way the engine does: every start and every reported
// completion is an update.
Outcome drive(SharedLink& link, std::vector<Arrival> arrivals) {
    std::stable_sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) { return a.at < b.at; });
    Outcome out;
    std::size_t next = 0;
    while (next < arrivals.size() || link.active() > 0) {
        const auto done_at = link.next_completion();
        if (next < arrivals.size() && (!done_at || arrivals[next].at < *done_at)) {
            link.start(arrivals[next].at, Route::pfs_to_bb, 0, arrivals[next].bytes);
            ++next;
        } else {
            for (const auto& t : link.collect(*done_at)) {
                out.finish[t.id] = *done_at;
                out.delivered[t.id] = t.total - t.remaining;
            }
        }
        ++out.updates;
    }
    return out;
}

}  // namespace

TEST_CASE("one 5e9-byte transfer on a 5e9 B/s link takes 1 s") {
    SharedLink link(5e9);
    const auto out = drive(link, {{0, 5'000'000'000}});
    CHECK(out.finish.at(1) == kNanosPerSecond);
}

TEST_CASE("two identical transfers share the link and finish at 2 s") {
    SharedLink link(5e9);
    const auto out = drive(link, {{0, 5'000'000'000}, {0, 5'000'000'000}});
    CHECK(out.finish.at(1) == 2 * kNanosPerSecond);
    CHECK(out.finish.at(2) == 2 * kNanosPerSecond);
}

TEST_CASE("late joiner: A 10e9 at 0 s, B 5e9 at 1 s, both finish at 3 s") {
    SharedLink link(5e9);
    link.start(0, Route::bb_to_pfs, 1, 10'000'000'000);
    CHECK(link.rate() == 5e9);
    link.start(kNanosPerSecond, Route::pfs_to_bb, 2, 5'000'000'000);
    CHECK(link.rate() == 2.5e9);
    CHECK(link.transfers().at(1).remaining == 5'000'000'000);
    CHECK(link.next_completion() == 3 * kNanosPerSecond);
    const auto done = link.collect(3 * kNanosPerSecond);
    REQUIRE(done.size() == 2);
    CHECK(done[0].id == 1);
    CHECK(done[1].id == 2);
    CHECK(link.active() == 0);
}

TEST_CASE("generation changes with the active set") {
    SharedLink link(100.0);
    const auto g0 = link.generation();
    const auto id = link.start(0, Route::compute_to_bb, 1, 100);
    CHECK(link.generation() > g0);
    const auto g1 = link.generation();
    CHECK(link.collect(kNanosPerSecond / 2).empty());
    CHECK(link.generation() == g1);
    link.cancel(kNanosPerSecond / 2, id);
    CHECK(link.generation() > g1);
    CHECK(link.active() == 0);
    const auto g2 = link.generation();
    link.cancel(kNanosPerSecond, id);  // already gone
    CHECK(link.generation() == g2);
}

TEST_CASE("zero-byte transfer completes immediately") {
    SharedLink link(5e9);
    link.start(7, Route::pfs_to_bb, 1, 0);
    CHECK(link.next_completion() == 7);
    CHECK(link.collect(7).size() == 1);
}

TEST_CASE("invalid bandwidth and time travel") {
    CHECK_THROWS_AS(SharedLink(0.2), ConfigError);
    SharedLink link(10.0);
    link.start(100, Route::pfs_to_bb, 1, 5);
    CHECK_THROWS_AS((void)link.collect(50), InternalError);
}

TEST_CASE("dedicated transfer time rounds up to the nanosecond") {
    CHECK(dedicated_transfer_time(1'250'000'000, 1.25e9) == kNanosPerSecond);
    CHECK(dedicated_transfer_time(1, 3.0) == 333'333'334);
    CHECK(dedicated_transfer_time(0, 3.0) == 0);
}

TEST_CASE("random schedules: exact bytes, finish times within the reshare bound") {
    std::mt19937_64 rng(2024);
    const double bw = 5e9;
    for (int trial = 0; trial < 300; ++trial) {
        std::uniform_int_distribution<int> count(1, 25);
        std::uniform_int_distribution<Nanos> at(0, 20 * kNanosPerSecond);
        std::uniform_int_distribution<Bytes> size(0, 30'000'000'000);
        std::vector<Arrival> arrivals(static_cast<std::size_t>(count(rng)));
        for (auto& a : arrivals) a = {at(rng), size(rng)};
        if (trial % 10 == 0) {
            for (auto& a : arrivals) a.at = (a.at / kNanosPerSecond) * kNanosPerSecond;  // simultaneous starts
        }
        SharedLink link(bw);
        const auto out = drive(link, arrivals);

        auto sorted = arrivals;
        std::stable_sort(sorted.begin(), sorted.end(), [](const Arrival& a, const Arrival& b) { return a.at < b.at; });
        std::vector<std::pair<long double, long double>> ideal_in;
        for (const auto& a : sorted) {
            ideal_in.emplace_back(static_cast<long double>(a.at) / 1e9L, static_cast<long double>(a.bytes));
        }
        const auto ideal = oracle::fair_share_finish(ideal_in, bw);

        // Every update floors each transfer's progress (< 1 byte, worth at
        // most n/bw seconds) and completions round up by < 1 ns.
        const long double n_max = static_cast<long double>(arrivals.size());
        const long double bound = static_cast<long double>(out.updates) * (n_max / bw + 1e-9L);
        REQUIRE(out.finish.size() == sorted.size());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const TransferId id = i + 1;
            CHECK(out.delivered.at(id) == sorted[i].bytes);
            const long double got = static_cast<long double>(out.finish.at(id)) / 1e9L;
            CHECK(got >= ideal[i] - 1e-9L);
            CHECK(got - ideal[i] <= bound);
        }
    }
}
