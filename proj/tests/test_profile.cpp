#include <doctest.h>

#include <random>

#include "bbsim/error.hpp"
#include "bbsim/profile.hpp"
#include "fixture.hpp"
#include "oracle.hpp"

using namespace bbsim;
using fixture::kMin;
using fixture::kTB;

namespace {

// Fixture state at t = 1 min: job 1 (1 CPU, 4 TB) until 10 min, job 2
// (1 CPU, 2 TB) until 4 min.
AvailabilityProfile example_at_one() {
    AvailabilityProfile p(4, 10 * kTB, 1 * kMin);
    p.add_reservation({1, 0, 10 * kMin, 1, 4 * kTB, ReservationKind::running});
    p.add_reservation({2, 0, 4 * kMin, 1, 2 * kTB, ReservationKind::running});
    return p;
}

}  // namespace

TEST_CASE("earliest_slot on an empty profile is not_before") {
    const AvailabilityProfile p(96, 1000, 0);
    CHECK(p.earliest_slot(96, 1000, 3600, 0) == 0);
    CHECK(p.earliest_slot(1, 0, 1, 77) == 77);
}

TEST_CASE("fixture state: storage pushes job 3 to 10 min, processors alone to 4 min") {
    const auto p = example_at_one();
    CHECK(p.earliest_slot(3, 8 * kTB, 1 * kMin, 1 * kMin) == 10 * kMin);
    CHECK(p.earliest_slot(3, 0, 1 * kMin, 1 * kMin) == 4 * kMin);
}

TEST_CASE("fixture state: reserving job 3 leaves 2 TB at 10 min") {
    auto p = example_at_one();
    p.add_reservation({3, 10 * kMin, 11 * kMin, 3, 8 * kTB, ReservationKind::future});
    CHECK(p.free_bb(10 * kMin) == 2 * kTB);
    CHECK(p.free_procs(10 * kMin) == 1);
    CHECK(p.free_bb(11 * kMin) == 10 * kTB);

    oracle::NaiveProfile naive{4, 10 * kTB, {}};
    for (const auto& [id, r] : p.reservations()) naive.blocks.push_back({r.start, r.end, r.n_procs, r.bb_bytes});
    for (Time t : p.timeline().breakpoints()) {
        CHECK(p.free_procs(t) == naive.free_procs(t));
        CHECK(p.free_bb(t) == naive.free_bb(t));
    }
}

TEST_CASE("infeasible demand is an error") {
    const AvailabilityProfile p(4, 10 * kTB, 0);
    CHECK_THROWS_AS((void)p.earliest_slot(5, 0, 10, 0), InfeasibleError);
    CHECK_THROWS_AS((void)p.earliest_slot(1, 10 * kTB + 1, 10, 0), InfeasibleError);
}

TEST_CASE("reserve then remove restores the profile exactly") {
    auto p = example_at_one();
    const auto before = p;
    p.add_reservation({9, 5 * kMin, 20 * kMin, 2, 3 * kTB, ReservationKind::future});
    CHECK(p != before);
    p.remove_reservation(9);
    CHECK(p == before);
}

TEST_CASE("processor boundary: 96 procs accepted, the 97th rejected") {
    AvailabilityProfile p(96, 0, 0);
    p.add_reservation({1, 0, 100, 50, 0, ReservationKind::future});
    p.add_reservation({2, 0, 100, 46, 0, ReservationKind::future});
    const auto full = p;
    CHECK_THROWS_AS(p.add_reservation({3, 99, 101, 1, 0, ReservationKind::future}), CapacityError);
    CHECK(p == full);
    CHECK_NOTHROW(p.add_reservation({3, 100, 101, 1, 0, ReservationKind::future}));
}

TEST_CASE("malformed and duplicate reservations are rejected") {
    AvailabilityProfile p(4, 10, 0);
    CHECK_THROWS_AS(p.add_reservation({1, 5, 5, 1, 0, ReservationKind::future}), std::invalid_argument);
    CHECK_THROWS_AS(p.add_reservation({1, 0, 5, -1, 0, ReservationKind::future}), std::invalid_argument);
    p.add_reservation({1, 0, 5, 1, 0, ReservationKind::future});
    CHECK_THROWS_AS(p.add_reservation({1, 6, 9, 1, 0, ReservationKind::future}), std::invalid_argument);
    CHECK_THROWS_AS(p.remove_reservation(2), std::invalid_argument);
}

TEST_CASE("timeline stays canonical") {
    CapacityTimeline t(8, 100, 0);
    t.reserve(10, 20, 2, 10);
    t.reserve(20, 30, 2, 10);
    CHECK(t.segments().size() == 3);
    t.release(10, 30, 2, 10);
    CHECK(t == CapacityTimeline(8, 100, 0));
    CHECK(t.to_csv().find("0,8,100") != std::string::npos);
}

TEST_CASE("random reservation sequences match a from-scratch re-summation") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const int procs = 16;
        const Bytes bb = 1000;
        AvailabilityProfile p(procs, bb, 0);
        oracle::NaiveProfile naive{procs, bb, {}};
        std::uniform_int_distribution<int> n_dist(0, 8), t_dist(0, 500), d_dist(1, 200);
        std::uniform_int_distribution<Bytes> b_dist(0, 600);
        for (JobId id = 1; id <= 30; ++id) {
            const int n = n_dist(rng);
            const Bytes b = b_dist(rng);
            const Time d = d_dist(rng);
            const Time nb = t_dist(rng);
            const Time s = p.earliest_slot(n, b, d, nb);
            CHECK(s == naive.earliest(n, b, d, nb));
            CHECK(p.fits(n, b, s, d));
            // Tight: no earlier breakpoint at or after not_before fits.
            for (Time bp : p.timeline().breakpoints()) {
                if (bp >= nb && bp < s) CHECK_FALSE(p.fits(n, b, bp, d));
            }
            if (nb < s) CHECK_FALSE(p.fits(n, b, nb, d));
            p.add_reservation({id, s, s + d, n, b, ReservationKind::future});
            naive.blocks.push_back({s, s + d, n, b});
            if (id % 7 == 0) {
                const JobId victim = id - 3;
                const auto* r = p.find(victim);
                REQUIRE(r != nullptr);
                for (auto it = naive.blocks.begin(); it != naive.blocks.end(); ++it) {
                    if (it->start == r->start && it->end == r->end && it->procs == r->n_procs &&
                        it->bb == r->bb_bytes) {
                        naive.blocks.erase(it);
                        break;
                    }
                }
                p.remove_reservation(victim);
            }
        }
        for (Time t : p.timeline().breakpoints()) {
            CHECK(p.free_procs(t) == naive.free_procs(t));
            CHECK(p.free_bb(t) == naive.free_bb(t));
            CHECK(p.free_procs(t) >= 0);
            CHECK(p.free_procs(t) <= procs);
            CHECK(p.free_bb(t) >= 0);
            CHECK(p.free_bb(t) <= bb);
        }
    }
}

TEST_CASE("allocate_bb: worst-fit levelling") {
    const std::vector<Bytes> pools{5 * kTB, 5 * kTB, 5 * kTB};
    CHECK(allocate_bb(pools, 6 * kTB) == std::vector<Bytes>{2 * kTB, 2 * kTB, 2 * kTB});
    CHECK(allocate_bb(pools, 0) == std::vector<Bytes>{0, 0, 0});
    // Byte by byte to the fullest pool, lowest index on ties.
    CHECK(allocate_bb(std::vector<Bytes>{10, 4, 4}, 8) == std::vector<Bytes>{7, 1, 0});
    CHECK(allocate_bb(std::vector<Bytes>{3, 3}, 3) == std::vector<Bytes>{2, 1});
    const std::vector<Bytes> small{kTB, kTB};
    CHECK_THROWS_AS((void)allocate_bb(small, 3 * kTB), AllocationError);
}

TEST_CASE("allocate_bb: shares sum to the request and respect pools") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<Bytes> pool(0, 1000);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Bytes> pools(1 + trial % 12);
        Bytes total = 0;
        for (auto& p : pools) total += (p = pool(rng));
        std::uniform_int_distribution<Bytes> req(0, total);
        const Bytes want = req(rng);
        const auto shares = allocate_bb(pools, want);
        Bytes sum = 0;
        for (std::size_t i = 0; i < pools.size(); ++i) {
            CHECK(shares[i] >= 0);
            CHECK(shares[i] <= pools[i]);
            sum += shares[i];
        }
        CHECK(sum == want);
    }
}

TEST_CASE("allocate_nodes picks the lowest ids") {
    std::set<NodeId> all;
    for (NodeId i = 0; i < 96; ++i) all.insert(i);
    CHECK(allocate_nodes(all, 3) == std::vector<NodeId>{0, 1, 2});
    CHECK(allocate_nodes({5, 9, 50}, 2) == std::vector<NodeId>{5, 9});
    CHECK(allocate_nodes({5, 9, 50}, 0).empty());
    CHECK_THROWS_AS((void)allocate_nodes({1}, 2), AllocationError);
}
