#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bbsim/types.hpp"

namespace bbsim {

enum class ReservationKind { running, future };

struct Reservation {
    JobId job_id = 0;
    Time start = 0;
    Time end = 0;  // exclusive
    int n_procs = 0;
    Bytes bb_bytes = 0;
    ReservationKind kind = ReservationKind::future;

    friend bool operator==(const Reservation&, const Reservation&) = default;
};

/// Piecewise-constant free processors and free burst-buffer bytes from
/// `origin` to infinity. Kept canonical: adjacent segments always differ,
/// so equal reservation sets give equal timelines.
class CapacityTimeline {
public:
    struct Segment {
        Time start = 0;
        int free_procs = 0;
        Bytes free_bb = 0;

        friend bool operator==(const Segment&, const Segment&) = default;
    };

    CapacityTimeline(int total_procs, Bytes total_bb, Time origin = 0);

    /// Smallest t >= not_before with enough procs and bytes over [t, t+duration).
    /// Only `not_before` and later breakpoints are candidates.
    /// Throws InfeasibleError when the demand exceeds the platform totals.
    [[nodiscard]] Time earliest_slot(int n_procs, Bytes bb, Time duration, Time not_before) const;

    [[nodiscard]] bool fits(int n_procs, Bytes bb, Time start, Time duration) const;

    /// Subtracts the demand over [start, end). Throws CapacityError and leaves
    /// the timeline unchanged if any point would go negative.
    void reserve(Time start, Time end, int n_procs, Bytes bb);
    /// Inverse of reserve(); throws CapacityError past the totals.
    void release(Time start, Time end, int n_procs, Bytes bb);

    [[nodiscard]] int free_procs(Time t) const;
    [[nodiscard]] Bytes free_bb(Time t) const;
    [[nodiscard]] std::vector<Time> breakpoints() const;
    [[nodiscard]] const std::vector<Segment>& segments() const { return segments_; }

    [[nodiscard]] int total_procs() const { return total_procs_; }
    [[nodiscard]] Bytes total_bb() const { return total_bb_; }
    [[nodiscard]] Time origin() const { return origin_; }

    /// "time,free_procs,free_bb" rows, one per breakpoint.
    [[nodiscard]] std::string to_csv() const;

    friend bool operator==(const CapacityTimeline&, const CapacityTimeline&) = default;

private:
    [[nodiscard]] std::size_t segment_index(Time t) const;
    std::size_t split_at(Time t);
    void apply(Time start, Time end, int d_procs, Bytes d_bb);
    void coalesce();

    std::vector<Segment> segments_;
    int total_procs_;
    Bytes total_bb_;
    Time origin_;
};

/// Availability profile: a timeline plus the reservations that shaped it,
/// at most one per job.
class AvailabilityProfile {
public:
    AvailabilityProfile(int total_procs, Bytes total_bb, Time origin = 0);

    [[nodiscard]] Time earliest_slot(int n_procs, Bytes bb, Time duration, Time not_before) const {
        return timeline_.earliest_slot(n_procs, bb, duration, not_before);
    }
    [[nodiscard]] bool fits(int n_procs, Bytes bb, Time start, Time duration) const {
        return timeline_.fits(n_procs, bb, start, duration);
    }

    /// Throws CapacityError on overflow and std::invalid_argument on a
    /// malformed or duplicate reservation.
    void add_reservation(const Reservation& r);
    void remove_reservation(JobId job_id);
    [[nodiscard]] const Reservation* find(JobId job_id) const;

    [[nodiscard]] int free_procs(Time t) const { return timeline_.free_procs(t); }
    [[nodiscard]] Bytes free_bb(Time t) const { return timeline_.free_bb(t); }
    [[nodiscard]] const CapacityTimeline& timeline() const { return timeline_; }
    [[nodiscard]] const std::map<JobId, Reservation>& reservations() const { return reservations_; }

    friend bool operator==(const AvailabilityProfile&, const AvailabilityProfile&) = default;

private:
    CapacityTimeline timeline_;
    std::map<JobId, Reservation> reservations_;
};

/// Worst-fit split of `bytes` over per-storage-node free pools: shares level
/// the remaining free space, extra bytes go to the lowest index first.
/// Throws AllocationError if the pools cannot hold the request.
[[nodiscard]] std::vector<Bytes> allocate_bb(std::span<const Bytes> free_pools, Bytes bytes);

/// The n lowest-id nodes of `free_nodes`. Throws AllocationError if too few.
[[nodiscard]] std::vector<NodeId> allocate_nodes(const std::set<NodeId>& free_nodes, int n);

}  // namespace bbsim
