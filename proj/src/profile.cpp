#include "bbsim/profile.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bbsim/error.hpp"

namespace bbsim {

CapacityTimeline::CapacityTimeline(int total_procs, Bytes total_bb, Time origin)
    : total_procs_(total_procs), total_bb_(total_bb), origin_(origin) {
    if (total_procs < 0 || total_bb < 0) throw std::invalid_argument("negative platform totals");
    segments_.push_back({origin, total_procs, total_bb});
}

std::size_t CapacityTimeline::segment_index(Time t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](Time value, const Segment& s) { return value < s.start; });
    if (it == segments_.begin()) return 0;
    return static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
}

Time CapacityTimeline::earliest_slot(int n_procs, Bytes bb, Time duration, Time not_before) const {
    if (n_procs > total_procs_ || bb > total_bb_) {
        throw InfeasibleError("demand of " + std::to_string(n_procs) + " procs / " + std::to_string(bb) +
                              " bytes exceeds the platform");
    }
    Time candidate = std::max(not_before, origin_);
    for (std::size_t i = segment_index(candidate); i < segments_.size(); ++i) {
        const Segment& s = segments_[i];
        const Time end = i + 1 < segments_.size() ? segments_[i + 1].start : kTimeInfinity;
        if (s.free_procs >= n_procs && s.free_bb >= bb) {
            if (candidate + duration <= end) return candidate;
        } else {
            candidate = end;
        }
    }
    // The last segment extends to infinity and every reservation ends, so
    // a demand within the totals always fits eventually.
    throw InternalError("timeline does not return to full capacity");
}

bool CapacityTimeline::fits(int n_procs, Bytes bb, Time start, Time duration) const {
    if (n_procs > total_procs_ || bb > total_bb_) return false;
    const Time from = std::max(start, origin_);
    const Time to = start + duration;
    for (std::size_t i = segment_index(from); i < segments_.size() && segments_[i].start < to; ++i) {
        if (segments_[i].free_procs < n_procs || segments_[i].free_bb < bb) return false;
    }
    return true;
}

std::size_t CapacityTimeline::split_at(Time t) {
    const std::size_t i = segment_index(t);
    if (segments_[i].start == t) return i;
    Segment copy = segments_[i];
    copy.start = t;
    segments_.insert(segments_.begin() + static_cast<std::ptrdiff_t>(i + 1), copy);
    return i + 1;
}

void CapacityTimeline::apply(Time start, Time end, int d_procs, Bytes d_bb) {
    const Time from = std::max(start, origin_);
    if (end <= from) return;
    // Validate before mutating so a rejected request leaves no trace.
    for (std::size_t i = segment_index(from); i < segments_.size() && segments_[i].start < end; ++i) {
        const long long procs = segments_[i].free_procs + static_cast<long long>(d_procs);
        const Bytes bytes = segments_[i].free_bb + d_bb;
        if (procs < 0 || bytes < 0) {
            throw CapacityError("reservation over [" + std::to_string(start) + ", " + std::to_string(end) +
                                ") exceeds free capacity at t=" +
                                std::to_string(std::max(from, segments_[i].start)));
        }
        if (procs > total_procs_ || bytes > total_bb_) {
            throw CapacityError("release over [" + std::to_string(start) + ", " + std::to_string(end) +
                                ") exceeds platform totals");
        }
    }
    const std::size_t first = split_at(from);
    const std::size_t last = split_at(end);
    for (std::size_t i = first; i < last; ++i) {
        segments_[i].free_procs += d_procs;
        segments_[i].free_bb += d_bb;
    }
    coalesce();
}

void CapacityTimeline::coalesce() {
    auto out = segments_.begin();
    for (auto it = segments_.begin() + 1; it != segments_.end(); ++it) {
        if (it->free_procs != out->free_procs || it->free_bb != out->free_bb) {
            *++out = *it;
        }
    }
    segments_.erase(out + 1, segments_.end());
}

void CapacityTimeline::reserve(Time start, Time end, int n_procs, Bytes bb) { apply(start, end, -n_procs, -bb); }

void CapacityTimeline::release(Time start, Time end, int n_procs, Bytes bb) { apply(start, end, n_procs, bb); }

int CapacityTimeline::free_procs(Time t) const {
    return t < origin_ ? total_procs_ : segments_[segment_index(t)].free_procs;
}

Bytes CapacityTimeline::free_bb(Time t) const { return t < origin_ ? total_bb_ : segments_[segment_index(t)].free_bb; }

std::vector<Time> CapacityTimeline::breakpoints() const {
    std::vector<Time> out;
    out.reserve(segments_.size());
    for (const auto& s : segments_) out.push_back(s.start);
    return out;
}

std::string CapacityTimeline::to_csv() const {
    std::ostringstream os;
    os << "time,free_procs,free_bb\n";
    for (const auto& s : segments_) os << s.start << ',' << s.free_procs << ',' << s.free_bb << '\n';
    return os.str();
}

AvailabilityProfile::AvailabilityProfile(int total_procs, Bytes total_bb, Time origin)
    : timeline_(total_procs, total_bb, origin) {}

void AvailabilityProfile::add_reservation(const Reservation& r) {
    if (r.start >= r.end || r.n_procs < 0 || r.bb_bytes < 0) {
        throw std::invalid_argument("malformed reservation for job " + std::to_string(r.job_id));
    }
    if (reservations_.count(r.job_id) != 0) {
        throw std::invalid_argument("job " + std::to_string(r.job_id) + " already holds a reservation");
    }
    timeline_.reserve(r.start, r.end, r.n_procs, r.bb_bytes);
    reservations_.emplace(r.job_id, r);
}

void AvailabilityProfile::remove_reservation(JobId job_id) {
    auto it = reservations_.find(job_id);
    if (it == reservations_.end()) {
        throw std::invalid_argument("job " + std::to_string(job_id) + " holds no reservation");
    }
    const Reservation& r = it->second;
    timeline_.release(r.start, r.end, r.n_procs, r.bb_bytes);
    reservations_.erase(it);
}

const Reservation* AvailabilityProfile::find(JobId job_id) const {
    auto it = reservations_.find(job_id);
    return it == reservations_.end() ? nullptr : &it->second;
}

std::vector<Bytes> allocate_bb(std::span<const Bytes> free_pools, Bytes bytes) {
    std::vector<Bytes> shares(free_pools.size(), 0);
    if (bytes <= 0) return shares;
    const Bytes available = std::accumulate(free_pools.begin(), free_pools.end(), Bytes{0});
    if (available < bytes) {
        throw AllocationError("burst-buffer request of " + std::to_string(bytes) + " bytes exceeds " +
                              std::to_string(available) + " free bytes");
    }
    auto above = [&](Bytes level) {
        Bytes sum = 0;
        for (Bytes p : free_pools) sum += std::max<Bytes>(0, p - level);
        return sum;
    };
    // Largest level L with above(L) >= bytes; above() is non-increasing.
    Bytes lo = 0;
    Bytes hi = *std::max_element(free_pools.begin(), free_pools.end());
    while (lo < hi) {
        const Bytes mid = lo + (hi - lo + 1) / 2;
        if (above(mid) >= bytes) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    const Bytes level = lo + 1;
    Bytes assigned = 0;
    for (std::size_t i = 0; i < free_pools.size(); ++i) {
        shares[i] = std::max<Bytes>(0, free_pools[i] - level);
        assigned += shares[i];
    }
    Bytes extra = bytes - assigned;
    for (std::size_t i = 0; i < free_pools.size() && extra > 0; ++i) {
        if (free_pools[i] >= level) {
            ++shares[i];
            --extra;
        }
    }
    if (extra != 0) throw InternalError("worst-fit split left bytes unassigned");
    return shares;
}

std::vector<NodeId> allocate_nodes(const std::set<NodeId>& free_nodes, int n) {
    if (n < 0 || static_cast<std::size_t>(n) > free_nodes.size()) {
        throw AllocationError("requested " + std::to_string(n) + " nodes, " + std::to_string(free_nodes.size()) +
                              " free");
    }
    return {free_nodes.begin(), std::next(free_nodes.begin(), n)};
}

}  // namespace bbsim
