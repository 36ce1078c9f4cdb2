#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "bbsim/types.hpp"

namespace bbsim {

using TransferId = std::uint64_t;

enum class Route { pfs_to_bb, bb_to_pfs, compute_to_bb };

[[nodiscard]] const char* to_string(Route route);

struct Transfer {
    TransferId id = 0;
    Route route = Route::pfs_to_bb;
    JobId job = 0;
    Bytes total = 0;
    Bytes remaining = 0;
    Nanos started = 0;
};

/// Single bottleneck link shared equally by its active transfers: each of n
/// transfers moves at bandwidth / n. Progress is integer bytes over integer
/// nanoseconds; sub-byte progress is dropped at every reshare, so a transfer
/// never finishes early and always delivers exactly its size.
class SharedLink {
public:
    /// `bandwidth` in bytes per second, rounded to a whole number.
    explicit SharedLink(double bandwidth);

    TransferId start(Nanos now, Route route, JobId job, Bytes bytes);
    /// Removes an in-flight transfer; no-op if it already finished.
    void cancel(Nanos now, TransferId id);

    /// Earliest completion of the current set, if any transfer is active.
    [[nodiscard]] std::optional<Nanos> next_completion() const;

    /// Advances to `now` and removes every transfer that has finished,
    /// returned in id order.
    std::vector<Transfer> collect(Nanos now);

    /// Bumped whenever the active set (and thus every rate) changes.
    [[nodiscard]] std::uint64_t generation() const { return generation_; }
    [[nodiscard]] std::size_t active() const { return transfers_.size(); }
    /// Current per-transfer rate in bytes per second.
    [[nodiscard]] double rate() const;
    [[nodiscard]] const std::map<TransferId, Transfer>& transfers() const { return transfers_; }
    [[nodiscard]] std::int64_t bandwidth() const { return bandwidth_; }

private:
    void advance(Nanos now);

    std::int64_t bandwidth_;
    std::map<TransferId, Transfer> transfers_;
    Nanos last_update_ = 0;
    TransferId next_id_ = 1;
    std::uint64_t generation_ = 0;
};

/// Time to push `bytes` at a dedicated `bandwidth` (bytes/s), rounded up to
/// the nanosecond.
[[nodiscard]] Nanos dedicated_transfer_time(Bytes bytes, double bandwidth);

}  // namespace bbsim
