#include "bbsim/link.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bbsim/error.hpp"

namespace bbsim {

namespace {

using Wide = __int128;

Nanos ceil_div(Wide num, Wide den) { return static_cast<Nanos>((num + den - 1) / den); }

}  // namespace

const char* to_string(Route route) {
    switch (route) {
        case Route::pfs_to_bb: return "pfs_to_bb";
        case Route::bb_to_pfs: return "bb_to_pfs";
        case Route::compute_to_bb: return "compute_to_bb";
    }
    return "?";
}

SharedLink::SharedLink(double bandwidth) : bandwidth_(static_cast<std::int64_t>(std::llround(bandwidth))) {
    if (bandwidth_ < 1) throw ConfigError("link bandwidth must be at least 1 byte/s");
}

void SharedLink::advance(Nanos now) {
    if (now < last_update_) throw InternalError("shared link moved backwards in time");
    if (!transfers_.empty() && now > last_update_) {
        const Wide n = static_cast<Wide>(transfers_.size());
        const Wide delivered = static_cast<Wide>(now - last_update_) * bandwidth_ / (n * kNanosPerSecond);
        for (auto& [id, t] : transfers_) {
            t.remaining -= static_cast<Bytes>(std::min<Wide>(delivered, t.remaining));
        }
    }
    last_update_ = now;
}

TransferId SharedLink::start(Nanos now, Route route, JobId job, Bytes bytes) {
    if (bytes < 0) throw std::invalid_argument("negative transfer size");
    advance(now);
    const TransferId id = next_id_++;
    transfers_.emplace(id, Transfer{id, route, job, bytes, bytes, now});
    ++generation_;
    return id;
}

void SharedLink::cancel(Nanos now, TransferId id) {
    advance(now);
    if (transfers_.erase(id) != 0) ++generation_;
}

std::optional<Nanos> SharedLink::next_completion() const {
    if (transfers_.empty()) return std::nullopt;
    Bytes min_remaining = transfers_.begin()->second.remaining;
    for (const auto& [id, t] : transfers_) min_remaining = std::min(min_remaining, t.remaining);
    const Wide n = static_cast<Wide>(transfers_.size());
    return last_update_ + ceil_div(static_cast<Wide>(min_remaining) * n * kNanosPerSecond, bandwidth_);
}

std::vector<Transfer> SharedLink::collect(Nanos now) {
    advance(now);
    std::vector<Transfer> done;
    for (auto it = transfers_.begin(); it != transfers_.end();) {
        if (it->second.remaining == 0) {
            done.push_back(it->second);
            it = transfers_.erase(it);
        } else {
            ++it;
        }
    }
    if (!done.empty()) ++generation_;
    return done;
}

double SharedLink::rate() const {
    return transfers_.empty() ? 0.0 : static_cast<double>(bandwidth_) / static_cast<double>(transfers_.size());
}

Nanos dedicated_transfer_time(Bytes bytes, double bandwidth) {
    const auto bw = static_cast<std::int64_t>(std::llround(bandwidth));
    if (bw < 1) throw ConfigError("link bandwidth must be at least 1 byte/s");
    if (bytes <= 0) return 0;
    return ceil_div(static_cast<Wide>(bytes) * kNanosPerSecond, bw);
}

}  // namespace bbsim
