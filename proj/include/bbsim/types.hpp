#pragma once

#include <cstdint>
#include <limits>

namespace bbsim {

/// Scheduling time in whole seconds.
using Time = std::int64_t;
/// Engine clock in nanoseconds.
using Nanos = std::int64_t;
using Bytes = std::int64_t;
using JobId = std::int64_t;
using NodeId = std::int32_t;

inline constexpr Nanos kNanosPerSecond = 1'000'000'000;
inline constexpr Time kTimeInfinity = std::numeric_limits<Time>::max() / 4;

constexpr Nanos to_nanos(Time t) noexcept { return t * kNanosPerSecond; }

/// Three weeks, the length of one evaluation part.
inline constexpr Time kPartLength = 3 * 7 * 24 * 3600;
inline constexpr int kPartCount = 16;

}  // namespace bbsim
