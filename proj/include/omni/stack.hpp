#pragma once

#include "omni/bytes.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>

namespace omni {

using WorkerId = std::uint32_t;

/// Identifies one immutable MessageLib: (libId, major.minor).
struct LibraryRef {
    std::uint32_t libId = 0;
    std::uint16_t major = 0;
    std::uint16_t minor = 0;

    std::string str() const;
    friend auto operator<=>(const LibraryRef&, const LibraryRef&) = default;
};

inline constexpr std::size_t kMaxDvns = 254;

/// Per (OApp, remote endpoint) security configuration, owned by the OApp.
struct SecurityStack {
    LibraryRef sendLibrary;
    LibraryRef receiveLibrary;
    std::optional<LibraryRef> prevReceiveLibrary;
    std::optional<std::uint64_t> gracePeriodEnd;
    std::set<WorkerId> requiredDvns;
    std::set<WorkerId> optionalDvns;
    std::uint8_t optionalThreshold = 0;
    WorkerId executor = 0;
    /// When set, every other field is ignored and the endpoint's default
    /// stack for the remote is resolved at use time.
    bool isDefaultOptIn = false;

    friend bool operator==(const SecurityStack&, const SecurityStack&) = default;
};

/// Returns an empty string when the stack is well formed, otherwise the
/// violated constraint.
std::string stackViolation(const SecurityStack& s);

} // namespace omni
