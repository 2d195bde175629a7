#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace omni {

struct FuzzConfig {
    std::uint64_t iterations = 10000;
    std::uint64_t seed = 1;
    /// Nonces per schedule are drawn from [1, maxNonces].
    std::uint32_t maxNonces = 8;
    /// DVNs per schedule are drawn from [1, maxDvns].
    std::uint32_t maxDvns = 3;
    /// Runs the destination endpoint with the skip-without-nonce-check bug.
    bool mutantSkipUnchecked = false;
};

struct FuzzReport {
    std::uint64_t schedules = 0;
    /// Schedules restricted to honest commits and deliveries, also checked
    /// against the in-order prefix oracle.
    std::uint64_t plainSchedules = 0;
    std::uint64_t operations = 0;
    /// Schedules with at least one failed check.
    std::uint64_t violations = 0;
    std::map<std::string, std::uint64_t> opCounts;

    std::optional<std::uint64_t> firstFailingSchedule;
    std::string firstFailure;
    /// Replayable scenario text for the first failing schedule.
    std::optional<std::string> counterexample;

    bool clean() const { return violations == 0; }
    std::string summary() const;
};

/// Randomized commit/deliver/skip/clear/nilify/burn schedules on one
/// two-chain channel, each checked step by step against a reference model
/// and finally against the in-order oracle.
FuzzReport fuzzChannel(const FuzzConfig& config);

/// Scenario text of schedule `index` under `config`. Every operation is
/// followed by the receipt the reference model expects, and the schedule
/// ends with per-nonce fate and state assertions.
std::string fuzzSchedule(const FuzzConfig& config, std::uint64_t index);

} // namespace omni
