#pragma once

#include "omni/chain.hpp"
#include "omni/oapps.hpp"
#include "omni/workers.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace omni {

/// Scenario load failure with the 1-based line it refers to.
class ScenarioError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownReference, Setup };

    ScenarioError(Kind kind, int line, const std::string& reason);

    Kind kind() const { return kind_; }
    int line() const { return line_; }

private:
    Kind kind_;
    int line_;
};

/// Whitespace-separated arguments of one scenario line.
struct Args {
    std::vector<std::string> positional;
    std::map<std::string, std::string> named;

    bool has(const std::string& key) const { return named.count(key) != 0; }
};

struct LibraryDecl {
    LibraryRef ref;
    LibKind kind = LibKind::Uln;
    std::vector<std::string> allow;
    std::optional<EndpointId> chain;
};

struct WorkerDecl {
    enum class Kind { Dvn, Executor, User, PreCrime };

    Kind kind = Kind::Dvn;
    std::string name;
    WorkerId id = 0;
    std::set<EndpointId> watch;
    std::uint64_t latency = 1;
    Behavior behavior;
    std::uint8_t optionWorkerId = 0;
    std::vector<std::string> peers;
};

struct OAppDecl {
    std::string name;
    std::string kind;   // bridge | swap | recorder
    EndpointId chain;
    Address addr;
    Args args;
};

struct StackDecl {
    std::string oapp;
    EndpointId remote;
    bool optIn = false;
    LibraryRef send;
    LibraryRef recv;
    std::vector<std::string> required;
    std::vector<std::string> optional;
    std::uint8_t threshold = 0;
    std::string executor;
};

struct DefaultDecl {
    EndpointId chain;
    StackDecl stack;
};

struct ScenarioEvent {
    std::uint64_t tick = 0;
    std::string verb;
    Args args;
    /// Raw text after the verb, used by trace-contains.
    std::string rest;
    std::optional<StackDecl> stack;
    int line = 0;
};

struct Scenario {
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> ticks;
    std::vector<ChainConfig> chains;
    std::vector<LibraryDecl> libraries;
    FeeSchedule fees;
    std::vector<WorkerDecl> workers;
    std::vector<OAppDecl> oapps;
    std::vector<StackDecl> stacks;
    std::vector<DefaultDecl> defaults;
    std::vector<std::pair<EndpointId, std::string>> quirks;
    std::set<std::string> watches;
    std::vector<ScenarioEvent> timeline;

    /// Ticks to run: explicit `ticks`, else the last timeline tick plus 32.
    std::uint64_t tickCount() const;
    /// Distinct (sender, receiver) OApp pairs the timeline sends over.
    std::set<std::pair<std::string, std::string>> paths() const;
};

/// Parses the line-oriented scenario language. Throws ScenarioError; a
/// scenario is either fully parsed or rejected.
Scenario parseScenario(std::string_view text);
Scenario loadScenarioFile(const std::string& path);

struct AssertionResult {
    std::uint64_t tick = 0;
    int line = 0;
    std::string text;
    bool passed = false;
    std::string detail;
};

struct RunResult {
    std::vector<std::string> trace;
    std::vector<AssertionResult> assertions;

    bool passed() const;
    std::string traceText() const;
    /// Hex SHA-256 of traceText().
    std::string traceDigest() const;
};

/// Lifecycle of one packet as seen from its destination.
enum class PacketState { Unsent, Sent, Committable, Verified, Nilified, Received };

std::string_view toString(PacketState s);

inline const Address kScenarioAdmin = Address::fromU64(0xad);
inline const Address kUserActor = Address::fromU64(0x05e7);

/// One deterministic run of a scenario: network, workers, trace and checks.
class Simulation {
public:
    explicit Simulation(const Scenario& scenario, std::optional<std::uint64_t> seedOverride = {});

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Timeline events at `tick`, then chain blocks, then workers, then watches.
    void runTick(std::uint64_t tick);
    /// Runs every tick of the scenario and returns the result.
    RunResult run();

    /// Executes one timeline event immediately; returns the last receipt
    /// (Applied for non-transactional events).
    TxReceipt execute(const ScenarioEvent& ev, std::uint64_t tick);

    /// Evaluates a predicate line (text after `assert`).
    AssertionResult evaluate(const ScenarioEvent& ev, std::uint64_t tick);

    /// First violation of a named watch, or empty when it holds.
    std::string checkWatch(const std::string& watch) const;

    Network& network() { return net_; }
    const Network& network() const { return net_; }
    WorkerSet& workers() { return workers_; }

    Address addressOf(const std::string& oapp) const;
    EndpointId chainOf(const std::string& oapp) const;
    Path pathBetween(const std::string& from, const std::string& to) const;
    WorkerId workerId(const std::string& name) const;

    PacketState packetState(const Path& path, std::uint64_t nonce) const;
    std::uint64_t deliveredCount(const Path& path) const;
    const Packet* sentPacket(const Path& path, std::uint64_t nonce) const;

    const std::vector<std::string>& trace() const { return result_.trace; }
    const RunResult& result() const { return result_; }

private:
    void setup();
    void onEvent(const Chain& chain, const LedgerEvent& ev);
    void log(const std::string& line) { result_.trace.push_back(line); }
    SecurityStack buildStack(const StackDecl& d) const;
    TxReceipt asOApp(const std::string& oapp, const std::function<void(TxContext&)>& body);
    TxReceipt submit(EndpointId eid, const Address& sender, const std::function<void(TxContext&)>& body);
    Path eventPath(const ScenarioEvent& ev) const;
    Hash32 chooseHash(const ScenarioEvent& ev, const Path& path, std::uint64_t nonce) const;
    Bytes chooseMessage(const ScenarioEvent& ev, const Path& path, std::uint64_t nonce) const;
    std::vector<const BridgeState*> bridges() const;

    Scenario scenario_;
    Network net_;
    WorkerSet workers_;
    std::mt19937_64 rng_;
    std::map<std::string, OAppDecl> oapps_;
    std::map<std::string, WorkerId> workerIds_;
    RunResult result_;
    TxReceipt lastReceipt_;
    std::set<std::string> failedWatches_;

    // Observed from ledger events.
    std::map<std::pair<Path, std::uint64_t>, Packet> sent_;
    std::map<Path, std::uint64_t> lastSentNonce_;
    std::map<std::pair<Path, std::uint64_t>, std::uint64_t> deliveries_;
    std::map<Path, std::uint64_t> deliveredPerPath_;
    std::map<std::pair<Path, std::uint64_t>, std::string> resolved_;   // skipped/cleared/burned
    std::map<ComposeKey, std::uint64_t> composeRuns_;
    std::map<ComposeKey, Bytes> composeMessages_;
    std::size_t nextEvent_ = 0;
    std::vector<std::string> gapViolations_;
};

/// Convenience: parse + run. Throws ScenarioError.
RunResult runScenario(std::string_view text, std::optional<std::uint64_t> seedOverride = {});

} // namespace omni
