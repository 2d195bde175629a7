#pragma once

#include "omni/chain.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace omni {

enum class BehaviorKind { Honest, Silent, Equivocate, Crashed };

struct Behavior {
    BehaviorKind kind = BehaviorKind::Honest;
    /// Silent window, inclusive; outside it a Silent worker acts honestly.
    std::uint64_t from = 0;
    std::uint64_t to = std::numeric_limits<std::uint64_t>::max();

    /// Kind in force at `tick`.
    BehaviorKind at(std::uint64_t tick) const;

    /// honest | silent | silent:<from>-<to> | equivocate | crashed.
    /// Throws std::invalid_argument.
    static Behavior parse(std::string_view text);
    std::string str() const;

    friend bool operator==(const Behavior&, const Behavior&) = default;
};

/// Worker trace sink; receives `tick WORKER=<name> <ACTION> ...` lines.
using WorkerLog = std::function<void(const std::string&)>;

struct DvnSpec {
    WorkerId id = 0;
    std::string name;
    /// Source chains this DVN reads; empty means all.
    std::set<EndpointId> watchedChains;
    std::uint64_t latencyTicks = 1;
    Behavior behavior;
};

struct ExecutorSpec {
    WorkerId id = 0;
    std::string name;
    Behavior behavior;
    /// A user actor: delivers any committed packet, not only its assigned
    /// ones, and ignores Pre-Crime verdicts and message options.
    bool permissionless = false;
};

struct FaultEntry {
    std::uint64_t tick = 0;
    std::string worker;
    Behavior behavior;
};

using FaultSchedule = std::vector<FaultEntry>;

/// Wrong hash published by an equivocating DVN: the honest hash with its
/// final byte flipped.
Hash32 equivocate(const Hash32& honest);

/// Receive library a worker should use for `packet`: the receiver's
/// current or previous receive library whose major matches the packet
/// version, else the newest registered library with that major.
std::optional<LibraryRef> selectReceiveLibrary(const Chain& dst, const PacketHeader& header);

/// Reads events of fully sealed blocks (height < head) not yet seen.
class EventCursor {
public:
    std::vector<LedgerEvent> poll(const Chain& chain);
    /// Skips everything sealed so far without returning it.
    void skipTo(const Chain& chain);

private:
    std::map<EndpointId, std::uint64_t> next_;
};

class DvnWorker {
public:
    explicit DvnWorker(DvnSpec spec) : spec_(std::move(spec)) {}

    const DvnSpec& spec() const { return spec_; }
    void setBehavior(const Behavior& b) { spec_.behavior = b; }

    /// Observes new PacketSent events naming this DVN and attests each one
    /// `latencyTicks` after it was observed. Packets not naming it are
    /// picked up once the receiver's current stack lists it.
    /// Returns attestations submitted.
    std::size_t step(Network& net, std::uint64_t tick, const WorkerLog& log);

private:
    struct Pending {
        Packet packet;
        std::uint64_t due = 0;
    };

    DvnSpec spec_;
    EventCursor cursor_;
    std::vector<Pending> pending_;
    /// Observed packets whose job did not name this DVN.
    std::vector<Packet> unassigned_;
};

struct PreCrimeVerdict {
    bool halt = false;
    std::vector<std::pair<EndpointId, Address>> violators;
    /// Source chain of the halted packet.
    EndpointId suspect{};
};

/// Verdicts published by Pre-Crime workers and consulted by configured
/// executors before committing or delivering a guarded packet.
class PreCrimeBoard {
public:
    void publish(const Path& path, std::uint64_t nonce, PreCrimeVerdict v) { verdicts_[{path, nonce}] = std::move(v); }
    const PreCrimeVerdict* find(const Path& path, std::uint64_t nonce) const;

private:
    std::map<std::pair<Path, std::uint64_t>, PreCrimeVerdict> verdicts_;
};

class ExecutorWorker {
public:
    explicit ExecutorWorker(ExecutorSpec spec) : spec_(std::move(spec)) {}

    const ExecutorSpec& spec() const { return spec_; }
    void setBehavior(const Behavior& b) { spec_.behavior = b; }
    Address address() const { return workerAddress(spec_.id); }

    /// Commits committable packets, delivers deliverable ones in nonce
    /// order per path, and executes stored composes. Returns transactions
    /// submitted.
    std::size_t step(Network& net, std::uint64_t tick, const PreCrimeBoard& board, const WorkerLog& log);

private:
    struct Tracked {
        Packet packet;
        Bytes options;
        std::optional<MessageOptions> parsed;
        bool guarded = false;   // options name a Pre-Crime worker
    };
    struct PendingCompose {
        EndpointId chain;
        ComposeKey key;
        Bytes message;
    };

    void ingest(const Network& net);
    std::size_t drivePath(Network& net, std::uint64_t tick, const Path& path, std::map<std::uint64_t, Tracked>& packets,
                          const PreCrimeBoard& board, const WorkerLog& log);

    ExecutorSpec spec_;
    EventCursor cursor_;
    std::map<Path, std::map<std::uint64_t, Tracked>> tracked_;
    std::vector<PendingCompose> composes_;
    std::set<std::pair<Path, std::uint64_t>> reportedHalts_;
};

using PeerRef = std::pair<EndpointId, Address>;

/// Invariant evaluated by one peer against forked states of every peer.
using PeerInvariant =
    std::function<bool(const Network& fork, const PeerRef& self, const std::vector<PeerRef>& peers)>;

/// Bridge conservation: sum of minted <= sum of locked over all peers.
PeerInvariant bridgePeerInvariant();

struct PreCrimeSpec {
    WorkerId id = 0;
    std::string name;
    /// Worker id this Pre-Crime answers to in Type 3 message options.
    std::uint8_t optionWorkerId = 0;
    std::vector<PeerRef> peers;
};

class PreCrimeWorker {
public:
    PreCrimeWorker(PreCrimeSpec spec, PeerInvariant invariant)
        : spec_(std::move(spec)), invariant_(std::move(invariant))
    {
    }

    const PreCrimeSpec& spec() const { return spec_; }

    /// Simulates the delivery of each guarded, committable packet on a fork
    /// of every chain and publishes allow/halt. Returns verdicts published.
    std::size_t step(Network& net, std::uint64_t tick, PreCrimeBoard& board, const WorkerLog& log);

    /// Single simulation, exposed for tests. nullopt when the delivery
    /// cannot be simulated yet.
    std::optional<PreCrimeVerdict> simulate(const Network& net, const Packet& packet) const;

private:
    PreCrimeSpec spec_;
    PeerInvariant invariant_;
    EventCursor cursor_;
    std::map<std::pair<Path, std::uint64_t>, Packet> tracked_;
};

/// Type 3 op code asking a Pre-Crime worker to simulate the delivery.
inline constexpr std::uint8_t kPreCrimeOpType = 0x01;

/// True when Type 3 options carry a Pre-Crime entry for `workerId`.
bool optionsName(const Bytes& options, std::uint8_t workerId);

/// All offchain actors of one run, stepped in registration order.
class WorkerSet {
public:
    void addDvn(DvnSpec spec);
    void addExecutor(ExecutorSpec spec);
    void addPreCrime(PreCrimeSpec spec, PeerInvariant invariant);

    bool has(std::string_view name) const;
    /// Throws std::invalid_argument for unknown names or workers whose
    /// behavior cannot change (Pre-Crime).
    void setBehavior(std::string_view name, const Behavior& b);

    /// Applies every entry scheduled exactly at `tick`.
    void applyFaults(const FaultSchedule& schedule, std::uint64_t tick, const WorkerLog& log);
    void step(Network& net, std::uint64_t tick, const WorkerLog& log);

    const PreCrimeBoard& board() const { return board_; }

private:
    std::vector<std::variant<DvnWorker, ExecutorWorker, PreCrimeWorker>> workers_;
    PreCrimeBoard board_;
};

/// Throws std::invalid_argument when ticks decrease or a worker is unknown.
void validateFaultSchedule(const FaultSchedule& schedule, const WorkerSet& workers);

} // namespace omni
