#pragma once

#include "omni/endpoint.hpp"
#include "omni/events.hpp"
#include "omni/msglib.hpp"
#include "omni/oapp.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace omni {

struct ChainConfig {
    EndpointId eid;
    std::uint64_t iterationBudget = 1000;
    std::size_t maxPayload = 64 * 1024;
    std::uint64_t blockTimeTicks = 1;
};

struct LedgerEvent {
    std::uint64_t height = 0;
    std::uint64_t seq = 0;
    Event event;
};

/// Everything a transaction may mutate. Copyable by value, so snapshots,
/// rollbacks and forks are plain copies.
struct ChainState {
    Endpoint endpoint;
    LibraryRegistry registry;
    std::map<LibraryRef, AttestationStore> attestations;
    std::map<Address, uint128> balances;
    std::map<Address, AppHandle> apps;
    FeeSchedule fees;
};

enum class TxStatus { Applied, Reverted, OutOfBudget };

struct TxReceipt {
    TxStatus status = TxStatus::Applied;
    std::optional<Errc> reason;
    std::string detail;
    std::uint64_t budgetUsed = 0;

    bool applied() const { return status == TxStatus::Applied; }
    /// "Applied", "Reverted(<reason>)" or "OutOfBudget".
    std::string str() const;
};

class Chain;

/// Execution context of one transaction on one chain.
class TxContext {
public:
    TxContext(Chain& chain, const Address& sender);

    /// Current principal: the transaction sender, or the app whose callback
    /// is executing.
    const Address& caller() const { return callers_.back(); }
    const Address& sender() const { return callers_.front(); }
    bool inCallback() const { return callers_.size() > 1; }

    std::uint64_t height() const;
    EndpointId eid() const;
    const ChainConfig& config() const;
    ChainState& state();
    const ChainState& state() const;
    Endpoint& endpoint() { return state().endpoint; }
    LibraryRegistry& registry() { return state().registry; }
    AttestationStore& attestations(const LibraryRef& lib) { return state().attestations[lib]; }

    /// One unit of the per-transaction iteration budget. Throws OutOfBudget.
    void chargeIteration();
    std::uint64_t budgetUsed() const { return used_; }

    void emit(Event e);

    uint128 balance(const Address& a) const;
    void credit(const Address& a, uint128 amount);
    /// Throws InsufficientBalance.
    void debit(const Address& a, uint128 amount);

    void deploy(const Address& at, std::unique_ptr<OApp> app);
    /// Throws UnknownApp.
    OApp& app(const Address& at);

    /// Runs `fn` with `app` as the current principal.
    template <typename Fn>
    decltype(auto) actAs(const Address& app, Fn&& fn)
    {
        callers_.push_back(app);
        struct Pop {
            std::vector<Address>& v;
            ~Pop() { v.pop_back(); }
        } pop{callers_};
        return std::forward<Fn>(fn)();
    }

    void invokeReceive(const Address& receiver, const Origin& origin, const Hash32& guid, ByteView message,
                       ByteView extraData);
    void invokeCompose(const Address& to, const Address& from, const Hash32& guid, std::uint16_t index,
                       ByteView message, ByteView extraData);

private:
    Chain& chain_;
    std::vector<Address> callers_;
    std::uint64_t used_ = 0;
};

using EventSink = std::function<void(const Chain&, const LedgerEvent&)>;

/// Deterministic simulated blockchain: explicit block-height clock,
/// atomic transactions, append-only event log.
class Chain {
public:
    Chain(ChainConfig config, Address admin);

    Chain(const Chain& o);
    Chain& operator=(const Chain& o);
    Chain(Chain&&) noexcept = default;
    Chain& operator=(Chain&&) noexcept = default;

    /// Executes `body` at the current height. On ProtocolError every state
    /// mutation and event of the transaction is discarded.
    TxReceipt submit(const Address& sender, const std::function<void(TxContext&)>& body);

    /// Throws InvalidArgument when blocks == 0.
    std::uint64_t advance(std::uint64_t blocks);
    std::uint64_t height() const { return height_; }

    /// Events with fromHeight <= height <= toHeight. Throws RangeAhead when
    /// toHeight is past the head, InvalidArgument when from > to.
    std::vector<LedgerEvent> readEvents(std::uint64_t fromHeight, std::uint64_t toHeight) const;
    const std::vector<LedgerEvent>& events() const { return events_; }

    /// Detached deep copy; transactions on it never affect this chain.
    Chain fork() const;

    const ChainConfig& config() const { return config_; }
    EndpointId eid() const { return config_.eid; }
    const ChainState& state() const { return state_; }
    const Address& admin() const { return admin_; }

    void setEventSink(EventSink sink) { sink_ = std::move(sink); }

    /// Canonical text dump of the full state, used for atomicity checks.
    std::string stateDump() const;

private:
    friend class TxContext;

    ChainConfig config_;
    Address admin_;
    std::uint64_t height_ = 0;
    std::uint64_t nextSeq_ = 0;
    std::vector<LedgerEvent> events_;
    ChainState state_;
    EventSink sink_;
};

/// All chains of one simulation, keyed by endpoint id.
class Network {
public:
    Chain& addChain(ChainConfig config, Address admin);
    /// Throws UnknownChain.
    Chain& chain(EndpointId eid);
    const Chain& chain(EndpointId eid) const;
    bool has(EndpointId eid) const { return chains_.count(eid) != 0; }

    std::map<EndpointId, Chain>& chains() { return chains_; }
    const std::map<EndpointId, Chain>& chains() const { return chains_; }

    TxReceipt submitTx(EndpointId eid, const Address& sender, const std::function<void(TxContext&)>& body);

    Network fork() const;

private:
    std::map<EndpointId, Chain> chains_;
};

} // namespace omni
