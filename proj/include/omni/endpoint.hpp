#pragma once

#include "omni/codec.hpp"
#include "omni/error.hpp"
#include "omni/events.hpp"
#include "omni/stack.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>

namespace omni {

class TxContext;

/// Lossless channel state for one path. The source endpoint uses
/// `outboundNonce`; the destination endpoint uses the rest.
struct ChannelState {
    std::uint64_t outboundNonce = 0;
    /// Highest delivered or skipped nonce. Never decreases.
    std::uint64_t lazyInboundNonce = 0;
    /// nonce -> payload hash, or kNilHash for a nilified slot.
    std::map<std::uint64_t, Hash32> verified;

    friend bool operator==(const ChannelState&, const ChannelState&) = default;
};

enum class ComposeStatus { Stored, Executed };

struct ComposeEntry {
    Hash32 hash{};
    ComposeStatus status = ComposeStatus::Stored;

    friend bool operator==(const ComposeEntry&, const ComposeEntry&) = default;
};

struct DeliveryReceipt {
    enum class Outcome { Delivered, Reverted };

    Hash32 guid{};
    std::uint64_t nonce = 0;
    Outcome outcome = Outcome::Delivered;
    std::optional<Errc> reason;
};

/// Result of the deliverability walk from the lazy inbound nonce.
struct InboundWalk {
    std::uint64_t reached = 0;
    bool exhausted = false;   // stopped by the iteration budget, not by a gap
};

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

/// Test-only mutations used to show the fuzzer catches broken channels.
struct EndpointQuirks {
    bool skipWithoutNonceCheck = false;

    friend bool operator==(const EndpointQuirks&, const EndpointQuirks&) = default;
};

/// Immutable per-chain endpoint: channel state machine, Security Stack
/// registry and compose queue. Mutated only through transactions.
class Endpoint {
public:
    Endpoint() = default;
    Endpoint(EndpointId eid, Address admin) : eid_(eid), admin_(admin) {}

    EndpointId eid() const { return eid_; }

    // --- configuration -------------------------------------------------

    /// Admin-managed default stack used by OApps that opted in.
    void setDefaultStack(TxContext& tx, EndpointId remote, const SecurityStack& stack);

    /// Replaces the owner's stack for `remote` at the next block boundary.
    /// Throws NotOwner, InvalidStack, UnknownLibrary.
    void setSecurityStack(TxContext& tx, const Address& owner, EndpointId remote, const SecurityStack& stack);

    /// Moves the owner to `lib`, keeping the old receive library authorized
    /// until currentHeight + graceBlocks. Throws NotOwner, UnknownLibrary,
    /// NoReceiveStack.
    void setReceiveLibraryWithGrace(TxContext& tx, const Address& owner, EndpointId remote, const LibraryRef& lib,
                                    std::uint64_t graceBlocks);

    /// Stack in force at `height`, following default opt-in. nullptr if none.
    const SecurityStack* resolveStack(const Address& oapp, EndpointId remote, std::uint64_t height) const;

    // --- channel -------------------------------------------------------

    /// Caller is the sender. Throws NoSendLibrary, PayloadTooLarge, option
    /// decode errors, InsufficientBalance.
    PacketHeader send(TxContext& tx, EndpointId dstEid, const Address& receiver, const Bytes& payload,
                      const Bytes& options);

    /// Called by a MessageLib. Throws NoReceiveStack, NotReceiveLibrary,
    /// VersionMismatch, StalePacket.
    void commitVerification(TxContext& tx, const LibraryRef& lib, const PacketHeader& header,
                            const Hash32& payloadHash);

    /// Largest nonce n such that every nonce in (lazy, n] holds a non-NIL
    /// verified hash, walking at most `budget` steps.
    std::uint64_t getInboundNonce(const Path& path, std::uint64_t budget = kUnbounded) const;
    InboundWalk walkInbound(const Path& path, std::uint64_t budget) const;

    /// True when lzReceive(path, nonce) with the matching message would
    /// pass the channel checks (ignores the budget).
    bool deliverable(const Path& path, std::uint64_t nonce) const;

    void lzReceive(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& guid, ByteView message,
                   ByteView extraData);
    void skip(TxContext& tx, const Path& path, std::uint64_t nonce);
    void clear(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& guid, ByteView message);
    void nilify(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& expectedHash);
    void burn(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& expectedHash);

    // --- compose -------------------------------------------------------

    /// Only callable from inside a delivery or compose callback; `from` is
    /// the executing app.
    void sendCompose(TxContext& tx, const Address& to, const Hash32& guid, std::uint16_t index, ByteView message);
    void lzCompose(TxContext& tx, const Address& from, const Address& to, const Hash32& guid, std::uint16_t index,
                   ByteView message, ByteView extraData);

    // --- views ---------------------------------------------------------

    const ChannelState* channel(const Path& path) const;
    const std::map<Path, ChannelState>& channels() const { return channels_; }
    const ComposeEntry* compose(const ComposeKey& key) const;
    const std::map<ComposeKey, ComposeEntry>& composeQueue() const { return composeQueue_; }

    EndpointQuirks& quirks() { return quirks_; }

    friend bool operator==(const Endpoint&, const Endpoint&) = default;

private:
    /// A stack slot whose replacement becomes visible at a later height.
    struct StackSlot {
        std::optional<SecurityStack> active;
        std::optional<std::pair<std::uint64_t, SecurityStack>> pending;

        const SecurityStack* at(std::uint64_t height) const;
        void schedule(std::uint64_t effectiveHeight, const SecurityStack& s);
        /// Most recently written stack, pending or not.
        const SecurityStack* latest() const;

        friend bool operator==(const StackSlot&, const StackSlot&) = default;
    };

    void validateStack(TxContext& tx, const SecurityStack& s) const;
    void requireReceiver(TxContext& tx, const Path& path) const;
    ChannelState& channelFor(const Path& path) { return channels_[path]; }
    /// Shared gate of lzReceive and clear; charges the walk to the tx budget.
    void checkDeliverable(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& guid,
                          ByteView message);
    void consume(ChannelState& ch, std::uint64_t nonce);

    EndpointId eid_;
    Address admin_;
    std::map<Path, ChannelState> channels_;
    std::map<std::pair<Address, EndpointId>, StackSlot> stacks_;
    std::map<EndpointId, StackSlot> defaults_;
    std::map<ComposeKey, ComposeEntry> composeQueue_;
    EndpointQuirks quirks_;
};

} // namespace omni
