#include "omni/endpoint.hpp"

#include "omni/chain.hpp"
#include "omni/msglib.hpp"

#include <algorithm>

namespace omni {

// --- stack slots -----------------------------------------------------------

const SecurityStack* Endpoint::StackSlot::at(std::uint64_t height) const
{
    if (pending && height >= pending->first) return &pending->second;
    return active ? &*active : nullptr;
}

void Endpoint::StackSlot::schedule(std::uint64_t effectiveHeight, const SecurityStack& s)
{
    // An earlier pending write that is already visible becomes the active one.
    if (pending && pending->first <= effectiveHeight - 1) active = pending->second;
    pending = std::make_pair(effectiveHeight, s);
}

const SecurityStack* Endpoint::StackSlot::latest() const
{
    if (pending) return &pending->second;
    return active ? &*active : nullptr;
}

// --- configuration -----------------------------------------------------------

void Endpoint::validateStack(TxContext& tx, const SecurityStack& s) const
{
    if (const std::string why = stackViolation(s); !why.empty()) fail(Errc::InvalidStack, why);
    if (s.isDefaultOptIn) return;
    const auto& send = tx.registry().require(s.sendLibrary);
    tx.registry().require(s.receiveLibrary);
    if (s.prevReceiveLibrary) tx.registry().require(*s.prevReceiveLibrary);
    if (send.ref.major > 0xff) fail(Errc::InvalidStack, "send library major does not fit a packet version");
}

void Endpoint::setDefaultStack(TxContext& tx, EndpointId remote, const SecurityStack& stack)
{
    if (tx.caller() != admin_) fail(Errc::NotAdmin);
    if (stack.isDefaultOptIn) fail(Errc::InvalidStack, "a default cannot opt into itself");
    validateStack(tx, stack);
    defaults_[remote].schedule(tx.height() + 1, stack);
    tx.emit(StackConfigured{admin_, remote, tx.height() + 1});
}

void Endpoint::setSecurityStack(TxContext& tx, const Address& owner, EndpointId remote,
                                const SecurityStack& stack)
{
    if (tx.caller() != owner) fail(Errc::NotOwner);
    validateStack(tx, stack);
    stacks_[{owner, remote}].schedule(tx.height() + 1, stack);
    tx.emit(StackConfigured{owner, remote, tx.height() + 1});
}

void Endpoint::setReceiveLibraryWithGrace(TxContext& tx, const Address& owner, EndpointId remote,
                                          const LibraryRef& lib, std::uint64_t graceBlocks)
{
    if (tx.caller() != owner) fail(Errc::NotOwner);
    tx.registry().require(lib);

    auto& slot = stacks_[{owner, remote}];
    const SecurityStack* base = slot.latest();
    if (base != nullptr && base->isDefaultOptIn) {
        const auto dit = defaults_.find(remote);
        base = dit == defaults_.end() ? nullptr : dit->second.latest();
    }
    if (base == nullptr) fail(Errc::NoReceiveStack);

    SecurityStack next = *base;
    next.isDefaultOptIn = false;
    next.prevReceiveLibrary = next.receiveLibrary;
    next.gracePeriodEnd = tx.height() + graceBlocks;
    next.receiveLibrary = lib;
    slot.schedule(tx.height() + 1, next);
    tx.emit(StackConfigured{owner, remote, tx.height() + 1});
}

const SecurityStack* Endpoint::resolveStack(const Address& oapp, EndpointId remote, std::uint64_t height) const
{
    const auto it = stacks_.find({oapp, remote});
    if (it == stacks_.end()) return nullptr;
    const SecurityStack* s = it->second.at(height);
    if (s == nullptr || !s->isDefaultOptIn) return s;
    const auto dit = defaults_.find(remote);
    return dit == defaults_.end() ? nullptr : dit->second.at(height);
}

// --- channel -----------------------------------------------------------------

PacketHeader Endpoint::send(TxContext& tx, EndpointId dstEid, const Address& receiver, const Bytes& payload,
                            const Bytes& options)
{
    const Address sender = tx.caller();
    const SecurityStack* stack = resolveStack(sender, dstEid, tx.height());
    if (stack == nullptr) fail(Errc::NoSendLibrary);
    if (payload.size() > tx.config().maxPayload)
        fail(Errc::PayloadTooLarge, std::to_string(payload.size()) + " bytes");
    if (!options.empty()) decodeOptions(options);

    const auto& lib = tx.registry().require(stack->sendLibrary);
    const Path path{eid_, sender, dstEid, receiver};
    auto& ch = channelFor(path);
    ch.outboundNonce += 1;
    Packet packet = makePacket(static_cast<std::uint8_t>(lib.ref.major), ch.outboundNonce, path, payload);
    sendSide(tx, lib, packet, options, *stack);
    return packet.header;
}

void Endpoint::commitVerification(TxContext& tx, const LibraryRef& lib, const PacketHeader& header,
                                  const Hash32& payloadHash)
{
    const Path& path = header.path;
    if (path.dstEid != eid_) fail(Errc::WrongEndpoint);
    if (header.nonce == 0) fail(Errc::InvalidNonce);

    const SecurityStack* stack = resolveStack(path.receiver, path.srcEid, tx.height());
    if (stack == nullptr) fail(Errc::NoReceiveStack);
    const bool current = stack->receiveLibrary == lib;
    const bool inGrace = stack->prevReceiveLibrary && *stack->prevReceiveLibrary == lib &&
                         stack->gracePeriodEnd && tx.height() <= *stack->gracePeriodEnd;
    if (!current && !inGrace) fail(Errc::NotReceiveLibrary, lib.str());
    if (header.version != lib.major) fail(Errc::VersionMismatch);

    auto& ch = channelFor(path);
    if (header.nonce <= ch.lazyInboundNonce) fail(Errc::StalePacket, std::to_string(header.nonce));
    ch.verified[header.nonce] = payloadHash;
    tx.emit(PayloadVerified{path, header.nonce, payloadHash, lib});
}

InboundWalk Endpoint::walkInbound(const Path& path, std::uint64_t budget) const
{
    const ChannelState* ch = channel(path);
    if (ch == nullptr) return {};
    InboundWalk w{ch->lazyInboundNonce, false};
    std::uint64_t steps = 0;
    for (;;) {
        const auto it = ch->verified.find(w.reached + 1);
        if (it == ch->verified.end() || it->second == kNilHash) return w;
        if (steps == budget) {
            w.exhausted = true;
            return w;
        }
        ++steps;
        ++w.reached;
    }
}

std::uint64_t Endpoint::getInboundNonce(const Path& path, std::uint64_t budget) const
{
    return walkInbound(path, budget).reached;
}

bool Endpoint::deliverable(const Path& path, std::uint64_t nonce) const
{
    const ChannelState* ch = channel(path);
    if (ch == nullptr) return false;
    const auto it = ch->verified.find(nonce);
    if (it == ch->verified.end() || it->second == kNilHash) return false;
    return nonce <= ch->lazyInboundNonce || nonce <= getInboundNonce(path);
}

void Endpoint::requireReceiver(TxContext& tx, const Path& path) const
{
    if (path.dstEid != eid_) fail(Errc::WrongEndpoint);
    if (tx.caller() != path.receiver) fail(Errc::NotReceiver);
}

void Endpoint::checkDeliverable(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& guid,
                                ByteView message)
{
    if (path.dstEid != eid_) fail(Errc::WrongEndpoint);
    if (nonce == 0) fail(Errc::InvalidNonce);
    auto& ch = channelFor(path);
    const auto it = ch.verified.find(nonce);
    if (nonce <= ch.lazyInboundNonce) {
        if (it == ch.verified.end()) fail(Errc::AlreadyDelivered, std::to_string(nonce));
    } else {
        if (it == ch.verified.end()) fail(Errc::Censorship, "nonce " + std::to_string(nonce) + " unverified");
        // Every nonce between the lazy inbound nonce and this one must be
        // verified; one budget unit per step.
        for (std::uint64_t n = ch.lazyInboundNonce + 1; n <= nonce; ++n) {
            tx.chargeIteration();
            const auto gap = ch.verified.find(n);
            if (n != nonce && (gap == ch.verified.end() || gap->second == kNilHash))
                fail(Errc::Censorship, "nonce " + std::to_string(n) + " unverified");
        }
    }
    if (it->second == kNilHash) fail(Errc::Nilified, std::to_string(nonce));
    if (it->second != payloadHash(guid, message)) fail(Errc::HashMismatch);
}

void Endpoint::consume(ChannelState& ch, std::uint64_t nonce)
{
    ch.verified.erase(nonce);
    ch.lazyInboundNonce = std::max(ch.lazyInboundNonce, nonce);
}

void Endpoint::lzReceive(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& guid,
                         ByteView message, ByteView extraData)
{
    checkDeliverable(tx, path, nonce, guid, message);
    consume(channelFor(path), nonce);
    tx.emit(PacketDelivered{path, nonce, guid});
    tx.invokeReceive(path.receiver, Origin{path.srcEid, path.sender, nonce}, guid, message, extraData);
}

void Endpoint::skip(TxContext& tx, const Path& path, std::uint64_t nonce)
{
    requireReceiver(tx, path);
    auto& ch = channelFor(path);
    if (quirks_.skipWithoutNonceCheck) {
        if (nonce <= ch.lazyInboundNonce) fail(Errc::WrongNonce);
    } else {
        std::uint64_t inbound = ch.lazyInboundNonce;
        for (;;) {
            const auto it = ch.verified.find(inbound + 1);
            if (it == ch.verified.end() || it->second == kNilHash) break;
            tx.chargeIteration();
            ++inbound;
        }
        if (nonce != inbound + 1)
            fail(Errc::WrongNonce, "expected " + std::to_string(inbound + 1) + ", got " + std::to_string(nonce));
    }
    ch.verified.erase(nonce);
    ch.lazyInboundNonce = nonce;
    tx.emit(PacketSkipped{path, nonce});
}

void Endpoint::clear(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& guid, ByteView message)
{
    requireReceiver(tx, path);
    checkDeliverable(tx, path, nonce, guid, message);
    consume(channelFor(path), nonce);
    tx.emit(PacketCleared{path, nonce, guid});
}

void Endpoint::nilify(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& expectedHash)
{
    requireReceiver(tx, path);
    auto& ch = channelFor(path);
    if (nonce <= ch.lazyInboundNonce) fail(Errc::StalePacket, std::to_string(nonce));
    const auto it = ch.verified.find(nonce);
    if (it == ch.verified.end() || it->second == kNilHash) fail(Errc::NoEntry, std::to_string(nonce));
    if (it->second != expectedHash) fail(Errc::HashMismatch);
    it->second = kNilHash;
    tx.emit(PacketNilified{path, nonce});
}

void Endpoint::burn(TxContext& tx, const Path& path, std::uint64_t nonce, const Hash32& expectedHash)
{
    requireReceiver(tx, path);
    auto& ch = channelFor(path);
    if (nonce > ch.lazyInboundNonce) fail(Errc::NonceAhead, std::to_string(nonce));
    const auto it = ch.verified.find(nonce);
    if (it == ch.verified.end()) fail(Errc::NoEntry, std::to_string(nonce));
    if (it->second != expectedHash) fail(Errc::HashMismatch);
    ch.verified.erase(it);
    tx.emit(PacketBurned{path, nonce});
}

// --- compose -----------------------------------------------------------------

void Endpoint::sendCompose(TxContext& tx, const Address& to, const Hash32& guid, std::uint16_t index,
                           ByteView message)
{
    if (!tx.inCallback()) fail(Errc::NotInCallback);
    const ComposeKey key{tx.caller(), to, guid, index};
    if (composeQueue_.count(key) != 0) fail(Errc::DuplicateCompose);
    composeQueue_.emplace(key, ComposeEntry{payloadHash(guid, message), ComposeStatus::Stored});
    tx.emit(ComposeSent{key, Bytes(message.begin(), message.end())});
}

void Endpoint::lzCompose(TxContext& tx, const Address& from, const Address& to, const Hash32& guid,
                         std::uint16_t index, ByteView message, ByteView extraData)
{
    const ComposeKey key{from, to, guid, index};
    const auto it = composeQueue_.find(key);
    if (it == composeQueue_.end()) fail(Errc::NoSuchCompose);
    if (it->second.status == ComposeStatus::Executed) fail(Errc::AlreadyExecuted);
    if (it->second.hash != payloadHash(guid, message)) fail(Errc::HashMismatch);
    it->second.status = ComposeStatus::Executed;
    tx.emit(ComposeDelivered{key});
    tx.invokeCompose(to, from, guid, index, message, extraData);
}

// --- views -------------------------------------------------------------------

const ChannelState* Endpoint::channel(const Path& path) const
{
    const auto it = channels_.find(path);
    return it == channels_.end() ? nullptr : &it->second;
}

const ComposeEntry* Endpoint::compose(const ComposeKey& key) const
{
    const auto it = composeQueue_.find(key);
    return it == composeQueue_.end() ? nullptr : &it->second;
}

} // namespace omni
