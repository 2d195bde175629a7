#include "omni/oapps.hpp"

#include "omni/error.hpp"

#include <algorithm>

namespace omni {

Bytes encodeBridgeMessage(const BridgeMessage& m)
{
    Bytes out;
    out.reserve(kBridgePayloadSize);
    putU8(out, kBridgeOpMint);
    putU128(out, m.amount);
    putU8(out, m.compose ? 1 : 0);
    return out;
}

BridgeMessage decodeBridgeMessage(ByteView payload)
{
    if (payload.size() != kBridgePayloadSize)
        fail(Errc::MalformedPayload, "bridge payload must be 18 bytes, got " + std::to_string(payload.size()));
    if (payload[0] != kBridgeOpMint) fail(Errc::MalformedPayload, "unknown bridge op");
    if (payload[17] > 1) fail(Errc::MalformedPayload, "bad compose flag");
    return BridgeMessage{getU128(payload.subspan(1)), payload[17] == 1};
}

// --- bridge ---------------------------------------------------------------------

std::string BridgeApp::describe() const
{
    std::string out = "bridge locked=" + toString(s_.locked) + " minted=" + toString(s_.minted) +
                      " available=" + toString(s_.available);
    for (const auto& [eid, addr] : s_.peers) out += " peer" + std::to_string(eid.value) + "=" + addr.hex();
    if (s_.composeTarget) out += " compose=" + s_.composeTarget->hex();
    return out;
}

std::optional<uint128> BridgeApp::field(std::string_view name) const
{
    if (name == "locked") return s_.locked;
    if (name == "minted") return s_.minted;
    if (name == "available") return s_.available;
    return std::nullopt;
}

PacketHeader BridgeApp::bridgeSend(TxContext& tx, EndpointId dstEid, uint128 amount, bool compose,
                                   const Bytes& options)
{
    const auto peer = s_.peers.find(dstEid);
    if (peer == s_.peers.end()) fail(Errc::InvalidArgument, "no bridge peer on " + std::to_string(dstEid.value));
    if (s_.available < amount) fail(Errc::InsufficientFunds);
    s_.available -= amount;
    s_.locked += amount;
    tx.emit(AppEvent{tx.caller(), "Locked", "amount=" + toString(amount)});
    return tx.endpoint().send(tx, dstEid, peer->second, encodeBridgeMessage({amount, compose}), options);
}

void BridgeApp::lzReceive(TxContext& tx, const Origin& origin, const Hash32& guid, ByteView message, ByteView)
{
    const auto peer = s_.peers.find(origin.srcEid);
    if (peer == s_.peers.end() || peer->second != origin.sender)
        fail(Errc::CallbackAbort, "sender is not a registered bridge peer");
    const BridgeMessage m = decodeBridgeMessage(message);
    s_.minted += m.amount;
    tx.emit(AppEvent{tx.caller(), "Minted", "amount=" + toString(m.amount)});
    if (m.compose) {
        if (!s_.composeTarget) fail(Errc::MalformedPayload, "compose requested but no compose target");
        Bytes composeMsg;
        putU128(composeMsg, m.amount);
        tx.endpoint().sendCompose(tx, *s_.composeTarget, guid, 0, composeMsg);
    }
}

// --- swap -----------------------------------------------------------------------

std::string SwapApp::describe() const
{
    return "swap reserveIn=" + toString(s_.reserveIn) + " reserveOut=" + toString(s_.reserveOut) +
           " ratio=" + toString(s_.ratioNum) + ":" + toString(s_.ratioDen) + " in=" + toString(s_.swappedIn) +
           " out=" + toString(s_.swappedOut);
}

std::optional<uint128> SwapApp::field(std::string_view name) const
{
    if (name == "reserve-in") return s_.reserveIn;
    if (name == "reserve-out") return s_.reserveOut;
    if (name == "swapped-in") return s_.swappedIn;
    if (name == "swapped-out") return s_.swappedOut;
    return std::nullopt;
}

void SwapApp::lzReceive(TxContext&, const Origin&, const Hash32&, ByteView, ByteView)
{
    fail(Errc::CallbackAbort, "swap accepts composed calls only");
}

void SwapApp::lzCompose(TxContext& tx, const Address&, const Hash32&, std::uint16_t, ByteView message, ByteView)
{
    if (message.size() != 16) fail(Errc::MalformedPayload, "swap message must be a 16-byte amount");
    if (s_.ratioDen == 0) fail(Errc::InvalidArgument, "zero ratio denominator");
    const uint128 amountIn = getU128(message);
    const uint128 amountOut = amountIn * s_.ratioNum / s_.ratioDen;
    if (s_.reserveOut < amountOut)
        fail(Errc::InsufficientReserves, "need " + toString(amountOut) + ", have " + toString(s_.reserveOut));
    s_.reserveOut -= amountOut;
    s_.reserveIn += amountIn;
    s_.swappedIn += amountIn;
    s_.swappedOut += amountOut;
    tx.emit(AppEvent{tx.caller(), "Swapped", "in=" + toString(amountIn) + " out=" + toString(amountOut)});
}

// --- recorder -------------------------------------------------------------------

std::string RecorderApp::describe() const
{
    std::string out = "recorder";
    for (const auto& d : deliveries_)
        out += " " + std::to_string(d.srcEid.value) + "#" + std::to_string(d.nonce) + "=" + toHex(d.message);
    out += " composes=" + std::to_string(composes_);
    return out;
}

std::optional<uint128> RecorderApp::field(std::string_view name) const
{
    if (name == "deliveries") return deliveries_.size();
    if (name == "composes") return composes_;
    return std::nullopt;
}

void RecorderApp::lzReceive(TxContext&, const Origin& origin, const Hash32&, ByteView message, ByteView)
{
    if (!abortPrefix_.empty() && message.size() >= abortPrefix_.size() &&
        std::equal(abortPrefix_.begin(), abortPrefix_.end(), message.begin()))
        fail(Errc::CallbackAbort, "recorder rejected message");
    deliveries_.push_back({origin.srcEid, origin.nonce, Bytes(message.begin(), message.end())});
}

void RecorderApp::lzCompose(TxContext&, const Address&, const Hash32&, std::uint16_t, ByteView, ByteView)
{
    ++composes_;
}

// --- invariant ------------------------------------------------------------------

BridgeTotals bridgeTotals(const std::vector<const BridgeState*>& peers)
{
    BridgeTotals t;
    for (const auto* p : peers) {
        t.minted += p->minted;
        t.locked += p->locked;
    }
    return t;
}

bool bridgeInvariant(const std::vector<const BridgeState*>& peers)
{
    const BridgeTotals t = bridgeTotals(peers);
    return t.minted <= t.locked;
}

} // namespace omni
