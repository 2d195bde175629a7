#pragma once

#include "omni/chain.hpp"
#include "omni/oapp.hpp"

#include <map>
#include <optional>
#include <vector>

namespace omni {

// Bridge payload: op(1) | amount(16) | composeFlag(1).
inline constexpr std::size_t kBridgePayloadSize = 18;
inline constexpr std::uint8_t kBridgeOpMint = 0x01;

struct BridgeMessage {
    uint128 amount = 0;
    bool compose = false;
};

Bytes encodeBridgeMessage(const BridgeMessage& m);
/// Throws MalformedPayload.
BridgeMessage decodeBridgeMessage(ByteView payload);

struct BridgeState {
    uint128 locked = 0;
    uint128 minted = 0;
    /// Tokens the bridge's users can still lock.
    uint128 available = 0;
    std::map<EndpointId, Address> peers;
    std::optional<Address> composeTarget;
};

/// Lock-on-source / mint-on-destination token bridge.
class BridgeApp final : public OApp {
public:
    explicit BridgeApp(BridgeState s = {}) : s_(std::move(s)) {}

    std::unique_ptr<OApp> clone() const override { return std::make_unique<BridgeApp>(*this); }
    std::string_view kind() const override { return "bridge"; }
    std::string describe() const override;
    std::optional<uint128> field(std::string_view name) const override;

    /// Locks `amount` and sends a mint instruction to the peer on `dstEid`.
    /// Must run with this app as the current principal. Throws
    /// InsufficientFunds, plus any endpoint send error.
    PacketHeader bridgeSend(TxContext& tx, EndpointId dstEid, uint128 amount, bool compose, const Bytes& options);

    void lzReceive(TxContext& tx, const Origin& origin, const Hash32& guid, ByteView message,
                   ByteView extraData) override;

    const BridgeState& state() const { return s_; }
    BridgeState& state() { return s_; }

private:
    BridgeState s_;
};

struct SwapState {
    uint128 reserveIn = 0;
    uint128 reserveOut = 0;
    /// Counter-asset paid per input token is ratioNum / ratioDen.
    uint128 ratioNum = 1;
    uint128 ratioDen = 1;
    uint128 swappedIn = 0;
    uint128 swappedOut = 0;
};

/// Fixed-ratio swap reachable only through lzCompose.
class SwapApp final : public OApp {
public:
    explicit SwapApp(SwapState s = {}) : s_(s) {}

    std::unique_ptr<OApp> clone() const override { return std::make_unique<SwapApp>(*this); }
    std::string_view kind() const override { return "swap"; }
    std::string describe() const override;
    std::optional<uint128> field(std::string_view name) const override;

    /// Direct deliveries are rejected; the app is driven by composes.
    void lzReceive(TxContext& tx, const Origin& origin, const Hash32& guid, ByteView message,
                   ByteView extraData) override;
    /// Throws InsufficientReserves, MalformedPayload.
    void lzCompose(TxContext& tx, const Address& from, const Hash32& guid, std::uint16_t index, ByteView message,
                   ByteView extraData) override;

    void topUp(uint128 amount) { s_.reserveOut += amount; }
    const SwapState& state() const { return s_; }

private:
    SwapState s_;
};

/// Records every delivery; used by channel tests and the fuzzer.
class RecorderApp final : public OApp {
public:
    struct Delivery {
        EndpointId srcEid;
        std::uint64_t nonce = 0;
        Bytes message;
        friend bool operator==(const Delivery&, const Delivery&) = default;
    };

    RecorderApp() = default;
    /// Messages starting with `abortPrefix` make the callback abort.
    explicit RecorderApp(Bytes abortPrefix) : abortPrefix_(std::move(abortPrefix)) {}

    std::unique_ptr<OApp> clone() const override { return std::make_unique<RecorderApp>(*this); }
    std::string_view kind() const override { return "recorder"; }
    std::string describe() const override;
    std::optional<uint128> field(std::string_view name) const override;

    void lzReceive(TxContext& tx, const Origin& origin, const Hash32& guid, ByteView message,
                   ByteView extraData) override;
    void lzCompose(TxContext& tx, const Address& from, const Hash32& guid, std::uint16_t index, ByteView message,
                   ByteView extraData) override;

    const std::vector<Delivery>& deliveries() const { return deliveries_; }
    std::size_t composes() const { return composes_; }

private:
    Bytes abortPrefix_;
    std::vector<Delivery> deliveries_;
    std::size_t composes_ = 0;
};

struct BridgeTotals {
    uint128 minted = 0;
    uint128 locked = 0;
};

BridgeTotals bridgeTotals(const std::vector<const BridgeState*>& peers);

/// Sum of minted never exceeds sum of locked across the peer set.
bool bridgeInvariant(const std::vector<const BridgeState*>& peers);

} // namespace omni
