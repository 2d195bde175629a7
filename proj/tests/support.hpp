#pragma once

#include "omni/chain.hpp"
#include "omni/oapps.hpp"
#include "omni/workers.hpp"

#include <gtest/gtest.h>

#include <optional>

namespace omni::test {

inline const Address kAdmin = Address::fromU64(0xad);
inline const Address kUser = Address::fromU64(0x05e7);
inline const Address kSender = Address::fromU64(0x1001);
inline const Address kReceiver = Address::fromU64(0x1002);
inline constexpr EndpointId kSrc{1};
inline constexpr EndpointId kDst{2};
inline constexpr LibraryRef kUln{1, 1, 0};

inline SecurityStack ulnStack(std::set<WorkerId> required = {1}, std::set<WorkerId> optional = {},
                              std::uint8_t threshold = 0, WorkerId executor = 100)
{
    SecurityStack s;
    s.sendLibrary = kUln;
    s.receiveLibrary = kUln;
    s.requiredDvns = std::move(required);
    s.optionalDvns = std::move(optional);
    s.optionalThreshold = threshold;
    s.executor = executor;
    return s;
}

inline std::optional<Errc> reason(const TxReceipt& r) { return r.reason; }

/// Two chains, one ULN, a recorder app on each side and a stack for the
/// kSender -> kReceiver path. Stacks are effective from height 1.
struct TwoChains {
    Network net;

    /// `receiverApp` replaces the default recorder on the destination.
    explicit TwoChains(std::uint64_t budget = 1000, const SecurityStack& stack = ulnStack(),
                       std::unique_ptr<OApp> receiverApp = nullptr)
    {
        if (!receiverApp) receiverApp = std::make_unique<RecorderApp>(fromHex("dead"));
        for (const EndpointId eid : {kSrc, kDst}) {
            Chain& c = net.addChain(ChainConfig{eid, budget, 64 * 1024, 1}, kAdmin);
            EXPECT_TRUE(c.submit(kAdmin, [&](TxContext& tx) {
                             tx.registry().registerLibrary(tx.caller(), MessageLibRecord{kUln, LibKind::Uln, 0, {}, true});
                             if (eid == kSrc) tx.deploy(kSender, std::make_unique<RecorderApp>(fromHex("dead")));
                             else tx.deploy(kReceiver, std::move(receiverApp));
                         }).applied());
        }
        EXPECT_TRUE(src().submit(kSender, [&](TxContext& tx) {
                             tx.endpoint().setSecurityStack(tx, kSender, kDst, stack);
                         }).applied());
        EXPECT_TRUE(dst().submit(kReceiver, [&](TxContext& tx) {
                             tx.endpoint().setSecurityStack(tx, kReceiver, kSrc, stack);
                         }).applied());
        src().advance(1);
        dst().advance(1);
    }

    Chain& src() { return net.chain(kSrc); }
    Chain& dst() { return net.chain(kDst); }
    const Endpoint& dstEndpoint() { return dst().state().endpoint; }
    const ChannelState* channel() { return dstEndpoint().channel(path()); }

    static Path path() { return Path{kSrc, kSender, kDst, kReceiver}; }

    Packet send(const Bytes& payload, const Bytes& options = {})
    {
        PacketHeader h;
        const TxReceipt r = src().submit(kSender, [&](TxContext& tx) {
            h = tx.endpoint().send(tx, kDst, kReceiver, payload, options);
        });
        EXPECT_TRUE(r.applied()) << r.str();
        return Packet{h, payload};
    }

    /// Sends `n` packets with one-byte payloads 1..n.
    std::vector<Packet> sendMany(std::uint64_t n)
    {
        std::vector<Packet> out;
        for (std::uint64_t i = 1; i <= n; ++i) out.push_back(send(Bytes{static_cast<std::uint8_t>(i)}));
        return out;
    }

    /// Commits as the receive library would, bypassing the quorum.
    TxReceipt commit(const Packet& p, std::optional<Hash32> hash = {}, LibraryRef lib = kUln)
    {
        const Hash32 h = hash.value_or(payloadHash(p.header.guid, p.payload));
        return dst().submit(kUser, [&](TxContext& tx) { tx.endpoint().commitVerification(tx, lib, p.header, h); });
    }

    TxReceipt deliver(const Packet& p, const Address& by = kUser)
    {
        return dst().submit(by, [&](TxContext& tx) {
            tx.endpoint().lzReceive(tx, p.header.path, p.header.nonce, p.header.guid, p.payload, {});
        });
    }

    TxReceipt skip(std::uint64_t nonce, const Address& by = kReceiver)
    {
        return dst().submit(by, [&](TxContext& tx) { tx.endpoint().skip(tx, path(), nonce); });
    }

    TxReceipt clear(const Packet& p, const Address& by = kReceiver)
    {
        return dst().submit(by, [&](TxContext& tx) {
            tx.endpoint().clear(tx, p.header.path, p.header.nonce, p.header.guid, p.payload);
        });
    }

    TxReceipt nilify(std::uint64_t nonce, const Hash32& expected, const Address& by = kReceiver)
    {
        return dst().submit(by, [&](TxContext& tx) { tx.endpoint().nilify(tx, path(), nonce, expected); });
    }

    TxReceipt burn(std::uint64_t nonce, const Hash32& expected, const Address& by = kReceiver)
    {
        return dst().submit(by, [&](TxContext& tx) { tx.endpoint().burn(tx, path(), nonce, expected); });
    }

    TxReceipt attest(WorkerId dvn, const Packet& p, std::optional<Hash32> hash = {})
    {
        const Hash32 h = hash.value_or(payloadHash(p.header.guid, p.payload));
        return dst().submit(workerAddress(dvn), [&](TxContext& tx) { dvnVerify(tx, kUln, dvn, p.header, h); });
    }

    TxReceipt commitIfReadyTx(const Packet& p, CommitOutcome& out)
    {
        const Hash32 h = payloadHash(p.header.guid, p.payload);
        return dst().submit(kUser, [&](TxContext& tx) { out = commitIfReady(tx, kUln, p.header, h); });
    }

    const RecorderApp& recorder()
    {
        return dynamic_cast<const RecorderApp&>(*dst().state().apps.at(kReceiver));
    }
};

} // namespace omni::test
