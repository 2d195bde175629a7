#include "support.hpp"

using namespace omni;
using namespace omni::test;

namespace {

Hash32 hashOf(const Packet& p) { return payloadHash(p.header.guid, p.payload); }

} // namespace

// --- send ------------------------------------------------------------------

TEST(Send, FirstNonceIsOneAndSendsAreGapless)
{
    TwoChains t;
    const auto ps = t.sendMany(3);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        EXPECT_EQ(ps[i].header.nonce, i + 1);
        EXPECT_EQ(ps[i].header.guid, computeGuid(i + 1, TwoChains::path()));
        EXPECT_EQ(ps[i].header.version, 1);
    }
    EXPECT_EQ(t.src().state().endpoint.channel(TwoChains::path())->outboundNonce, 3u);
}

TEST(Send, WithoutStackFails)
{
    TwoChains t;
    const TxReceipt r = t.src().submit(kSender, [](TxContext& tx) {
        tx.endpoint().send(tx, EndpointId{3}, kReceiver, Bytes{1}, {});
    });
    EXPECT_EQ(reason(r), Errc::NoSendLibrary);
}

TEST(Send, PayloadTooLarge)
{
    TwoChains t;
    const TxReceipt r = t.src().submit(kSender, [](TxContext& tx) {
        tx.endpoint().send(tx, kDst, kReceiver, Bytes(64 * 1024 + 1, 0), {});
    });
    EXPECT_EQ(reason(r), Errc::PayloadTooLarge);
}

TEST(Send, MalformedOptionsRevertWithoutConsumingNonce)
{
    TwoChains t;
    const TxReceipt r = t.src().submit(kSender, [](TxContext& tx) {
        tx.endpoint().send(tx, kDst, kReceiver, Bytes{1}, Bytes{0x09});
    });
    EXPECT_EQ(reason(r), Errc::UnknownType);
    EXPECT_EQ(t.send(Bytes{1}).header.nonce, 1u);
}

// --- commitVerification -------------------------------------------------------

TEST(Commit, OutOfOrderWithGaps)
{
    TwoChains t;
    const auto ps = t.sendMany(5);
    EXPECT_TRUE(t.commit(ps[4]).applied());
    EXPECT_EQ(t.channel()->verified.count(5), 1u);
    EXPECT_EQ(t.dstEndpoint().getInboundNonce(TwoChains::path()), 0u);
}

TEST(Commit, StaleAfterDelivery)
{
    TwoChains t;
    const auto ps = t.sendMany(3);
    for (const auto& p : ps) ASSERT_TRUE(t.commit(p).applied());
    ASSERT_TRUE(t.deliver(ps[2]).applied());
    EXPECT_EQ(reason(t.commit(ps[2])), Errc::StalePacket);
}

TEST(Commit, WrongLibraryRejected)
{
    TwoChains t;
    const auto p = t.send(Bytes{1});
    EXPECT_EQ(reason(t.commit(p, {}, LibraryRef{1, 1, 1})), Errc::NotReceiveLibrary);
}

TEST(Commit, OverwritesExistingEntry)
{
    TwoChains t;
    const auto p = t.send(Bytes{1});
    Hash32 wrong = hashOf(p);
    wrong[0] ^= 1;
    ASSERT_TRUE(t.commit(p, wrong).applied());
    ASSERT_TRUE(t.commit(p).applied());
    EXPECT_EQ(t.channel()->verified.at(1), hashOf(p));
}

// --- getInboundNonce ---------------------------------------------------------

TEST(InboundNonce, StopsAtGap)
{
    TwoChains t;
    const auto ps = t.sendMany(6);
    for (int n : {1, 2, 3, 6}) ASSERT_TRUE(t.commit(ps[n - 1]).applied());
    EXPECT_EQ(t.dstEndpoint().getInboundNonce(TwoChains::path()), 3u);
}

TEST(InboundNonce, BudgetTruncatesWalk)
{
    TwoChains t(kUnbounded);
    const auto ps = t.sendMany(1000);
    for (std::size_t i = 1; i < ps.size(); ++i) ASSERT_TRUE(t.commit(ps[i]).applied());
    EXPECT_EQ(t.dstEndpoint().getInboundNonce(TwoChains::path()), 0u);
    ASSERT_TRUE(t.commit(ps[0]).applied());
    EXPECT_EQ(t.dstEndpoint().getInboundNonce(TwoChains::path()), 1000u);
    EXPECT_EQ(t.dstEndpoint().getInboundNonce(TwoChains::path(), 500), 500u);
}

TEST(InboundNonce, NilCountsAsGap)
{
    TwoChains t;
    const auto ps = t.sendMany(3);
    for (const auto& p : ps) ASSERT_TRUE(t.commit(p).applied());
    ASSERT_TRUE(t.nilify(2, hashOf(ps[1])).applied());
    EXPECT_EQ(t.dstEndpoint().getInboundNonce(TwoChains::path()), 1u);
}

// --- lzReceive -----------------------------------------------------------------

TEST(Receive, OutOfOrderWithinVerifiedPrefix)
{
    TwoChains t;
    const auto ps = t.sendMany(2);
    for (const auto& p : ps) ASSERT_TRUE(t.commit(p).applied());
    ASSERT_TRUE(t.deliver(ps[1]).applied());
    EXPECT_EQ(t.channel()->lazyInboundNonce, 2u);
    EXPECT_EQ(t.channel()->verified.count(1), 1u);
    EXPECT_TRUE(t.deliver(ps[0]).applied());
    EXPECT_EQ(t.recorder().deliveries().size(), 2u);
    EXPECT_TRUE(t.channel()->verified.empty());
}

TEST(Receive, CensorshipWhenPredecessorUnverified)
{
    TwoChains t;
    const auto ps = t.sendMany(2);
    ASSERT_TRUE(t.commit(ps[1]).applied());
    EXPECT_EQ(reason(t.deliver(ps[1])), Errc::Censorship);
}

TEST(Receive, ExactlyOnce)
{
    TwoChains t;
    const auto p = t.send(Bytes{1});
    ASSERT_TRUE(t.commit(p).applied());
    ASSERT_TRUE(t.deliver(p).applied());
    EXPECT_EQ(reason(t.deliver(p)), Errc::AlreadyDelivered);
    EXPECT_EQ(t.recorder().deliveries().size(), 1u);
}

TEST(Receive, HashMismatch)
{
    TwoChains t;
    auto p = t.send(Bytes{1});
    ASSERT_TRUE(t.commit(p).applied());
    p.payload = Bytes{2};
    EXPECT_EQ(reason(t.deliver(p)), Errc::HashMismatch);
}

TEST(Receive, CallbackAbortRollsBackEverything)
{
    TwoChains t;
    const auto p = t.send(fromHex("deadbeef"));
    ASSERT_TRUE(t.commit(p).applied());
    const std::string before = t.dst().stateDump();
    const TxReceipt r = t.deliver(p);
    EXPECT_EQ(r.status, TxStatus::Reverted);
    EXPECT_EQ(t.dst().stateDump(), before);
}

// --- skip ----------------------------------------------------------------------

TEST(Skip, NextAfterInbound)
{
    TwoChains t;
    const auto ps = t.sendMany(6);
    for (int n : {1, 2, 3}) ASSERT_TRUE(t.commit(ps[n - 1]).applied());
    EXPECT_EQ(reason(t.skip(6)), Errc::WrongNonce);
    ASSERT_TRUE(t.skip(4).applied());
    EXPECT_EQ(t.channel()->lazyInboundNonce, 4u);
    EXPECT_EQ(reason(t.deliver(ps[3])), Errc::AlreadyDelivered);
    // Nonces below the skipped one stay deliverable.
    EXPECT_TRUE(t.deliver(ps[0]).applied());
}

TEST(Skip, OnlyReceiver)
{
    TwoChains t;
    t.sendMany(1);
    EXPECT_EQ(reason(t.skip(1, kUser)), Errc::NotReceiver);
}

// --- clear -----------------------------------------------------------------------

TEST(Clear, LikeDeliveryWithoutCallback)
{
    TwoChains t;
    const auto p = t.send(fromHex("dead"));
    ASSERT_TRUE(t.commit(p).applied());
    ASSERT_TRUE(t.clear(p).applied());
    EXPECT_EQ(t.channel()->lazyInboundNonce, 1u);
    EXPECT_TRUE(t.channel()->verified.empty());
    EXPECT_TRUE(t.recorder().deliveries().empty());
}

TEST(Clear, Errors)
{
    TwoChains t;
    auto ps = t.sendMany(2);
    ASSERT_TRUE(t.commit(ps[1]).applied());
    EXPECT_EQ(reason(t.clear(ps[1])), Errc::Censorship);
    ASSERT_TRUE(t.commit(ps[0]).applied());
    Packet wrong = ps[0];
    wrong.payload = Bytes{9};
    EXPECT_EQ(reason(t.clear(wrong)), Errc::HashMismatch);
    EXPECT_EQ(reason(t.clear(ps[0], kUser)), Errc::NotReceiver);
}

// --- nilify ----------------------------------------------------------------------

TEST(Nilify, RecoverFromMaliciousCommit)
{
    TwoChains t;
    const auto p = t.send(Bytes{1});
    Hash32 forged = hashOf(p);
    forged[5] ^= 0xff;
    ASSERT_TRUE(t.commit(p, forged).applied());
    ASSERT_TRUE(t.nilify(1, forged).applied());
    EXPECT_EQ(t.channel()->verified.at(1), kNilHash);
    EXPECT_EQ(reason(t.deliver(p)), Errc::Nilified);
    ASSERT_TRUE(t.commit(p).applied());
    EXPECT_TRUE(t.deliver(p).applied());
}

TEST(Nilify, CompareAndSet)
{
    TwoChains t;
    const auto p = t.send(Bytes{1});
    Hash32 forged = hashOf(p);
    forged[5] ^= 0xff;
    ASSERT_TRUE(t.commit(p, forged).applied());
    ASSERT_TRUE(t.commit(p).applied());
    EXPECT_EQ(reason(t.nilify(1, forged)), Errc::HashMismatch);
    EXPECT_EQ(reason(t.nilify(2, forged)), Errc::NoEntry);
    EXPECT_EQ(reason(t.nilify(1, hashOf(p), kUser)), Errc::NotReceiver);
}

// --- burn ------------------------------------------------------------------------

TEST(Burn, RemovesGarbageBelowLazy)
{
    TwoChains t;
    const auto ps = t.sendMany(3);
    Hash32 garbage = hashOf(ps[1]);
    garbage[0] ^= 1;
    ASSERT_TRUE(t.commit(ps[1], garbage).applied());
    ASSERT_TRUE(t.skip(1).applied());
    // The walk passes the garbage entry at 2, so 3 is the next skippable nonce.
    ASSERT_TRUE(t.skip(3).applied());
    EXPECT_EQ(t.channel()->lazyInboundNonce, 3u);
    EXPECT_EQ(reason(t.burn(4, garbage)), Errc::NonceAhead);
    EXPECT_EQ(reason(t.burn(1, garbage)), Errc::NoEntry);
    EXPECT_EQ(reason(t.burn(2, hashOf(ps[1]))), Errc::HashMismatch);
    EXPECT_EQ(reason(t.burn(2, garbage, kUser)), Errc::NotReceiver);
    ASSERT_TRUE(t.burn(2, garbage).applied());
    EXPECT_TRUE(t.channel()->verified.empty());
}

TEST(Burn, NilifiedNonceBelowLazy)
{
    TwoChains t;
    const auto ps = t.sendMany(2);
    ASSERT_TRUE(t.commit(ps[0]).applied());
    ASSERT_TRUE(t.commit(ps[1]).applied());
    ASSERT_TRUE(t.nilify(1, hashOf(ps[0])).applied());
    // Delivering 2 is blocked by the NIL gap; skip 1 moves past it.
    ASSERT_TRUE(t.skip(1).applied());
    ASSERT_TRUE(t.deliver(ps[1]).applied());
    EXPECT_EQ(t.channel()->lazyInboundNonce, 2u);
}

TEST(Burn, EntryBelowLazyAfterOutOfOrderDelivery)
{
    TwoChains t;
    const auto ps = t.sendMany(2);
    ASSERT_TRUE(t.commit(ps[0]).applied());
    ASSERT_TRUE(t.commit(ps[1]).applied());
    ASSERT_TRUE(t.deliver(ps[1]).applied());
    ASSERT_EQ(t.channel()->lazyInboundNonce, 2u);
    // Nonce 1 is verified but below lazy: burn removes it for good.
    Hash32 wrong = hashOf(ps[0]);
    wrong[1] ^= 1;
    EXPECT_EQ(reason(t.burn(1, wrong)), Errc::HashMismatch);
    ASSERT_TRUE(t.burn(1, hashOf(ps[0])).applied());
    EXPECT_EQ(reason(t.deliver(ps[0])), Errc::AlreadyDelivered);
    EXPECT_EQ(reason(t.burn(1, hashOf(ps[0]))), Errc::NoEntry);
}

TEST(Burn, NilSlotBelowLazyNeedsNilExpectedHash)
{
    // Honest skip rules never leave a NIL slot below lazy; the unchecked
    // skip quirk does, which exercises burn with expectedHash = NIL.
    TwoChains t;
    ASSERT_TRUE(t.dst().submit(kAdmin, [](TxContext& tx) { tx.endpoint().quirks().skipWithoutNonceCheck = true; })
                    .applied());
    const auto ps = t.sendMany(3);
    ASSERT_TRUE(t.commit(ps[1]).applied());
    ASSERT_TRUE(t.nilify(2, hashOf(ps[1])).applied());
    ASSERT_TRUE(t.skip(3).applied());
    EXPECT_EQ(reason(t.burn(2, hashOf(ps[1]))), Errc::HashMismatch);
    ASSERT_TRUE(t.burn(2, kNilHash).applied());
    EXPECT_EQ(t.channel()->verified.count(2), 0u);
}

TEST(Nilify, StaleBelowLazy)
{
    TwoChains t;
    const auto ps = t.sendMany(2);
    ASSERT_TRUE(t.commit(ps[0]).applied());
    ASSERT_TRUE(t.commit(ps[1]).applied());
    ASSERT_TRUE(t.deliver(ps[1]).applied());
    EXPECT_EQ(reason(t.nilify(1, hashOf(ps[0]))), Errc::StalePacket);
}

// --- Security Stack ----------------------------------------------------------------

TEST(Stack, InvalidThreshold)
{
    TwoChains t;
    const TxReceipt r = t.dst().submit(kReceiver, [](TxContext& tx) {
        tx.endpoint().setSecurityStack(tx, kReceiver, kSrc, ulnStack({1}, {2}, 2));
    });
    EXPECT_EQ(reason(r), Errc::InvalidStack);
}

TEST(Stack, OwnershipAndLibraryChecks)
{
    TwoChains t;
    EXPECT_EQ(reason(t.dst().submit(kUser, [](TxContext& tx) {
                  tx.endpoint().setSecurityStack(tx, kReceiver, kSrc, ulnStack());
              })),
              Errc::NotOwner);
    SecurityStack s = ulnStack();
    s.receiveLibrary = LibraryRef{9, 9, 9};
    EXPECT_EQ(reason(t.dst().submit(kReceiver, [&](TxContext& tx) {
                  tx.endpoint().setSecurityStack(tx, kReceiver, kSrc, s);
              })),
              Errc::UnknownLibrary);
}

TEST(Stack, ViolationMessages)
{
    EXPECT_EQ(stackViolation(ulnStack()), "");
    EXPECT_NE(stackViolation(ulnStack({1}, {1}, 0)), "");
    EXPECT_NE(stackViolation(ulnStack({}, {}, 0)), "");
    EXPECT_NE(stackViolation(ulnStack({}, {1, 2}, 3)), "");
    std::set<WorkerId> many;
    for (WorkerId i = 1; i <= 255; ++i) many.insert(i);
    EXPECT_NE(stackViolation(ulnStack(many)), "");
}

TEST(Stack, ReconfigurationNeverTouchesChannelState)
{
    TwoChains t;
    const auto ps = t.sendMany(3);
    ASSERT_TRUE(t.commit(ps[0]).applied());
    ASSERT_TRUE(t.commit(ps[2]).applied());
    const ChannelState before = *t.channel();
    ASSERT_TRUE(t.dst().submit(kReceiver, [](TxContext& tx) {
                     tx.endpoint().setSecurityStack(tx, kReceiver, kSrc, ulnStack({7}, {8, 9}, 1));
                 }).applied());
    t.dst().advance(1);
    EXPECT_EQ(*t.channel(), before);
}

TEST(Stack, TakesEffectAtNextBlock)
{
    TwoChains t;
    const std::uint64_t h = t.dst().height();
    ASSERT_TRUE(t.dst().submit(kReceiver, [](TxContext& tx) {
                     tx.endpoint().setSecurityStack(tx, kReceiver, kSrc, ulnStack({7}));
                 }).applied());
    EXPECT_EQ(t.dstEndpoint().resolveStack(kReceiver, kSrc, h)->requiredDvns, std::set<WorkerId>{1});
    EXPECT_EQ(t.dstEndpoint().resolveStack(kReceiver, kSrc, h + 1)->requiredDvns, std::set<WorkerId>{7});
}

TEST(Stack, DefaultOptInFollowsAdminUpdates)
{
    TwoChains t;
    const Address app = Address::fromU64(0x2000);
    SecurityStack optIn;
    optIn.isDefaultOptIn = true;
    ASSERT_TRUE(t.dst().submit(kAdmin, [](TxContext& tx) {
                     tx.endpoint().setDefaultStack(tx, kSrc, ulnStack({1}));
                 }).applied());
    ASSERT_TRUE(t.dst().submit(app, [&](TxContext& tx) {
                     tx.endpoint().setSecurityStack(tx, app, kSrc, optIn);
                 }).applied());
    t.dst().advance(1);
    EXPECT_EQ(t.dstEndpoint().resolveStack(app, kSrc, t.dst().height())->requiredDvns, std::set<WorkerId>{1});
    ASSERT_TRUE(t.dst().submit(kAdmin, [](TxContext& tx) {
                     tx.endpoint().setDefaultStack(tx, kSrc, ulnStack({4}));
                 }).applied());
    t.dst().advance(1);
    EXPECT_EQ(t.dstEndpoint().resolveStack(app, kSrc, t.dst().height())->requiredDvns, std::set<WorkerId>{4});
}

TEST(Stack, DefaultRequiresAdmin)
{
    TwoChains t;
    EXPECT_FALSE(t.dst().submit(kUser, [](TxContext& tx) {
                         tx.endpoint().setDefaultStack(tx, kSrc, ulnStack());
                     }).applied());
}

// --- grace period ---------------------------------------------------------------------

namespace {

struct Migration : TwoChains {
    static constexpr LibraryRef kV2{1, 2, 0};

    Migration()
    {
        for (Chain* c : {&src(), &dst()})
            EXPECT_TRUE(c->submit(kAdmin, [](TxContext& tx) {
                             tx.registry().registerLibrary(tx.caller(), MessageLibRecord{kV2, LibKind::Uln, 0, {}, true});
                         }).applied());
    }

    TxReceipt migrate(std::uint64_t grace, LibraryRef lib = kV2)
    {
        return dst().submit(kReceiver, [&](TxContext& tx) {
            tx.endpoint().setReceiveLibraryWithGrace(tx, kReceiver, kSrc, lib, grace);
        });
    }
};

} // namespace

TEST(Grace, OldLibraryAcceptedInsideWindow)
{
    Migration t;
    const auto p = t.send(Bytes{1});
    ASSERT_TRUE(t.migrate(10).applied());
    t.dst().advance(5);
    EXPECT_TRUE(t.commit(p).applied());
}

TEST(Grace, OldLibraryRejectedAfterWindowThenRollback)
{
    Migration t;
    const auto p = t.send(Bytes{1});
    ASSERT_TRUE(t.migrate(10).applied());
    t.dst().advance(10);
    EXPECT_TRUE(t.commit(p).applied());
    const auto q = t.send(Bytes{2});
    t.dst().advance(1);
    EXPECT_EQ(reason(t.commit(q)), Errc::NotReceiveLibrary);
    ASSERT_TRUE(t.migrate(0, kUln).applied());
    t.dst().advance(1);
    EXPECT_TRUE(t.commit(q).applied());
}

TEST(Grace, ZeroGraceRejectsImmediately)
{
    Migration t;
    const auto p = t.send(Bytes{1});
    ASSERT_TRUE(t.migrate(0).applied());
    t.dst().advance(1);
    EXPECT_EQ(reason(t.commit(p)), Errc::NotReceiveLibrary);
}

TEST(Grace, VersionGating)
{
    Migration t;
    const auto p = t.send(Bytes{1});
    ASSERT_TRUE(t.migrate(10).applied());
    t.dst().advance(1);
    // The new library is authorized but its major does not match the packet.
    EXPECT_EQ(reason(t.commit(p, {}, Migration::kV2)), Errc::VersionMismatch);
}

TEST(Grace, Errors)
{
    Migration t;
    EXPECT_EQ(reason(t.migrate(1, LibraryRef{5, 5, 5})), Errc::UnknownLibrary);
    EXPECT_EQ(reason(t.dst().submit(kUser, [](TxContext& tx) {
                  tx.endpoint().setReceiveLibraryWithGrace(tx, kReceiver, kSrc, Migration::kV2, 1);
              })),
              Errc::NotOwner);
}

// --- compose -------------------------------------------------------------------------------

namespace {

/// Stores one or two composes on delivery, addressed to kReceiver itself.
class Composer final : public OApp {
public:
    explicit Composer(std::vector<std::uint16_t> indices, bool failCompose = false)
        : indices_(std::move(indices)), failCompose_(failCompose)
    {
    }
    std::unique_ptr<OApp> clone() const override { return std::make_unique<Composer>(*this); }
    std::string_view kind() const override { return "composer"; }
    std::string describe() const override { return "composer runs=" + std::to_string(runs); }
    void lzReceive(TxContext& tx, const Origin&, const Hash32& guid, ByteView message, ByteView) override
    {
        for (auto i : indices_) tx.endpoint().sendCompose(tx, kReceiver, guid, i, message);
    }
    void lzCompose(TxContext&, const Address&, const Hash32&, std::uint16_t, ByteView, ByteView) override
    {
        if (failCompose_) fail(Errc::CallbackAbort);
        ++runs;
    }
    std::vector<std::uint16_t> indices_;
    bool failCompose_;
    int runs = 0;
};

struct ComposeNet : TwoChains {
    explicit ComposeNet(std::vector<std::uint16_t> idx, bool failCompose = false)
        : TwoChains(1000, ulnStack(), std::make_unique<Composer>(std::move(idx), failCompose))
    {
    }
    ComposeKey key(const Packet& p, std::uint16_t i) { return {kReceiver, kReceiver, p.header.guid, i}; }
    TxReceipt run(const Packet& p, std::uint16_t i, const Bytes& msg)
    {
        return dst().submit(kUser, [&](TxContext& tx) {
            tx.endpoint().lzCompose(tx, kReceiver, kReceiver, p.header.guid, i, msg, {});
        });
    }
};

} // namespace

TEST(Compose, StoredThenExecutedOnce)
{
    ComposeNet t({0});
    const auto p = t.send(Bytes{4});
    ASSERT_TRUE(t.commit(p).applied());
    ASSERT_TRUE(t.deliver(p).applied());
    ASSERT_EQ(t.dstEndpoint().compose(t.key(p, 0))->status, ComposeStatus::Stored);
    EXPECT_EQ(reason(t.run(p, 0, Bytes{5})), Errc::HashMismatch);
    EXPECT_TRUE(t.run(p, 0, Bytes{4}).applied());
    EXPECT_EQ(t.dstEndpoint().compose(t.key(p, 0))->status, ComposeStatus::Executed);
    EXPECT_EQ(reason(t.run(p, 0, Bytes{4})), Errc::AlreadyExecuted);
    EXPECT_EQ(reason(t.run(p, 1, Bytes{4})), Errc::NoSuchCompose);
}

TEST(Compose, DistinctIndicesAndDuplicates)
{
    ComposeNet two({0, 1});
    const auto p = two.send(Bytes{4});
    ASSERT_TRUE(two.commit(p).applied());
    ASSERT_TRUE(two.deliver(p).applied());
    EXPECT_NE(two.dstEndpoint().compose(two.key(p, 0)), nullptr);
    EXPECT_NE(two.dstEndpoint().compose(two.key(p, 1)), nullptr);

    ComposeNet dup({3, 3});
    const auto q = dup.send(Bytes{4});
    ASSERT_TRUE(dup.commit(q).applied());
    EXPECT_EQ(reason(dup.deliver(q)), Errc::DuplicateCompose);
}

TEST(Compose, AbortKeepsEntryStored)
{
    ComposeNet t({0}, true);
    const auto p = t.send(Bytes{4});
    ASSERT_TRUE(t.commit(p).applied());
    ASSERT_TRUE(t.deliver(p).applied());
    EXPECT_EQ(reason(t.run(p, 0, Bytes{4})), Errc::CallbackAbort);
    EXPECT_EQ(t.dstEndpoint().compose(t.key(p, 0))->status, ComposeStatus::Stored);
}

TEST(Compose, OnlyInsideCallback)
{
    TwoChains t;
    const TxReceipt r = t.dst().submit(kReceiver, [](TxContext& tx) {
        tx.endpoint().sendCompose(tx, kReceiver, Hash32{}, 0, Bytes{});
    });
    EXPECT_EQ(reason(r), Errc::NotInCallback);
}
