#include "support.hpp"

using namespace omni;
using namespace omni::test;

namespace {

/// Brute force: enumerate the attester set bit by bit and count by hand.
bool oracle(unsigned mask, unsigned nRequired, unsigned nOptional, unsigned threshold)
{
    for (unsigned i = 0; i < nRequired; ++i)
        if ((mask & (1u << i)) == 0) return false;
    unsigned hits = 0;
    for (unsigned i = 0; i < nOptional; ++i)
        if (mask & (1u << (nRequired + i))) ++hits;
    return hits >= threshold;
}

} // namespace

TEST(Registry, AppendOnly)
{
    LibraryRegistry reg(kAdmin);
    reg.registerLibrary(kAdmin, {LibraryRef{1, 1, 0}, LibKind::Uln, 0, {}, true});
    const auto snapshot = reg.records();
    reg.registerLibrary(kAdmin, {LibraryRef{1, 1, 1}, LibKind::Uln, 0, {}, true});
    reg.registerLibrary(kAdmin, {LibraryRef{1, 2, 0}, LibKind::Whitelist, 0, {3}, true});
    ASSERT_EQ(reg.records().size(), 3u);
    EXPECT_TRUE(std::equal(snapshot.begin(), snapshot.end(), reg.records().begin()));

    try {
        reg.registerLibrary(kAdmin, {LibraryRef{1, 1, 0}, LibKind::Whitelist, 0, {}, true});
        FAIL();
    } catch (const ProtocolError& e) {
        EXPECT_EQ(e.code(), Errc::DuplicateVersion);
    }
    try {
        reg.registerLibrary(kUser, {LibraryRef{1, 3, 0}, LibKind::Uln, 0, {}, true});
        FAIL();
    } catch (const ProtocolError& e) {
        EXPECT_EQ(e.code(), Errc::NotAdmin);
    }
    EXPECT_EQ(reg.records().size(), 3u);
    EXPECT_EQ(reg.find(LibraryRef{1, 1, 0})->kind, LibKind::Uln);
    EXPECT_EQ(reg.find(LibraryRef{4, 0, 0}), nullptr);
}

TEST(Quorum, DocumentedCases)
{
    const UlnConfigView cfg{{1}, {2, 3, 4}, 1};
    EXPECT_TRUE(committable(std::set<WorkerId>{1, 2}, cfg));
    EXPECT_FALSE(committable(std::set<WorkerId>{2, 3}, cfg));
    EXPECT_FALSE(committable(std::set<WorkerId>{1}, cfg));
    EXPECT_TRUE(committable(std::set<WorkerId>{3, 4}, UlnConfigView{{}, {2, 3, 4}, 2}));
}

TEST(Quorum, UnconfiguredAttestersDoNotCount)
{
    EXPECT_FALSE(committable(std::set<WorkerId>{1, 9}, UlnConfigView{{1}, {2}, 1}));
}

TEST(Quorum, MatchesExhaustiveEnumeration)
{
    std::size_t cases = 0;
    for (unsigned r = 0; r <= 2; ++r)
        for (unsigned o = 0; o <= 4; ++o)
            for (unsigned th = 0; th <= 4; ++th) {
                UlnConfigView cfg;
                for (unsigned i = 0; i < r; ++i) cfg.required.insert(10 + i);
                for (unsigned i = 0; i < o; ++i) cfg.optional.insert(20 + i);
                cfg.optionalThreshold = static_cast<std::uint8_t>(th);
                for (unsigned mask = 0; mask < (1u << (r + o)); ++mask) {
                    std::set<WorkerId> att;
                    for (unsigned i = 0; i < r; ++i)
                        if (mask & (1u << i)) att.insert(10 + i);
                    for (unsigned i = 0; i < o; ++i)
                        if (mask & (1u << (r + i))) att.insert(20 + i);
                    ASSERT_EQ(committable(att, cfg), oracle(mask, r, o, th))
                        << "r=" << r << " o=" << o << " th=" << th << " mask=" << mask;
                    ++cases;
                }
            }
    EXPECT_GT(cases, 0u);
}

TEST(Quorum, MonotoneAndRequiredIsLowerBound)
{
    const UlnConfigView cfg{{1, 2}, {3, 4, 5}, 2};
    const std::vector<WorkerId> all = {1, 2, 3, 4, 5};
    for (unsigned mask = 0; mask < 32; ++mask) {
        std::set<WorkerId> s;
        for (unsigned i = 0; i < 5; ++i)
            if (mask & (1u << i)) s.insert(all[i]);
        if (!committable(s, cfg)) continue;
        for (WorkerId extra : all) {
            auto sup = s;
            sup.insert(extra);
            EXPECT_TRUE(committable(sup, cfg));
        }
        for (WorkerId req : cfg.required) {
            auto sub = s;
            sub.erase(req);
            EXPECT_FALSE(committable(sub, cfg));
        }
    }
}

TEST(Attestation, StoreSemantics)
{
    TwoChains t;
    const auto p = t.send(Bytes{1});
    ASSERT_TRUE(t.attest(1, p).applied());
    ASSERT_TRUE(t.attest(2, p).applied());
    const Hash32 hh = headerHash(p.header);
    const Hash32 ph = payloadHash(p.header.guid, p.payload);
    const auto& store = t.dst().state().attestations.at(kUln);
    EXPECT_EQ(store.attesters(hh, ph).size(), 2u);

    EXPECT_EQ(reason(t.attest(1, p)), Errc::DuplicateAttestation);
    EXPECT_EQ(t.dst().state().attestations.at(kUln).attesters(hh, ph).size(), 2u);
}

TEST(Attestation, EquivocationCreatesSecondKey)
{
    TwoChains t;
    const auto p = t.send(Bytes{1});
    const Hash32 honest = payloadHash(p.header.guid, p.payload);
    ASSERT_TRUE(t.attest(1, p).applied());
    ASSERT_TRUE(t.attest(1, p, equivocate(honest)).applied());
    EXPECT_EQ(t.dst().state().attestations.at(kUln).entries().size(), 2u);
}

TEST(CommitIfReady, FollowsQuorumResolvedAtCallTime)
{
    TwoChains t(1000, ulnStack({1}, {2, 3}, 1));
    const auto ps = t.sendMany(2);
    for (WorkerId d : {1, 2}) ASSERT_TRUE(t.attest(d, ps[0]).applied());
    for (WorkerId d : {2, 3}) ASSERT_TRUE(t.attest(d, ps[1]).applied());

    CommitOutcome out{};
    ASSERT_TRUE(t.commitIfReadyTx(ps[1], out).applied());
    EXPECT_EQ(out, CommitOutcome::NotReady);
    EXPECT_EQ(t.channel(), nullptr);

    // Raising the threshold makes nonce 1 no longer committable.
    ASSERT_TRUE(t.dst().submit(kReceiver, [](TxContext& tx) {
                     tx.endpoint().setSecurityStack(tx, kReceiver, kSrc, ulnStack({1}, {2, 3}, 2));
                 }).applied());
    t.dst().advance(1);
    ASSERT_TRUE(t.commitIfReadyTx(ps[0], out).applied());
    EXPECT_EQ(out, CommitOutcome::NotReady);
    ASSERT_TRUE(t.attest(3, ps[0]).applied());
    ASSERT_TRUE(t.commitIfReadyTx(ps[0], out).applied());
    EXPECT_EQ(out, CommitOutcome::Committed);

    ASSERT_TRUE(t.deliver(ps[0]).applied());
    EXPECT_EQ(reason(t.commitIfReadyTx(ps[0], out)), Errc::StalePacket);
}

TEST(SendSide, ChargesFlatFees)
{
    TwoChains t(1000, ulnStack({1}, {2, 3}, 1, 100));
    ASSERT_TRUE(t.src().submit(kAdmin, [](TxContext& tx) {
                     tx.state().fees = FeeSchedule{10, 5};
                     tx.credit(kSender, 40);
                 }).applied());
    const auto p = t.send(Bytes{1});
    EXPECT_EQ(t.src().state().balances.at(kSender), 5u);
    EXPECT_EQ(t.src().state().balances.at(workerAddress(2)), 10u);
    EXPECT_EQ(t.src().state().balances.at(workerAddress(100)), 5u);

    const TxReceipt r = t.src().submit(kSender, [](TxContext& tx) {
        tx.endpoint().send(tx, kDst, kReceiver, Bytes{1}, {});
    });
    EXPECT_EQ(reason(r), Errc::InsufficientBalance);
    EXPECT_EQ(p.header.nonce, 1u);
    EXPECT_EQ(t.src().state().endpoint.channel(TwoChains::path())->outboundNonce, 1u);
}

TEST(SendSide, JobListsDvnsAndExecutor)
{
    TwoChains t(1000, ulnStack({1}, {2, 3}, 1, 100));
    t.send(Bytes{1});
    const PacketSent* sent = nullptr;
    for (const auto& e : t.src().events())
        if (const auto* s = std::get_if<PacketSent>(&e.event)) sent = s;
    ASSERT_NE(sent, nullptr);
    EXPECT_EQ(sent->dvns, (std::vector<WorkerId>{1, 2, 3}));
    EXPECT_EQ(sent->executor, 100u);
    EXPECT_EQ(sent->library, kUln);
}

TEST(Whitelist, AllowlistedCallerCommits)
{
    TwoChains t;
    const LibraryRef wl{2, 1, 0};
    for (Chain* c : {&t.src(), &t.dst()})
        ASSERT_TRUE(c->submit(kAdmin, [&](TxContext& tx) {
                          tx.registry().registerLibrary(tx.caller(), {wl, LibKind::Whitelist, 0, {5}, true});
                      }).applied());
    SecurityStack s = ulnStack();
    s.receiveLibrary = wl;
    ASSERT_TRUE(t.dst().submit(kReceiver, [&](TxContext& tx) {
                     tx.endpoint().setSecurityStack(tx, kReceiver, kSrc, s);
                 }).applied());
    t.dst().advance(1);

    const auto p = t.send(Bytes{1});
    const Hash32 h = payloadHash(p.header.guid, p.payload);
    EXPECT_EQ(reason(t.dst().submit(workerAddress(6), [&](TxContext& tx) { whitelistVerify(tx, wl, 6, p.header, h); })),
              Errc::NotWhitelisted);
    EXPECT_TRUE(t.dst().submit(workerAddress(5), [&](TxContext& tx) { whitelistVerify(tx, wl, 5, p.header, h); })
                    .applied());
    EXPECT_TRUE(t.deliver(p).applied());
    // A ULN instruction against the whitelist library is refused.
    EXPECT_EQ(reason(t.dst().submit(kUser, [&](TxContext& tx) { dvnVerify(tx, wl, 1, p.header, h); })),
              Errc::WrongLibraryKind);
}

TEST(Fees, Quote)
{
    const FeeSchedule f{10, 5};
    EXPECT_EQ(f.quote(ulnStack({1}, {2, 3}, 1)), 35u);
    EXPECT_EQ(FeeSchedule{}.quote(ulnStack()), 0u);
}
