#include "omni/harness.hpp"

#include <gtest/gtest.h>

using namespace omni;

namespace {

const char* kBridges = R"(
chain 1
chain 2
library 1@1.0 kind=uln
dvn D1 latency=1
executor E1
oapp A kind=bridge chain=1 available=50 locked=10 minted=10 peers=B
oapp B kind=bridge chain=2 locked=10 minted=10 peers=A compose=X
oapp X kind=swap chain=2 reserve-out=100 ratio=1:2
stack A remote=2 send=1@1.0 recv=1@1.0 required=D1 executor=E1
stack B remote=1 send=1@1.0 recv=1@1.0 required=D1 executor=E1
watch invariant-holds
watch exactly-once
)";

RunResult run(const std::string& body) { return runScenario(std::string(kBridges) + body); }

void expectPassed(const RunResult& r)
{
    ASSERT_FALSE(r.assertions.empty());
    for (const auto& a : r.assertions)
        EXPECT_TRUE(a.passed) << "line " << a.line << ": " << a.text << " (" << a.detail << ")";
}

} // namespace

TEST(BridgeMessage, Layout)
{
    const Bytes b = encodeBridgeMessage({5, true});
    ASSERT_EQ(b.size(), kBridgePayloadSize);
    EXPECT_EQ(b[0], kBridgeOpMint);
    EXPECT_EQ(b.back(), 1);
    const BridgeMessage m = decodeBridgeMessage(b);
    EXPECT_EQ(m.amount, 5u);
    EXPECT_TRUE(m.compose);
}

TEST(BridgeMessage, MalformedRejected)
{
    for (const Bytes& bad : {Bytes{}, Bytes(17, 1), Bytes(19, 1)}) {
        try {
            decodeBridgeMessage(bad);
            ADD_FAILURE();
        } catch (const ProtocolError& e) {
            EXPECT_EQ(e.code(), Errc::MalformedPayload);
        }
    }
    Bytes wrongOp = encodeBridgeMessage({1, false});
    wrongOp[0] = 0x07;
    EXPECT_THROW(decodeBridgeMessage(wrongOp), ProtocolError);
}

TEST(BridgeInvariant, Sums)
{
    BridgeState a, b, c;
    for (BridgeState* s : {&a, &b, &c}) s->locked = s->minted = 10;
    EXPECT_TRUE(bridgeInvariant({&a, &b, &c}));
    a.locked += 5;
    b.minted += 5;
    EXPECT_TRUE(bridgeInvariant({&a, &b, &c}));
    b.minted += 10;
    EXPECT_FALSE(bridgeInvariant({&a, &b, &c}));
    const BridgeTotals t = bridgeTotals({&a, &b, &c});
    EXPECT_EQ(t.minted, 45u);
    EXPECT_EQ(t.locked, 35u);
    BridgeState zero;
    EXPECT_TRUE(bridgeInvariant({&zero}));
}

TEST(Bridge, SendLocksAndReceiveMints)
{
    expectPassed(run(R"(
at 0 bridge A to=B amount=5
at 0 assert balance A.locked is=15
at 0 assert balance A.available is=45
at 10 assert balance B.minted is=15
)"));
}

TEST(Bridge, ZeroAmountIsANoOpMessage)
{
    expectPassed(run(R"(
at 0 bridge A to=B amount=0
at 10 assert state path=A>B nonce=1 is=Received
at 10 assert balance A.locked is=10
at 10 assert balance B.minted is=10
)"));
}

TEST(Bridge, InsufficientFunds)
{
    expectPassed(run(R"(
at 0 bridge A to=B amount=51
at 0 assert receipt is=reverted(insufficientfunds)
at 0 assert state path=A>B nonce=1 is=Unsent
)"));
}

TEST(Bridge, MalformedPayloadClearedAndChannelContinues)
{
    expectPassed(run(R"(
at 0 send A to=B payload=0102
at 0 bridge A to=B amount=3
at 8 assert state path=A>B nonce=1 is=Verified
at 8 assert delivered-count path=A>B is=0
at 8 clear B path=A>B nonce=1
at 8 assert receipt is=applied
at 16 assert state path=A>B nonce=2 is=Received
at 16 assert balance B.minted is=13
at 16 assert fate path=A>B nonce=1 is=cleared
)"));
}

TEST(Bridge, ComposeFlagStoresOneEntry)
{
    expectPassed(run(R"(
at 0 fault E1 crashed
at 0 bridge A to=B amount=5 compose=1
at 5 deliver B path=A>B nonce=1 by=D1
at 5 assert receipt is=reverted
at 6 commit path=A>B nonce=1
at 6 deliver B path=A>B nonce=1
at 6 assert receipt is=applied
at 7 assert compose X path=A>B nonce=1 is=stored
at 7 assert compose X path=A>B nonce=1 index=1 is=none
)"));
}

TEST(Swap, RatioArithmetic)
{
    expectPassed(run(R"(
at 0 bridge A to=B amount=5 compose=1
at 10 assert compose X path=A>B nonce=1 is=executed
at 10 assert balance X.swapped-in is=5
at 10 assert balance X.swapped-out is=10
at 10 assert balance X.reserve-out is=90
at 10 compose X path=A>B nonce=1
at 10 assert receipt is=reverted(alreadyexecuted)
)"));
}

TEST(Swap, EmptyReservesKeepComposeStored)
{
    const std::string text = R"(
chain 1
chain 2
library 1@1.0 kind=uln
dvn D1 latency=1
executor E1
oapp A kind=bridge chain=1 available=50 peers=B
oapp B kind=bridge chain=2 peers=A compose=X
oapp X kind=swap chain=2 reserve-out=0 ratio=1:1
stack A remote=2 send=1@1.0 recv=1@1.0 required=D1 executor=E1
stack B remote=1 send=1@1.0 recv=1@1.0 required=D1 executor=E1
at 0 bridge A to=B amount=5 compose=1
at 8 fault E1 crashed
at 9 compose X path=A>B nonce=1
at 9 assert receipt is=reverted(insufficientreserves)
at 9 assert compose X path=A>B nonce=1 is=stored
at 10 topup X amount=5
at 10 compose X path=A>B nonce=1
at 10 assert receipt is=applied
at 10 assert balance X.swapped-out is=5
)";
    expectPassed(runScenario(text));
}

TEST(Swap, DirectDeliveryRejected)
{
    const std::string text = R"(
chain 1
chain 2
library 1@1.0 kind=uln
dvn D1 latency=1
executor E1
oapp S kind=recorder chain=1
oapp X kind=swap chain=2
stack S remote=2 send=1@1.0 recv=1@1.0 required=D1 executor=E1
stack X remote=1 send=1@1.0 recv=1@1.0 required=D1 executor=E1
at 0 send S to=X payload=01
at 10 assert state path=S>X nonce=1 is=Verified
at 10 assert trace-contains Reverted(CallbackAbort)
)";
    expectPassed(runScenario(text));
}
