#include "omni/chain.hpp"

#include "omni/error.hpp"

#include <sstream>

namespace omni {

void OApp::lzCompose(TxContext&, const Address&, const Hash32&, std::uint16_t, ByteView, ByteView)
{
    fail(Errc::CallbackAbort, std::string(kind()) + " does not accept composed calls");
}

std::optional<uint128> OApp::field(std::string_view) const { return std::nullopt; }

std::string TxReceipt::str() const
{
    switch (status) {
    case TxStatus::Applied: return "Applied";
    case TxStatus::OutOfBudget: return "OutOfBudget";
    case TxStatus::Reverted: break;
    }
    return "Reverted(" + std::string(reason ? toString(*reason) : "?") + ")";
}

// --- TxContext -----------------------------------------------------------------

TxContext::TxContext(Chain& chain, const Address& sender) : chain_(chain), callers_{sender} {}

std::uint64_t TxContext::height() const { return chain_.height_; }
EndpointId TxContext::eid() const { return chain_.config_.eid; }
const ChainConfig& TxContext::config() const { return chain_.config_; }
ChainState& TxContext::state() { return chain_.state_; }
const ChainState& TxContext::state() const { return chain_.state_; }

void TxContext::chargeIteration()
{
    if (used_ >= chain_.config_.iterationBudget)
        fail(Errc::OutOfBudget, "budget " + std::to_string(chain_.config_.iterationBudget));
    ++used_;
}

void TxContext::emit(Event e)
{
    chain_.events_.push_back(LedgerEvent{chain_.height_, chain_.nextSeq_++, std::move(e)});
}

uint128 TxContext::balance(const Address& a) const
{
    const auto it = chain_.state_.balances.find(a);
    return it == chain_.state_.balances.end() ? 0 : it->second;
}

void TxContext::credit(const Address& a, uint128 amount)
{
    if (amount != 0) chain_.state_.balances[a] += amount;
}

void TxContext::debit(const Address& a, uint128 amount)
{
    if (amount == 0) return;
    auto& bal = chain_.state_.balances[a];
    if (bal < amount) fail(Errc::InsufficientBalance, "needs " + toString(amount) + ", has " + toString(bal));
    bal -= amount;
}

void TxContext::deploy(const Address& at, std::unique_ptr<OApp> app)
{
    if (chain_.state_.apps.count(at) != 0) fail(Errc::InvalidArgument, "address already holds an app");
    chain_.state_.apps.emplace(at, AppHandle(std::move(app)));
}

OApp& TxContext::app(const Address& at)
{
    const auto it = chain_.state_.apps.find(at);
    if (it == chain_.state_.apps.end() || it->second.get() == nullptr) fail(Errc::UnknownApp, at.hex());
    return *it->second;
}

void TxContext::invokeReceive(const Address& receiver, const Origin& origin, const Hash32& guid, ByteView message,
                              ByteView extraData)
{
    OApp& target = app(receiver);
    actAs(receiver, [&] { target.lzReceive(*this, origin, guid, message, extraData); });
}

void TxContext::invokeCompose(const Address& to, const Address& from, const Hash32& guid, std::uint16_t index,
                              ByteView message, ByteView extraData)
{
    OApp& target = app(to);
    actAs(to, [&] { target.lzCompose(*this, from, guid, index, message, extraData); });
}

// --- Chain ---------------------------------------------------------------------

Chain::Chain(ChainConfig config, Address admin) : config_(config), admin_(admin)
{
    if (!config_.eid.valid()) fail(Errc::InvalidArgument, "endpoint id 0 is reserved");
    if (config_.iterationBudget == 0) fail(Errc::InvalidArgument, "iteration budget must be >= 1");
    if (config_.blockTimeTicks == 0) fail(Errc::InvalidArgument, "block time must be >= 1");
    state_.endpoint = Endpoint(config_.eid, admin_);
    state_.registry = LibraryRegistry(admin_);
}

// Copies never carry the event sink: a fork must not leak into the trace.
Chain::Chain(const Chain& o)
    : config_(o.config_)
    , admin_(o.admin_)
    , height_(o.height_)
    , nextSeq_(o.nextSeq_)
    , events_(o.events_)
    , state_(o.state_)
{
}

Chain& Chain::operator=(const Chain& o)
{
    if (this != &o) {
        config_ = o.config_;
        admin_ = o.admin_;
        height_ = o.height_;
        nextSeq_ = o.nextSeq_;
        events_ = o.events_;
        state_ = o.state_;
        sink_ = nullptr;
    }
    return *this;
}

TxReceipt Chain::submit(const Address& sender, const std::function<void(TxContext&)>& body)
{
    ChainState snapshot = state_;
    const std::size_t eventMark = events_.size();
    const std::uint64_t seqMark = nextSeq_;

    TxContext tx(*this, sender);
    TxReceipt receipt;
    try {
        body(tx);
    } catch (const ProtocolError& e) {
        state_ = std::move(snapshot);
        events_.resize(eventMark);
        nextSeq_ = seqMark;
        receipt.status = e.code() == Errc::OutOfBudget ? TxStatus::OutOfBudget : TxStatus::Reverted;
        receipt.reason = e.code();
        receipt.detail = e.detail();
        receipt.budgetUsed = tx.budgetUsed();
        return receipt;
    }
    receipt.budgetUsed = tx.budgetUsed();
    if (sink_) {
        for (std::size_t i = eventMark; i < events_.size(); ++i) sink_(*this, events_[i]);
    }
    return receipt;
}

std::uint64_t Chain::advance(std::uint64_t blocks)
{
    if (blocks == 0) fail(Errc::InvalidArgument, "advance needs at least one block");
    height_ += blocks;
    nextSeq_ = 0;
    return height_;
}

std::vector<LedgerEvent> Chain::readEvents(std::uint64_t fromHeight, std::uint64_t toHeight) const
{
    if (toHeight > height_) fail(Errc::RangeAhead, std::to_string(toHeight) + " > head " + std::to_string(height_));
    if (fromHeight > toHeight) fail(Errc::InvalidArgument, "empty height range");
    std::vector<LedgerEvent> out;
    for (const auto& e : events_) {
        if (e.height > toHeight) break;
        if (e.height >= fromHeight) out.push_back(e);
    }
    return out;
}

Chain Chain::fork() const { return Chain(*this); }

std::string Chain::stateDump() const
{
    std::ostringstream os;
    os << "chain " << config_.eid.value << " height " << height_ << '\n';
    for (const auto& [path, ch] : state_.endpoint.channels()) {
        os << "channel " << path.srcEid.value << ':' << path.sender.hex() << "->" << path.dstEid.value << ':'
           << path.receiver.hex() << " out=" << ch.outboundNonce << " lazy=" << ch.lazyInboundNonce;
        for (const auto& [n, h] : ch.verified) os << ' ' << n << '=' << toHex(h);
        os << '\n';
    }
    for (const auto& [key, entry] : state_.endpoint.composeQueue()) {
        os << "compose " << key.from.hex() << "->" << key.to.hex() << ' ' << toHex(key.guid) << '#' << key.index
           << ' ' << toHex(entry.hash) << (entry.status == ComposeStatus::Stored ? " stored" : " executed") << '\n';
    }
    for (const auto& r : state_.registry.records()) os << "library " << r.ref.str() << ' ' << toString(r.kind) << '\n';
    for (const auto& [lib, store] : state_.attestations) {
        for (const auto& [key, dvns] : store.entries()) {
            os << "attest " << lib.str() << ' ' << toHex(key.first) << ' ' << toHex(key.second);
            for (WorkerId d : dvns) os << ' ' << d;
            os << '\n';
        }
    }
    for (const auto& [addr, bal] : state_.balances) os << "balance " << addr.hex() << ' ' << toString(bal) << '\n';
    for (const auto& [addr, app] : state_.apps) os << "app " << addr.hex() << ' ' << app->describe() << '\n';
    return os.str();
}

// --- Network -------------------------------------------------------------------

Chain& Network::addChain(ChainConfig config, Address admin)
{
    if (chains_.count(config.eid) != 0) fail(Errc::InvalidArgument, "duplicate endpoint id");
    const EndpointId eid = config.eid;
    return chains_.emplace(eid, Chain(config, admin)).first->second;
}

Chain& Network::chain(EndpointId eid)
{
    const auto it = chains_.find(eid);
    if (it == chains_.end()) fail(Errc::UnknownChain, std::to_string(eid.value));
    return it->second;
}

const Chain& Network::chain(EndpointId eid) const
{
    const auto it = chains_.find(eid);
    if (it == chains_.end()) fail(Errc::UnknownChain, std::to_string(eid.value));
    return it->second;
}

TxReceipt Network::submitTx(EndpointId eid, const Address& sender, const std::function<void(TxContext&)>& body)
{
    return chain(eid).submit(sender, body);
}

Network Network::fork() const { return *this; }

} // namespace omni
