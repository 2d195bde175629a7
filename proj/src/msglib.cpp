#include "omni/msglib.hpp"

#include "omni/chain.hpp"
#include "omni/error.hpp"

#include <algorithm>

namespace omni {

std::string_view toString(LibKind k)
{
    switch (k) {
    case LibKind::Uln: return "uln";
    case LibKind::Whitelist: return "whitelist";
    case LibKind::Custom: return "custom";
    }
    return "?";
}

void LibraryRegistry::registerLibrary(const Address& caller, MessageLibRecord record)
{
    if (caller != admin_) fail(Errc::NotAdmin);
    if (find(record.ref) != nullptr) fail(Errc::DuplicateVersion, record.ref.str());
    record.frozen = true;
    records_.push_back(std::move(record));
}

const MessageLibRecord* LibraryRegistry::find(const LibraryRef& ref) const
{
    const auto it = std::find_if(records_.begin(), records_.end(),
                                 [&](const MessageLibRecord& r) { return r.ref == ref; });
    return it == records_.end() ? nullptr : &*it;
}

const MessageLibRecord& LibraryRegistry::require(const LibraryRef& ref) const
{
    const auto* r = find(ref);
    if (r == nullptr) fail(Errc::UnknownLibrary, ref.str());
    return *r;
}

bool AttestationStore::add(const Hash32& headerHash, const Hash32& payloadHash, WorkerId dvn)
{
    return entries_[{headerHash, payloadHash}].insert(dvn).second;
}

const std::set<WorkerId>& AttestationStore::attesters(const Hash32& headerHash, const Hash32& payloadHash) const
{
    static const std::set<WorkerId> kNone;
    const auto it = entries_.find({headerHash, payloadHash});
    return it == entries_.end() ? kNone : it->second;
}

UlnConfigView UlnConfigView::of(const SecurityStack& s)
{
    return UlnConfigView{s.requiredDvns, s.optionalDvns, s.optionalThreshold};
}

bool committable(const std::set<WorkerId>& attesters, const UlnConfigView& cfg)
{
    const bool requiredMet = std::includes(attesters.begin(), attesters.end(), cfg.required.begin(),
                                           cfg.required.end());
    if (!requiredMet) return false;
    std::size_t optionalCount = 0;
    for (WorkerId id : cfg.optional) optionalCount += attesters.count(id);
    return optionalCount >= cfg.optionalThreshold;
}

bool committable(const AttestationStore& store, const PacketHeader& header, const Hash32& payloadHash,
                 const UlnConfigView& cfg)
{
    return committable(store.attesters(headerHash(header), payloadHash), cfg);
}

uint128 FeeSchedule::quote(const SecurityStack& s) const
{
    const auto dvns = static_cast<uint128>(s.requiredDvns.size() + s.optionalDvns.size());
    return feePerDvn * dvns + executorFee;
}

Address workerAddress(WorkerId id)
{
    Address a = Address::fromU64(id);
    a.bytes[0] = 0x77;   // keeps worker accounts disjoint from small app addresses
    return a;
}

EmittedJob sendSide(TxContext& tx, const MessageLibRecord& lib, const Packet& packet, const Bytes& options,
                    const SecurityStack& stack)
{
    EmittedJob job;
    job.dvns.assign(stack.requiredDvns.begin(), stack.requiredDvns.end());
    job.dvns.insert(job.dvns.end(), stack.optionalDvns.begin(), stack.optionalDvns.end());
    std::sort(job.dvns.begin(), job.dvns.end());
    job.executor = stack.executor;

    const FeeSchedule& fees = tx.state().fees;
    job.fee = fees.quote(stack);
    if (job.fee > 0) {
        tx.debit(packet.header.path.sender, job.fee);
        for (WorkerId d : job.dvns) tx.credit(workerAddress(d), fees.feePerDvn);
        tx.credit(workerAddress(job.executor), fees.executorFee);
    }

    tx.emit(PacketSent{packet, options, lib.ref, job.dvns, job.executor, job.fee});
    return job;
}

void dvnVerify(TxContext& tx, const LibraryRef& lib, WorkerId dvn, const PacketHeader& header,
               const Hash32& payloadHash)
{
    const auto& record = tx.registry().require(lib);
    if (record.kind != LibKind::Uln) fail(Errc::WrongLibraryKind, lib.str());
    const Hash32 hh = headerHash(header);
    if (!tx.attestations(lib).add(hh, payloadHash, dvn))
        fail(Errc::DuplicateAttestation, "dvn " + std::to_string(dvn));
    tx.emit(PayloadAttested{dvn, lib, header.path, header.nonce, hh, payloadHash});
}

CommitOutcome commitIfReady(TxContext& tx, const LibraryRef& lib, const PacketHeader& header,
                            const Hash32& payloadHash)
{
    const auto& record = tx.registry().require(lib);
    if (record.kind != LibKind::Uln) fail(Errc::WrongLibraryKind, lib.str());
    const SecurityStack* stack =
        tx.endpoint().resolveStack(header.path.receiver, header.path.srcEid, tx.height());
    if (stack == nullptr) fail(Errc::NoReceiveStack);
    if (!committable(tx.attestations(lib), header, payloadHash, UlnConfigView::of(*stack)))
        return CommitOutcome::NotReady;
    tx.endpoint().commitVerification(tx, lib, header, payloadHash);
    return CommitOutcome::Committed;
}

void whitelistVerify(TxContext& tx, const LibraryRef& lib, WorkerId caller, const PacketHeader& header,
                     const Hash32& payloadHash)
{
    const auto& record = tx.registry().require(lib);
    if (record.kind != LibKind::Whitelist) fail(Errc::WrongLibraryKind, lib.str());
    if (record.allowlist.count(caller) == 0) fail(Errc::NotWhitelisted, std::to_string(caller));
    tx.endpoint().commitVerification(tx, lib, header, payloadHash);
}

} // namespace omni
