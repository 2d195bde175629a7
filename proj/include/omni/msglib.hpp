#pragma once

#include "omni/codec.hpp"
#include "omni/stack.hpp"

#include <map>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

namespace omni {

class TxContext;

enum class LibKind { Uln, Whitelist, Custom };

std::string_view toString(LibKind k);

struct MessageLibRecord {
    LibraryRef ref;
    LibKind kind = LibKind::Uln;
    std::uint32_t behaviorId = 0;   // Custom only
    std::set<WorkerId> allowlist;   // Whitelist only
    bool frozen = true;

    friend bool operator==(const MessageLibRecord&, const MessageLibRecord&) = default;
};

/// Append-only registry. Records are immutable once registered and can
/// never be removed, not even by the admin.
class LibraryRegistry {
public:
    LibraryRegistry() = default;
    explicit LibraryRegistry(Address admin) : admin_(admin) {}

    /// Throws NotAdmin, DuplicateVersion.
    void registerLibrary(const Address& caller, MessageLibRecord record);

    const MessageLibRecord* find(const LibraryRef& ref) const;
    /// Throws UnknownLibrary.
    const MessageLibRecord& require(const LibraryRef& ref) const;

    const std::vector<MessageLibRecord>& records() const { return records_; }
    const Address& admin() const { return admin_; }

    friend bool operator==(const LibraryRegistry&, const LibraryRegistry&) = default;

private:
    Address admin_;
    std::vector<MessageLibRecord> records_;
};

/// DVN attestations for one ULN instance, keyed by (headerHash, payloadHash)
/// so that an equivocating DVN produces a second key instead of overwriting.
class AttestationStore {
public:
    using Key = std::pair<Hash32, Hash32>;

    /// Returns false when the DVN already attested this key.
    bool add(const Hash32& headerHash, const Hash32& payloadHash, WorkerId dvn);
    const std::set<WorkerId>& attesters(const Hash32& headerHash, const Hash32& payloadHash) const;
    const std::map<Key, std::set<WorkerId>>& entries() const { return entries_; }

    friend bool operator==(const AttestationStore&, const AttestationStore&) = default;

private:
    std::map<Key, std::set<WorkerId>> entries_;
};

struct UlnConfigView {
    std::set<WorkerId> required;
    std::set<WorkerId> optional;
    std::uint8_t optionalThreshold = 0;

    static UlnConfigView of(const SecurityStack& s);
};

/// All required DVNs attested and at least `optionalThreshold` of the
/// optional ones did.
bool committable(const std::set<WorkerId>& attesters, const UlnConfigView& cfg);
bool committable(const AttestationStore& store, const PacketHeader& header, const Hash32& payloadHash,
                 const UlnConfigView& cfg);

/// Flat fee model: each assigned DVN and the executor are paid a constant.
struct FeeSchedule {
    uint128 feePerDvn = 0;
    uint128 executorFee = 0;

    uint128 quote(const SecurityStack& s) const;

    friend bool operator==(const FeeSchedule&, const FeeSchedule&) = default;
};

Address workerAddress(WorkerId id);

struct EmittedJob {
    std::vector<WorkerId> dvns;
    WorkerId executor = 0;
    uint128 fee = 0;
};

// On-chain library entry points. Each runs inside a transaction and throws
// ProtocolError to revert it.

/// Charges the sender and emits PacketSent. Throws InsufficientBalance.
EmittedJob sendSide(TxContext& tx, const MessageLibRecord& lib, const Packet& packet, const Bytes& options,
                    const SecurityStack& stack);

/// Records a DVN attestation on a ULN. Throws DuplicateAttestation,
/// UnknownLibrary, WrongLibraryKind.
void dvnVerify(TxContext& tx, const LibraryRef& lib, WorkerId dvn, const PacketHeader& header,
               const Hash32& payloadHash);

enum class CommitOutcome { Committed, NotReady };

/// Commits to the endpoint when the receiver's current ULN quorum is met.
CommitOutcome commitIfReady(TxContext& tx, const LibraryRef& lib, const PacketHeader& header,
                            const Hash32& payloadHash);

/// Prototyping library: an allowlisted worker commits directly.
void whitelistVerify(TxContext& tx, const LibraryRef& lib, WorkerId caller, const PacketHeader& header,
                     const Hash32& payloadHash);

} // namespace omni
