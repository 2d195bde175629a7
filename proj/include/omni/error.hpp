#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace omni {

enum class Errc {
    // codec
    TooShort,
    GuidMismatch,
    UnknownType,
    Truncated,
    LengthMismatch,
    // endpoint
    NoSendLibrary,
    PayloadTooLarge,
    NotReceiveLibrary,
    StalePacket,
    NoReceiveStack,
    Censorship,
    HashMismatch,
    AlreadyDelivered,
    Nilified,
    NotReceiver,
    WrongNonce,
    NoEntry,
    NonceAhead,
    NotOwner,
    InvalidStack,
    UnknownLibrary,
    DuplicateCompose,
    NoSuchCompose,
    AlreadyExecuted,
    VersionMismatch,
    InvalidNonce,
    WrongEndpoint,
    NotInCallback,
    // msglib
    NotAdmin,
    DuplicateVersion,
    InsufficientBalance,
    DuplicateAttestation,
    NotWhitelisted,
    WrongLibraryKind,
    // simchain
    OutOfBudget,
    UnknownChain,
    RangeAhead,
    InvalidArgument,
    UnknownApp,
    // oapps
    InsufficientFunds,
    MalformedPayload,
    InsufficientReserves,
    CallbackAbort,
};

std::string_view toString(Errc e);

/// Raised by every protocol operation that rejects its input. A transaction
/// that observes one of these rolls back in full.
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(Errc code, std::string detail = {});

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

[[noreturn]] inline void fail(Errc code, std::string detail = {})
{
    throw ProtocolError(code, std::move(detail));
}

} // namespace omni
