#include "omni/error.hpp"

namespace omni {

std::string_view toString(Errc e)
{
    switch (e) {
    case Errc::TooShort: return "TooShort";
    case Errc::GuidMismatch: return "GuidMismatch";
    case Errc::UnknownType: return "UnknownType";
    case Errc::Truncated: return "Truncated";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::NoSendLibrary: return "NoSendLibrary";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::NotReceiveLibrary: return "NotReceiveLibrary";
    case Errc::StalePacket: return "StalePacket";
    case Errc::NoReceiveStack: return "NoReceiveStack";
    case Errc::Censorship: return "Censorship";
    case Errc::HashMismatch: return "HashMismatch";
    case Errc::AlreadyDelivered: return "AlreadyDelivered";
    case Errc::Nilified: return "Nilified";
    case Errc::NotReceiver: return "NotReceiver";
    case Errc::WrongNonce: return "WrongNonce";
    case Errc::NoEntry: return "NoEntry";
    case Errc::NonceAhead: return "NonceAhead";
    case Errc::NotOwner: return "NotOwner";
    case Errc::InvalidStack: return "InvalidStack";
    case Errc::UnknownLibrary: return "UnknownLibrary";
    case Errc::DuplicateCompose: return "DuplicateCompose";
    case Errc::NoSuchCompose: return "NoSuchCompose";
    case Errc::AlreadyExecuted: return "AlreadyExecuted";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::InvalidNonce: return "InvalidNonce";
    case Errc::WrongEndpoint: return "WrongEndpoint";
    case Errc::NotInCallback: return "NotInCallback";
    case Errc::NotAdmin: return "NotAdmin";
    case Errc::DuplicateVersion: return "DuplicateVersion";
    case Errc::InsufficientBalance: return "InsufficientBalance";
    case Errc::DuplicateAttestation: return "DuplicateAttestation";
    case Errc::NotWhitelisted: return "NotWhitelisted";
    case Errc::WrongLibraryKind: return "WrongLibraryKind";
    case Errc::OutOfBudget: return "OutOfBudget";
    case Errc::UnknownChain: return "UnknownChain";
    case Errc::RangeAhead: return "RangeAhead";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::UnknownApp: return "UnknownApp";
    case Errc::InsufficientFunds: return "InsufficientFunds";
    case Errc::MalformedPayload: return "MalformedPayload";
    case Errc::InsufficientReserves: return "InsufficientReserves";
    case Errc::CallbackAbort: return "CallbackAbort";
    }
    return "Unknown";
}

ProtocolError::ProtocolError(Errc code, std::string detail)
    : std::runtime_error(detail.empty() ? std::string(toString(code))
                                        : std::string(toString(code)) + ": " + detail)
    , code_(code)
    , detail_(std::move(detail))
{
}

} // namespace omni
