#pragma once

#include "omni/bytes.hpp"

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace omni {

/// Channel identity. Every piece of channel state is keyed by it.
struct Path {
    EndpointId srcEid;
    Address sender;
    EndpointId dstEid;
    Address receiver;

    friend auto operator<=>(const Path&, const Path&) = default;
};

struct PacketHeader {
    std::uint8_t version = 0;
    std::uint64_t nonce = 0;
    Path path;
    Hash32 guid{};

    friend bool operator==(const PacketHeader&, const PacketHeader&) = default;
};

struct Packet {
    PacketHeader header;
    Bytes payload;

    friend bool operator==(const Packet&, const Packet&) = default;
};

/// version(1) | nonce(8) | srcEid(4) | sender(32) | dstEid(4) | receiver(32) | guid(32).
inline constexpr std::size_t kHeaderSize = 113;
inline constexpr std::size_t kGuidPreimageSize = 80;

Hash32 sha256(ByteView data);

/// SHA-256 over nonce(8) | srcEid(4) | sender(32) | dstEid(4) | receiver(32).
Hash32 computeGuid(std::uint64_t nonce, const Path& path);

/// SHA-256(guid | payload). This is the value DVNs attest and the
/// endpoint stores per nonce.
Hash32 payloadHash(const Hash32& guid, ByteView payload);

Bytes encodeHeader(const PacketHeader& h);
Hash32 headerHash(const PacketHeader& h);

Bytes encodePacket(const Packet& p);

/// Throws ProtocolError(TooShort | GuidMismatch).
Packet decodePacket(ByteView bytes);

Packet makePacket(std::uint8_t version, std::uint64_t nonce, const Path& path, Bytes payload);

// --- Message Options ---------------------------------------------------

struct OptionsType1 {
    uint128 executionGas = 0;
    friend bool operator==(const OptionsType1&, const OptionsType1&) = default;
};

struct OptionsType2 {
    uint128 executionGas = 0;
    uint128 nativeDropAmount = 0;
    Address receiver;
    friend bool operator==(const OptionsType2&, const OptionsType2&) = default;
};

struct WorkerOption {
    std::uint8_t workerId = 0;
    std::uint8_t opType = 0;
    Bytes command;
    friend bool operator==(const WorkerOption&, const WorkerOption&) = default;
};

struct OptionsType3 {
    std::vector<WorkerOption> entries;
    friend bool operator==(const OptionsType3&, const OptionsType3&) = default;
};

using MessageOptions = std::variant<OptionsType1, OptionsType2, OptionsType3>;

/// Throws ProtocolError(LengthMismatch) if a Type 3 command exceeds 65535 bytes.
Bytes encodeOptions(const MessageOptions& o);

/// Throws ProtocolError(UnknownType | Truncated | LengthMismatch).
MessageOptions decodeOptions(ByteView bytes);

/// Execution gas requested by Type 1 / Type 2 options, 0 otherwise.
uint128 executionGasOf(const MessageOptions& o);

} // namespace omni
