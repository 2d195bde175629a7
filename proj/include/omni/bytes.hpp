#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace omni {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
__extension__ typedef unsigned __int128 uint128;

/// 32-byte digest (SHA-256 output, GUIDs, payload hashes).
using Hash32 = std::array<std::uint8_t, 32>;

/// Sentinel stored in a channel slot that was nilified.
inline constexpr Hash32 kNilHash = [] {
    Hash32 h{};
    for (auto& b : h) b = 0xff;
    return h;
}();

struct EndpointId {
    std::uint32_t value = 0;

    constexpr bool valid() const { return value != 0; }
    friend constexpr auto operator<=>(const EndpointId&, const EndpointId&) = default;
};

/// Fixed 32-byte account identifier. Shorter native identities are
/// left-padded with zeros.
struct Address {
    std::array<std::uint8_t, 32> bytes{};

    static Address fromU64(std::uint64_t v);
    static Address fromHex(std::string_view hex);
    std::string hex() const;
    bool isZero() const;

    friend auto operator<=>(const Address&, const Address&) = default;
};

std::string toHex(ByteView data);
inline std::string toHex(const Hash32& h) { return toHex(ByteView(h)); }

/// Parses an even-length hex string, with or without a 0x prefix.
/// Throws std::invalid_argument on malformed input.
Bytes fromHex(std::string_view hex);
Hash32 hashFromHex(std::string_view hex);

Bytes toBytes(std::string_view s);

std::string toString(uint128 v);
/// Throws std::invalid_argument on non-digits or overflow.
uint128 parseU128(std::string_view s);

// Big-endian helpers.
void putU8(Bytes& out, std::uint8_t v);
void putU16(Bytes& out, std::uint16_t v);
void putU32(Bytes& out, std::uint32_t v);
void putU64(Bytes& out, std::uint64_t v);
void putU128(Bytes& out, uint128 v);
void putBytes(Bytes& out, ByteView v);

std::uint16_t getU16(ByteView in);
std::uint32_t getU32(ByteView in);
std::uint64_t getU64(ByteView in);
uint128 getU128(ByteView in);

} // namespace omni
