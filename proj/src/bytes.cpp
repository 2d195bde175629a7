#include "omni/bytes.hpp"

#include <algorithm>
#include <stdexcept>

namespace omni {

namespace {

int nibble(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string_view stripPrefix(std::string_view hex)
{
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    return hex;
}

} // namespace

Address Address::fromU64(std::uint64_t v)
{
    Address a;
    for (int i = 0; i < 8; ++i) a.bytes[31 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    return a;
}

Address Address::fromHex(std::string_view hex)
{
    hex = stripPrefix(hex);
    if (hex.size() > 64) throw std::invalid_argument("address longer than 32 bytes");
    std::string padded(64 - hex.size(), '0');
    padded.append(hex);
    const Bytes raw = omni::fromHex(padded);
    Address a;
    std::copy(raw.begin(), raw.end(), a.bytes.begin());
    return a;
}

std::string Address::hex() const { return toHex(ByteView(bytes)); }

bool Address::isZero() const
{
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

std::string toHex(ByteView data)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

Bytes fromHex(std::string_view hex)
{
    hex = stripPrefix(hex);
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = nibble(hex[i]);
        const int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

Hash32 hashFromHex(std::string_view hex)
{
    const Bytes raw = fromHex(hex);
    if (raw.size() != 32) throw std::invalid_argument("hash must be 32 bytes");
    Hash32 h{};
    std::copy(raw.begin(), raw.end(), h.begin());
    return h;
}

Bytes toBytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

std::string toString(uint128 v)
{
    if (v == 0) return "0";
    std::string s;
    while (v != 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

uint128 parseU128(std::string_view s)
{
    if (s.empty()) throw std::invalid_argument("empty number");
    const uint128 max = ~uint128{0};
    uint128 v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw std::invalid_argument("not a decimal number: " + std::string(s));
        const auto d = static_cast<unsigned>(c - '0');
        if (v > (max - d) / 10) throw std::invalid_argument("number overflows 128 bits");
        v = v * 10 + d;
    }
    return v;
}

void putU8(Bytes& out, std::uint8_t v) { out.push_back(v); }

void putU16(Bytes& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void putU32(Bytes& out, std::uint32_t v)
{
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void putU64(Bytes& out, std::uint64_t v)
{
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void putU128(Bytes& out, uint128 v)
{
    for (int i = 15; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void putBytes(Bytes& out, ByteView v) { out.insert(out.end(), v.begin(), v.end()); }

std::uint16_t getU16(ByteView in) { return static_cast<std::uint16_t>((in[0] << 8) | in[1]); }

std::uint32_t getU32(ByteView in)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in[i];
    return v;
}

std::uint64_t getU64(ByteView in)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
    return v;
}

uint128 getU128(ByteView in)
{
    uint128 v = 0;
    for (int i = 0; i < 16; ++i) v = (v << 8) | in[i];
    return v;
}

} // namespace omni
