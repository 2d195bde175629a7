#include "omni/codec.hpp"

#include "omni/error.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <limits>

namespace omni {

namespace {

void putPath(Bytes& out, const Path& p)
{
    putU32(out, p.srcEid.value);
    putBytes(out, p.sender.bytes);
    putU32(out, p.dstEid.value);
    putBytes(out, p.receiver.bytes);
}

Address readAddress(ByteView in)
{
    Address a;
    std::copy_n(in.begin(), 32, a.bytes.begin());
    return a;
}

enum : std::uint8_t { kType1 = 0x01, kType2 = 0x02, kType3 = 0x03 };

} // namespace

Hash32 sha256(ByteView data)
{
    Hash32 out{};
    SHA256(data.data(), data.size(), out.data());
    return out;
}

Hash32 computeGuid(std::uint64_t nonce, const Path& path)
{
    Bytes pre;
    pre.reserve(kGuidPreimageSize);
    putU64(pre, nonce);
    putPath(pre, path);
    return sha256(pre);
}

Hash32 payloadHash(const Hash32& guid, ByteView payload)
{
    Bytes pre;
    pre.reserve(guid.size() + payload.size());
    putBytes(pre, guid);
    putBytes(pre, payload);
    return sha256(pre);
}

Bytes encodeHeader(const PacketHeader& h)
{
    Bytes out;
    out.reserve(kHeaderSize);
    putU8(out, h.version);
    putU64(out, h.nonce);
    putPath(out, h.path);
    putBytes(out, h.guid);
    return out;
}

Hash32 headerHash(const PacketHeader& h) { return sha256(encodeHeader(h)); }

Bytes encodePacket(const Packet& p)
{
    Bytes out = encodeHeader(p.header);
    putBytes(out, p.payload);
    return out;
}

Packet decodePacket(ByteView in)
{
    if (in.size() < kHeaderSize) fail(Errc::TooShort, std::to_string(in.size()) + " bytes");
    Packet p;
    auto& h = p.header;
    h.version = in[0];
    h.nonce = getU64(in.subspan(1));
    h.path.srcEid = EndpointId{getU32(in.subspan(9))};
    h.path.sender = readAddress(in.subspan(13));
    h.path.dstEid = EndpointId{getU32(in.subspan(45))};
    h.path.receiver = readAddress(in.subspan(49));
    std::copy_n(in.begin() + 49 + 32, 32, h.guid.begin());
    if (h.guid != computeGuid(h.nonce, h.path)) fail(Errc::GuidMismatch);
    p.payload.assign(in.begin() + kHeaderSize, in.end());
    return p;
}

Packet makePacket(std::uint8_t version, std::uint64_t nonce, const Path& path, Bytes payload)
{
    Packet p;
    p.header.version = version;
    p.header.nonce = nonce;
    p.header.path = path;
    p.header.guid = computeGuid(nonce, path);
    p.payload = std::move(payload);
    return p;
}

Bytes encodeOptions(const MessageOptions& o)
{
    Bytes out;
    std::visit(
        [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, OptionsType1>) {
                putU8(out, kType1);
                putU128(out, v.executionGas);
            } else if constexpr (std::is_same_v<T, OptionsType2>) {
                putU8(out, kType2);
                putU128(out, v.executionGas);
                putU128(out, v.nativeDropAmount);
                putBytes(out, v.receiver.bytes);
            } else {
                putU8(out, kType3);
                for (const auto& e : v.entries) {
                    if (e.command.size() > std::numeric_limits<std::uint16_t>::max())
                        fail(Errc::LengthMismatch, "worker command longer than 65535 bytes");
                    putU8(out, e.workerId);
                    putU8(out, e.opType);
                    putU16(out, static_cast<std::uint16_t>(e.command.size()));
                    putBytes(out, e.command);
                }
            }
        },
        o);
    return out;
}

MessageOptions decodeOptions(ByteView in)
{
    if (in.empty()) fail(Errc::Truncated, "empty options");
    const ByteView body = in.subspan(1);
    switch (in[0]) {
    case kType1: {
        if (body.size() < 16) fail(Errc::Truncated);
        if (body.size() > 16) fail(Errc::LengthMismatch, "trailing bytes");
        return OptionsType1{getU128(body)};
    }
    case kType2: {
        constexpr std::size_t kLen = 16 + 16 + 32;
        if (body.size() < kLen) fail(Errc::Truncated);
        if (body.size() > kLen) fail(Errc::LengthMismatch, "trailing bytes");
        return OptionsType2{getU128(body), getU128(body.subspan(16)), readAddress(body.subspan(32))};
    }
    case kType3: {
        OptionsType3 o;
        std::size_t pos = 0;
        while (pos < body.size()) {
            if (body.size() - pos < 4) fail(Errc::Truncated, "worker entry header");
            WorkerOption e;
            e.workerId = body[pos];
            e.opType = body[pos + 1];
            const std::size_t len = getU16(body.subspan(pos + 2));
            pos += 4;
            if (body.size() - pos < len) fail(Errc::LengthMismatch, "command length exceeds input");
            e.command.assign(body.begin() + static_cast<std::ptrdiff_t>(pos),
                             body.begin() + static_cast<std::ptrdiff_t>(pos + len));
            pos += len;
            o.entries.push_back(std::move(e));
        }
        return o;
    }
    default:
        fail(Errc::UnknownType, std::to_string(in[0]));
    }
}

uint128 executionGasOf(const MessageOptions& o)
{
    if (const auto* t1 = std::get_if<OptionsType1>(&o)) return t1->executionGas;
    if (const auto* t2 = std::get_if<OptionsType2>(&o)) return t2->executionGas;
    return 0;
}

} // namespace omni
