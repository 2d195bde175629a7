#include "omni/vectors.hpp"

#include "omni/codec.hpp"
#include "omni/oapps.hpp"

namespace omni {

std::vector<std::pair<std::string, std::string>> codecVectors()
{
    const Path path{EndpointId{1}, Address::fromU64(1), EndpointId{2}, Address::fromU64(2)};
    const Hash32 guid = computeGuid(1, path);
    const Packet hi = makePacket(1, 1, path, toBytes("hi"));

    std::vector<std::pair<std::string, std::string>> v;
    v.emplace_back("sha256-zero32", toHex(sha256(Bytes(32, 0))));
    v.emplace_back("sha256-abc", toHex(sha256(toBytes("abc"))));
    v.emplace_back("guid-n1-1to2", toHex(guid));
    v.emplace_back("header-hi", toHex(encodeHeader(hi.header)));
    v.emplace_back("header-hash-hi", toHex(headerHash(hi.header)));
    v.emplace_back("packet-hi", toHex(encodePacket(hi)));
    v.emplace_back("payload-hash-hi", toHex(payloadHash(guid, toBytes("hi"))));
    v.emplace_back("payload-hash-zero-empty", toHex(payloadHash(Hash32{}, Bytes{})));
    v.emplace_back("options-type1", toHex(encodeOptions(OptionsType1{200000})));
    v.emplace_back("options-type2", toHex(encodeOptions(OptionsType2{200000, 1000, Address::fromU64(2)})));
    v.emplace_back("options-type3",
                   toHex(encodeOptions(OptionsType3{{WorkerOption{1, 1, {}}, WorkerOption{2, 5, {0x01, 0x02}}}})));
    v.emplace_back("bridge-mint-5-compose", toHex(encodeBridgeMessage({5, true})));
    return v;
}

} // namespace omni
