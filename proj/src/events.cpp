#include "omni/events.hpp"

#include <sstream>

namespace omni {

namespace {

std::string fmtPath(const Path& p)
{
    return "src=" + std::to_string(p.srcEid.value) + " sender=" + p.sender.hex() +
           " dst=" + std::to_string(p.dstEid.value) + " receiver=" + p.receiver.hex();
}

std::string fmtIds(const std::vector<WorkerId>& ids)
{
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i != 0) out += ',';
        out += std::to_string(ids[i]);
    }
    return out.empty() ? "-" : out;
}

std::string fmtKey(const ComposeKey& k)
{
    return "from=" + k.from.hex() + " to=" + k.to.hex() + " guid=" + toHex(k.guid) +
           " index=" + std::to_string(k.index);
}

struct Name {
    std::string operator()(const PacketSent&) const { return "PacketSent"; }
    std::string operator()(const PayloadVerified&) const { return "PayloadVerified"; }
    std::string operator()(const PacketDelivered&) const { return "PacketDelivered"; }
    std::string operator()(const PacketCleared&) const { return "PacketCleared"; }
    std::string operator()(const PacketSkipped&) const { return "PacketSkipped"; }
    std::string operator()(const PacketNilified&) const { return "PacketNilified"; }
    std::string operator()(const PacketBurned&) const { return "PacketBurned"; }
    std::string operator()(const ComposeSent&) const { return "ComposeSent"; }
    std::string operator()(const ComposeDelivered&) const { return "ComposeDelivered"; }
    std::string operator()(const StackConfigured&) const { return "StackConfigured"; }
    std::string operator()(const LibraryRegistered&) const { return "LibraryRegistered"; }
    std::string operator()(const PayloadAttested&) const { return "PayloadAttested"; }
    std::string operator()(const NativeDropped&) const { return "NativeDropped"; }
    std::string operator()(const AppEvent&) const { return "AppEvent"; }
};

struct Fields {
    std::string operator()(const PacketSent& e) const
    {
        const auto& h = e.packet.header;
        return "version=" + std::to_string(h.version) + " nonce=" + std::to_string(h.nonce) + " " +
               fmtPath(h.path) + " guid=" + toHex(h.guid) + " lib=" + e.library.str() +
               " dvns=" + fmtIds(e.dvns) + " executor=" + std::to_string(e.executor) +
               " fee=" + toString(e.fee) + " payload=" + toHex(e.packet.payload) +
               " options=" + (e.options.empty() ? std::string("-") : toHex(e.options));
    }
    std::string operator()(const PayloadVerified& e) const
    {
        return fmtPath(e.path) + " nonce=" + std::to_string(e.nonce) + " hash=" + toHex(e.payloadHash) +
               " lib=" + e.library.str();
    }
    std::string operator()(const PacketDelivered& e) const
    {
        return fmtPath(e.path) + " nonce=" + std::to_string(e.nonce) + " guid=" + toHex(e.guid);
    }
    std::string operator()(const PacketCleared& e) const
    {
        return fmtPath(e.path) + " nonce=" + std::to_string(e.nonce) + " guid=" + toHex(e.guid);
    }
    std::string operator()(const PacketSkipped& e) const
    {
        return fmtPath(e.path) + " nonce=" + std::to_string(e.nonce);
    }
    std::string operator()(const PacketNilified& e) const
    {
        return fmtPath(e.path) + " nonce=" + std::to_string(e.nonce);
    }
    std::string operator()(const PacketBurned& e) const
    {
        return fmtPath(e.path) + " nonce=" + std::to_string(e.nonce);
    }
    std::string operator()(const ComposeSent& e) const
    {
        return fmtKey(e.key) + " message=" + toHex(e.message);
    }
    std::string operator()(const ComposeDelivered& e) const { return fmtKey(e.key); }
    std::string operator()(const StackConfigured& e) const
    {
        return "oapp=" + e.oapp.hex() + " remote=" + std::to_string(e.remote.value) +
               " effective=" + std::to_string(e.effectiveHeight);
    }
    std::string operator()(const LibraryRegistered& e) const
    {
        return "lib=" + e.library.str() + " kind=" + e.kind;
    }
    std::string operator()(const PayloadAttested& e) const
    {
        return "dvn=" + std::to_string(e.dvn) + " lib=" + e.library.str() + " " + fmtPath(e.path) +
               " nonce=" + std::to_string(e.nonce) + " headerHash=" + toHex(e.headerHash) +
               " payloadHash=" + toHex(e.payloadHash);
    }
    std::string operator()(const NativeDropped& e) const
    {
        return "receiver=" + e.receiver.hex() + " amount=" + toString(e.amount) +
               " gas=" + toString(e.executionGas);
    }
    std::string operator()(const AppEvent& e) const
    {
        return "app=" + e.app.hex() + " name=" + e.name + (e.detail.empty() ? "" : " " + e.detail);
    }
};

} // namespace

std::string eventName(const Event& e) { return std::visit(Name{}, e); }

std::string formatEvent(const Event& e) { return eventName(e) + " " + std::visit(Fields{}, e); }

} // namespace omni
