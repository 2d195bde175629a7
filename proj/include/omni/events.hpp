#pragma once

#include "omni/codec.hpp"
#include "omni/stack.hpp"

#include <string>
#include <variant>
#include <vector>

namespace omni {

struct ComposeKey {
    Address from;
    Address to;
    Hash32 guid{};
    std::uint16_t index = 0;

    friend auto operator<=>(const ComposeKey&, const ComposeKey&) = default;
};

// Ledger events. These are the only surface offchain workers observe.

struct PacketSent {
    Packet packet;
    Bytes options;
    LibraryRef library;
    std::vector<WorkerId> dvns;
    WorkerId executor = 0;
    uint128 fee = 0;
};

struct PayloadVerified {
    Path path;
    std::uint64_t nonce = 0;
    Hash32 payloadHash{};
    LibraryRef library;
};

struct PacketDelivered {
    Path path;
    std::uint64_t nonce = 0;
    Hash32 guid{};
};

struct PacketCleared {
    Path path;
    std::uint64_t nonce = 0;
    Hash32 guid{};
};

struct PacketSkipped {
    Path path;
    std::uint64_t nonce = 0;
};

struct PacketNilified {
    Path path;
    std::uint64_t nonce = 0;
};

struct PacketBurned {
    Path path;
    std::uint64_t nonce = 0;
};

struct ComposeSent {
    ComposeKey key;
    Bytes message;
};

struct ComposeDelivered {
    ComposeKey key;
};

struct StackConfigured {
    Address oapp;
    EndpointId remote;
    std::uint64_t effectiveHeight = 0;
};

struct LibraryRegistered {
    LibraryRef library;
    std::string kind;
};

struct PayloadAttested {
    WorkerId dvn = 0;
    LibraryRef library;
    Path path;
    std::uint64_t nonce = 0;
    Hash32 headerHash{};
    Hash32 payloadHash{};
};

struct NativeDropped {
    Address receiver;
    uint128 amount = 0;
    uint128 executionGas = 0;
};

struct AppEvent {
    Address app;
    std::string name;
    std::string detail;
};

using Event = std::variant<PacketSent, PayloadVerified, PacketDelivered, PacketCleared, PacketSkipped,
                           PacketNilified, PacketBurned, ComposeSent, ComposeDelivered, StackConfigured,
                           LibraryRegistered, PayloadAttested, NativeDropped, AppEvent>;

std::string eventName(const Event& e);

/// `NAME k=v ...` with hex-encoded hashes and addresses.
std::string formatEvent(const Event& e);

} // namespace omni
