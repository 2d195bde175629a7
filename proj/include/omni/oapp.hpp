#pragma once

#include "omni/bytes.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace omni {

class TxContext;

struct Origin {
    EndpointId srcEid;
    Address sender;
    std::uint64_t nonce = 0;
};

/// Application contract living in a chain's state. Callbacks abort by
/// throwing ProtocolError, which rolls back the enclosing transaction.
class OApp {
public:
    virtual ~OApp() = default;

    virtual std::unique_ptr<OApp> clone() const = 0;
    virtual std::string_view kind() const = 0;
    /// Deterministic dump of the contract state.
    virtual std::string describe() const = 0;

    virtual void lzReceive(TxContext& tx, const Origin& origin, const Hash32& guid, ByteView message,
                           ByteView extraData) = 0;
    /// Default aborts: apps that do not accept composes reject them.
    virtual void lzCompose(TxContext& tx, const Address& from, const Hash32& guid, std::uint16_t index,
                           ByteView message, ByteView extraData);

    /// Named numeric field for assertions, e.g. "minted".
    virtual std::optional<uint128> field(std::string_view name) const;
};

/// Owning, deep-copying handle so chain state stays a value type.
class AppHandle {
public:
    AppHandle() = default;
    explicit AppHandle(std::unique_ptr<OApp> app) : app_(std::move(app)) {}
    AppHandle(const AppHandle& o) : app_(o.app_ ? o.app_->clone() : nullptr) {}
    AppHandle& operator=(const AppHandle& o)
    {
        if (this != &o) app_ = o.app_ ? o.app_->clone() : nullptr;
        return *this;
    }
    AppHandle(AppHandle&&) noexcept = default;
    AppHandle& operator=(AppHandle&&) noexcept = default;

    OApp* get() const { return app_.get(); }
    OApp* operator->() const { return app_.get(); }
    OApp& operator*() const { return *app_; }

private:
    std::unique_ptr<OApp> app_;
};

} // namespace omni
