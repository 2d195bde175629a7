#include "omni/harness.hpp"

#include <algorithm>
#include <cctype>

namespace omni {

std::string_view toString(PacketState s)
{
    switch (s) {
    case PacketState::Unsent: return "Unsent";
    case PacketState::Sent: return "Sent";
    case PacketState::Committable: return "Committable";
    case PacketState::Verified: return "Verified";
    case PacketState::Nilified: return "Nilified";
    case PacketState::Received: return "Received";
    }
    return "?";
}

bool RunResult::passed() const
{
    return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.passed; });
}

std::string RunResult::traceText() const
{
    std::string out;
    for (const auto& l : trace) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string RunResult::traceDigest() const
{
    const std::string text = traceText();
    return toHex(sha256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size())));
}

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> commaList(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::uint64_t num(const std::string& s)
{
    return static_cast<std::uint64_t>(parseU128(s));
}

/// `<id>@<major>.<minor>`; the parser has already validated it.
LibraryRef libFrom(const std::string& s)
{
    const auto at = s.find('@');
    const auto dot = s.find('.', at);
    return LibraryRef{static_cast<std::uint32_t>(num(s.substr(0, at))),
                      static_cast<std::uint16_t>(num(s.substr(at + 1, dot - at - 1))),
                      static_cast<std::uint16_t>(num(s.substr(dot + 1)))};
}

} // namespace

Simulation::Simulation(const Scenario& scenario, std::optional<std::uint64_t> seedOverride)
    : scenario_(scenario), rng_(seedOverride.value_or(scenario.seed))
{
    log("# seed=" + std::to_string(seedOverride.value_or(scenario.seed)));
    setup();
}

Address Simulation::addressOf(const std::string& oapp) const
{
    return oapps_.at(oapp).addr;
}

EndpointId Simulation::chainOf(const std::string& oapp) const
{
    return oapps_.at(oapp).chain;
}

Path Simulation::pathBetween(const std::string& from, const std::string& to) const
{
    return Path{chainOf(from), addressOf(from), chainOf(to), addressOf(to)};
}

WorkerId Simulation::workerId(const std::string& name) const
{
    return workerIds_.at(name);
}

TxReceipt Simulation::submit(EndpointId eid, const Address& sender, const std::function<void(TxContext&)>& body)
{
    return net_.submitTx(eid, sender, body);
}

TxReceipt Simulation::asOApp(const std::string& oapp, const std::function<void(TxContext&)>& body)
{
    return submit(chainOf(oapp), addressOf(oapp), body);
}

SecurityStack Simulation::buildStack(const StackDecl& d) const
{
    SecurityStack s;
    if (d.optIn) {
        s.isDefaultOptIn = true;
        return s;
    }
    s.sendLibrary = d.send;
    s.receiveLibrary = d.recv;
    for (const auto& r : d.required) s.requiredDvns.insert(workerId(r));
    for (const auto& o : d.optional) s.optionalDvns.insert(workerId(o));
    s.optionalThreshold = d.threshold;
    s.executor = workerId(d.executor);
    return s;
}

void Simulation::setup()
{
    const auto setupFail = [](const std::string& what, const TxReceipt& r) {
        if (!r.applied())
            throw ScenarioError(ScenarioError::Kind::Setup, 0, what + " failed: " + r.str() + " " + r.detail);
    };

    for (const auto& cfg : scenario_.chains) {
        try {
            net_.addChain(cfg, kScenarioAdmin)
                .setEventSink([this](const Chain& c, const LedgerEvent& e) { onEvent(c, e); });
        } catch (const ProtocolError& e) {
            throw ScenarioError(ScenarioError::Kind::Setup, 0, e.what());
        }
    }
    for (const auto& o : scenario_.oapps) oapps_[o.name] = o;
    for (const auto& w : scenario_.workers) workerIds_[w.name] = w.id;

    for (const auto& w : scenario_.workers) {
        switch (w.kind) {
        case WorkerDecl::Kind::Dvn: workers_.addDvn(DvnSpec{w.id, w.name, w.watch, w.latency, w.behavior}); break;
        case WorkerDecl::Kind::Executor: workers_.addExecutor(ExecutorSpec{w.id, w.name, w.behavior, false}); break;
        case WorkerDecl::Kind::User: workers_.addExecutor(ExecutorSpec{w.id, w.name, w.behavior, true}); break;
        case WorkerDecl::Kind::PreCrime: {
            PreCrimeSpec spec{w.id, w.name, w.optionWorkerId, {}};
            for (const auto& p : w.peers) spec.peers.emplace_back(chainOf(p), addressOf(p));
            workers_.addPreCrime(std::move(spec), bridgePeerInvariant());
            break;
        }
        }
    }

    for (const auto& lib : scenario_.libraries) {
        MessageLibRecord rec{lib.ref, lib.kind, 0, {}, true};
        for (const auto& a : lib.allow) rec.allowlist.insert(workerId(a));
        for (const auto& cfg : scenario_.chains) {
            if (lib.chain && *lib.chain != cfg.eid) continue;
            setupFail("library " + lib.ref.str(), submit(cfg.eid, kScenarioAdmin, [&](TxContext& tx) {
                          tx.registry().registerLibrary(tx.caller(), rec);
                          tx.emit(LibraryRegistered{rec.ref, std::string(toString(rec.kind))});
                      }));
        }
    }

    for (const auto& cfg : scenario_.chains)
        setupFail("fees", submit(cfg.eid, kScenarioAdmin, [&](TxContext& tx) { tx.state().fees = scenario_.fees; }));

    for (const auto& o : scenario_.oapps) {
        const auto& n = o.args.named;
        const auto get = [&](const char* k) { return n.count(k) ? parseU128(n.at(k)) : uint128{0}; };
        std::unique_ptr<OApp> app;
        if (o.kind == "bridge") {
            BridgeState s;
            s.available = get("available");
            s.locked = get("locked");
            s.minted = get("minted");
            if (n.count("peers"))
                for (const auto& p : commaList(n.at("peers"))) s.peers[chainOf(p)] = addressOf(p);
            if (n.count("compose")) s.composeTarget = addressOf(n.at("compose"));
            app = std::make_unique<BridgeApp>(s);
        } else if (o.kind == "swap") {
            SwapState s;
            s.reserveIn = get("reserve-in");
            s.reserveOut = get("reserve-out");
            if (n.count("ratio")) {
                // ratio=in:out
                const std::string& ratio = n.at("ratio");
                const auto colon = ratio.find(':');
                s.ratioDen = parseU128(ratio.substr(0, colon));
                s.ratioNum = parseU128(ratio.substr(colon + 1));
            }
            app = std::make_unique<SwapApp>(s);
        } else {
            app = n.count("abort") ? std::make_unique<RecorderApp>(fromHex(n.at("abort")))
                                   : std::make_unique<RecorderApp>();
        }
        const uint128 balance = get("balance");
        setupFail("oapp " + o.name, submit(o.chain, kScenarioAdmin, [&](TxContext& tx) {
                      tx.deploy(o.addr, app->clone());
                      if (balance > 0) tx.credit(o.addr, balance);
                  }));
    }

    for (const auto& d : scenario_.defaults)
        setupFail("default stack", submit(d.chain, kScenarioAdmin, [&](TxContext& tx) {
                      tx.endpoint().setDefaultStack(tx, d.stack.remote, buildStack(d.stack));
                  }));
    for (const auto& d : scenario_.stacks)
        setupFail("stack " + d.oapp, asOApp(d.oapp, [&](TxContext& tx) {
                      tx.endpoint().setSecurityStack(tx, tx.caller(), d.remote, buildStack(d));
                  }));
    for (const auto& [eid, quirk] : scenario_.quirks)
        setupFail("quirk", submit(eid, kScenarioAdmin, [&](TxContext& tx) {
                      tx.endpoint().quirks().skipWithoutNonceCheck = true;
                  }));

    // Genesis configuration becomes effective at height 1.
    for (auto& [eid, chain] : net_.chains()) chain.advance(1);
}

void Simulation::onEvent(const Chain& chain, const LedgerEvent& ev)
{
    log(std::to_string(ev.height) + " " + std::to_string(ev.seq) + " CHAIN=" + std::to_string(chain.eid().value) +
        " " + formatEvent(ev.event));
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, PacketSent>) {
                const auto& h = e.packet.header;
                auto& last = lastSentNonce_[h.path];
                if (h.nonce != last + 1)
                    gapViolations_.push_back("nonce " + std::to_string(h.nonce) + " sent after " +
                                             std::to_string(last));
                last = std::max(last, h.nonce);
                sent_[{h.path, h.nonce}] = e.packet;
            } else if constexpr (std::is_same_v<T, PacketDelivered>) {
                ++deliveries_[{e.path, e.nonce}];
                ++deliveredPerPath_[e.path];
            } else if constexpr (std::is_same_v<T, PacketCleared>) {
                resolved_[{e.path, e.nonce}] = "cleared";
            } else if constexpr (std::is_same_v<T, PacketSkipped>) {
                resolved_[{e.path, e.nonce}] = "skipped";
            } else if constexpr (std::is_same_v<T, PacketBurned>) {
                resolved_[{e.path, e.nonce}] = "burned";
            } else if constexpr (std::is_same_v<T, ComposeSent>) {
                composeMessages_[e.key] = e.message;
            } else if constexpr (std::is_same_v<T, ComposeDelivered>) {
                ++composeRuns_[e.key];
            }
        },
        ev.event);
}

const Packet* Simulation::sentPacket(const Path& path, std::uint64_t nonce) const
{
    const auto it = sent_.find({path, nonce});
    return it == sent_.end() ? nullptr : &it->second;
}

std::uint64_t Simulation::deliveredCount(const Path& path) const
{
    const auto it = deliveredPerPath_.find(path);
    return it == deliveredPerPath_.end() ? 0 : it->second;
}

PacketState Simulation::packetState(const Path& path, std::uint64_t nonce) const
{
    const Chain& src = net_.chain(path.srcEid);
    const auto* out = src.state().endpoint.channel(path);
    if (nonce == 0 || out == nullptr || nonce > out->outboundNonce) return PacketState::Unsent;

    const Chain& dst = net_.chain(path.dstEid);
    if (const auto* in = dst.state().endpoint.channel(path)) {
        const auto it = in->verified.find(nonce);
        if (it != in->verified.end()) return it->second == kNilHash ? PacketState::Nilified : PacketState::Verified;
        if (nonce <= in->lazyInboundNonce) return PacketState::Received;
    }

    const Packet* p = sentPacket(path, nonce);
    if (p == nullptr) return PacketState::Sent;
    const auto lib = selectReceiveLibrary(dst, p->header);
    const auto* stack = dst.state().endpoint.resolveStack(path.receiver, path.srcEid, dst.height());
    if (!lib || stack == nullptr) return PacketState::Sent;
    const auto* rec = dst.state().registry.find(*lib);
    if (rec == nullptr || rec->kind != LibKind::Uln) return PacketState::Sent;
    static const AttestationStore kNoAttestations;
    const auto store = dst.state().attestations.find(*lib);
    const AttestationStore& att = store == dst.state().attestations.end() ? kNoAttestations : store->second;
    return committable(att, p->header, payloadHash(p->header.guid, p->payload), UlnConfigView::of(*stack))
               ? PacketState::Committable
               : PacketState::Sent;
}

Path Simulation::eventPath(const ScenarioEvent& ev) const
{
    return pathBetween(ev.args.named.at("from"), ev.args.named.at("to"));
}

Hash32 Simulation::chooseHash(const ScenarioEvent& ev, const Path& path, std::uint64_t nonce) const
{
    const auto& n = ev.args.named;
    const std::string mode = n.count("hash") ? n.at("hash") : "stored";
    const Packet* p = sentPacket(path, nonce);
    const Hash32 honest = p ? payloadHash(p->header.guid, p->payload) : Hash32{};
    if (mode == "honest") return honest;
    if (mode == "wrong") return equivocate(honest);
    if (mode == "nil") return kNilHash;
    if (mode == "stored") {
        if (const auto* ch = net_.chain(path.dstEid).state().endpoint.channel(path)) {
            const auto it = ch->verified.find(nonce);
            if (it != ch->verified.end()) return it->second;
        }
        return honest;
    }
    return hashFromHex(mode);
}

Bytes Simulation::chooseMessage(const ScenarioEvent& ev, const Path& path, std::uint64_t nonce) const
{
    const Packet* p = sentPacket(path, nonce);
    Bytes msg = p ? p->payload : Bytes{};
    if (ev.args.has("payload") && ev.args.named.at("payload") == "wrong") msg.push_back(0x00);
    return msg;
}

std::vector<const BridgeState*> Simulation::bridges() const
{
    std::vector<const BridgeState*> out;
    for (const auto& [name, o] : oapps_) {
        if (o.kind != "bridge") continue;
        const auto& apps = net_.chain(o.chain).state().apps;
        const auto it = apps.find(o.addr);
        if (it == apps.end()) continue;
        if (const auto* b = dynamic_cast<const BridgeApp*>(it->second.get())) out.push_back(&b->state());
    }
    return out;
}

TxReceipt Simulation::execute(const ScenarioEvent& ev, std::uint64_t tick)
{
    const auto& n = ev.args.named;
    const auto& pos = ev.args.positional;
    const std::string& v = ev.verb;
    TxReceipt r;
    bool logged = false;
    const auto note = [&](const TxReceipt& rc) {
        log(std::to_string(tick) + " CMD " + v + " " + ev.rest + " receipt=" + rc.str());
        logged = true;
    };
    const auto missingPacket = [&](const Path& path, std::uint64_t nonce) -> const Packet* {
        const Packet* p = sentPacket(path, nonce);
        if (p == nullptr) {
            r = TxReceipt{TxStatus::Reverted, Errc::InvalidArgument, "no such sent packet", 0};
        }
        return p;
    };

    if (v == "send") {
        const std::string& from = pos.at(0);
        const std::string& to = n.at("to");
        const Bytes options = n.count("options") ? fromHex(n.at("options")) : Bytes{};
        const std::uint64_t count = n.count("count") ? num(n.at("count")) : 1;
        for (std::uint64_t i = 0; i < count; ++i) {
            Bytes payload;
            const std::string spec = n.count("payload") ? n.at("payload") : "";
            if (spec.rfind("rand:", 0) == 0) {
                const auto len = num(spec.substr(5));
                for (std::uint64_t k = 0; k < len; ++k) payload.push_back(static_cast<std::uint8_t>(rng_() & 0xff));
            } else if (!spec.empty()) {
                payload = fromHex(spec);
            }
            r = asOApp(from, [&](TxContext& tx) {
                tx.endpoint().send(tx, chainOf(to), addressOf(to), payload, options);
            });
            note(r);
        }
    } else if (v == "bridge" || v == "forge") {
        const std::string& from = pos.at(0);
        const EndpointId dst = chainOf(n.at("to"));
        const uint128 amount = parseU128(n.at("amount"));
        const bool compose = n.count("compose") && n.at("compose") == "1";
        const Bytes options = n.count("options") ? fromHex(n.at("options")) : Bytes{};
        const Address to = addressOf(n.at("to"));
        r = asOApp(from, [&](TxContext& tx) {
            auto& app = dynamic_cast<BridgeApp&>(tx.app(tx.caller()));
            if (v == "bridge") {
                app.bridgeSend(tx, dst, amount, compose, options);
            } else {
                // Compromised sender: a mint instruction with no matching lock.
                tx.emit(AppEvent{tx.caller(), "Forged", "amount=" + toString(amount)});
                tx.endpoint().send(tx, dst, to, encodeBridgeMessage({amount, compose}), options);
            }
        });
    } else if (v == "advance") {
        const EndpointId eid{static_cast<std::uint32_t>(num(pos.at(0)))};
        net_.chain(eid).advance(n.count("blocks") ? num(n.at("blocks")) : num(pos.at(1)));
    } else if (v == "fault") {
        workers_.applyFaults({FaultEntry{tick, n.at("worker"), Behavior::parse(n.at("behavior"))}}, tick,
                             [this](const std::string& l) { log(l); });
        logged = true;
    } else if (v == "recvlib") {
        const EndpointId remote{static_cast<std::uint32_t>(num(n.at("remote")))};
        const LibraryRef lib = libFrom(n.at("lib"));
        const std::uint64_t grace = num(n.at("grace"));
        r = asOApp(pos.at(0), [&](TxContext& tx) {
            tx.endpoint().setReceiveLibraryWithGrace(tx, tx.caller(), remote, lib, grace);
        });
    } else if (v == "sendlib") {
        const EndpointId remote{static_cast<std::uint32_t>(num(n.at("remote")))};
        const LibraryRef lib = libFrom(n.at("lib"));
        r = asOApp(pos.at(0), [&](TxContext& tx) {
            const auto* cur = tx.endpoint().resolveStack(tx.caller(), remote, kUnbounded);
            if (cur == nullptr) fail(Errc::NoSendLibrary, "no stack to update");
            SecurityStack next = *cur;
            next.isDefaultOptIn = false;
            next.sendLibrary = lib;
            tx.endpoint().setSecurityStack(tx, tx.caller(), remote, next);
        });
    } else if (v == "stack") {
        const StackDecl& d = *ev.stack;
        r = asOApp(d.oapp, [&](TxContext& tx) {
            tx.endpoint().setSecurityStack(tx, tx.caller(), d.remote, buildStack(d));
        });
    } else if (v == "skip" || v == "clear" || v == "nilify" || v == "burn") {
        const Path path = eventPath(ev);
        const std::uint64_t nonce = num(n.at("nonce"));
        if (v == "skip") {
            r = asOApp(n.at("to"), [&](TxContext& tx) { tx.endpoint().skip(tx, path, nonce); });
        } else if (v == "clear") {
            if (missingPacket(path, nonce) != nullptr) {
                const Bytes msg = chooseMessage(ev, path, nonce);
                const Hash32 guid = computeGuid(nonce, path);
                r = asOApp(n.at("to"), [&](TxContext& tx) { tx.endpoint().clear(tx, path, nonce, guid, msg); });
            }
        } else {
            const Hash32 h = chooseHash(ev, path, nonce);
            r = asOApp(n.at("to"), [&](TxContext& tx) {
                if (v == "nilify")
                    tx.endpoint().nilify(tx, path, nonce, h);
                else
                    tx.endpoint().burn(tx, path, nonce, h);
            });
        }
    } else if (v == "deliver") {
        const Path path = eventPath(ev);
        const std::uint64_t nonce = num(n.at("nonce"));
        if (missingPacket(path, nonce) != nullptr) {
            const Bytes msg = chooseMessage(ev, path, nonce);
            const Hash32 guid = computeGuid(nonce, path);
            const Address actor = n.count("by") ? workerAddress(workerId(n.at("by"))) : kUserActor;
            r = submit(path.dstEid, actor,
                       [&](TxContext& tx) { tx.endpoint().lzReceive(tx, path, nonce, guid, msg, {}); });
        }
    } else if (v == "attest" || v == "commit") {
        const Path path = eventPath(ev);
        const std::uint64_t nonce = num(n.at("nonce"));
        if (const Packet* p = missingPacket(path, nonce)) {
            const Chain& dst = net_.chain(path.dstEid);
            std::optional<LibraryRef> lib;
            if (n.count("lib")) {
                lib = libFrom(n.at("lib"));
            } else {
                lib = selectReceiveLibrary(dst, p->header);
            }
            const Hash32 honest = payloadHash(p->header.guid, p->payload);
            Hash32 h = honest;
            if (n.count("hash") && n.at("hash") != "honest" && n.at("hash") != "stored")
                h = n.at("hash") == "wrong" ? equivocate(honest) : n.at("hash") == "nil" ? kNilHash : hashFromHex(n.at("hash"));
            if (!lib) {
                r = TxReceipt{TxStatus::Reverted, Errc::UnknownLibrary, "no receive library for packet", 0};
            } else if (v == "attest") {
                const WorkerId id = workerId(pos.at(0));
                r = submit(path.dstEid, workerAddress(id),
                           [&](TxContext& tx) { dvnVerify(tx, *lib, id, p->header, h); });
            } else {
                r = submit(path.dstEid, kUserActor, [&](TxContext& tx) {
                    if (commitIfReady(tx, *lib, p->header, h) == CommitOutcome::NotReady)
                        fail(Errc::InvalidArgument, "quorum not met");
                });
            }
        }
    } else if (v == "compose") {
        const Path path = eventPath(ev);
        const std::uint64_t nonce = num(n.at("nonce"));
        const ComposeKey key{path.receiver, addressOf(pos.at(0)), computeGuid(nonce, path),
                             static_cast<std::uint16_t>(n.count("index") ? num(n.at("index")) : 0)};
        const auto msg = composeMessages_.find(key);
        const Bytes message = msg == composeMessages_.end() ? Bytes{} : msg->second;
        r = submit(chainOf(pos.at(0)), kUserActor, [&](TxContext& tx) {
            tx.endpoint().lzCompose(tx, key.from, key.to, key.guid, key.index, message, {});
        });
    } else if (v == "topup") {
        const uint128 amount = parseU128(n.at("amount"));
        const Address addr = addressOf(pos.at(0));
        r = submit(chainOf(pos.at(0)), kScenarioAdmin,
                   [&](TxContext& tx) { dynamic_cast<SwapApp&>(tx.app(addr)).topUp(amount); });
    }

    if (!logged) note(r);
    lastReceipt_ = r;
    return r;
}

AssertionResult Simulation::evaluate(const ScenarioEvent& ev, std::uint64_t tick)
{
    AssertionResult a;
    a.tick = tick;
    a.line = ev.line;
    a.text = ev.rest;
    const auto& n = ev.args.named;
    const std::string& p = ev.args.positional.at(0);
    const auto expectNum = [&](uint128 actual) {
        a.passed = actual == parseU128(n.at("is"));
        a.detail = "actual=" + toString(actual);
    };

    if (p == "state") {
        const PacketState s = packetState(eventPath(ev), num(n.at("nonce")));
        a.passed = lower(std::string(toString(s))) == lower(n.at("is"));
        a.detail = "actual=" + std::string(toString(s));
    } else if (p == "delivered-count") {
        expectNum(deliveredCount(eventPath(ev)));
    } else if (p == "lazy" || p == "inbound") {
        const Path path = eventPath(ev);
        const auto& ep = net_.chain(path.dstEid).state().endpoint;
        const auto* ch = ep.channel(path);
        expectNum(p == "lazy" ? (ch ? ch->lazyInboundNonce : 0) : ep.getInboundNonce(path));
    } else if (p == "balance") {
        const std::string& target = ev.args.positional.at(1);
        const auto dot = target.find('.');
        const std::string base = target.substr(0, dot);
        uint128 actual = 0;
        if (oapps_.count(base) != 0) {
            const OAppDecl& o = oapps_.at(base);
            const Chain& c = net_.chain(n.count("chain") ? EndpointId{static_cast<std::uint32_t>(num(n.at("chain")))}
                                                         : o.chain);
            if (dot == std::string::npos) {
                const auto it = c.state().balances.find(o.addr);
                actual = it == c.state().balances.end() ? 0 : it->second;
            } else {
                const auto app = c.state().apps.find(o.addr);
                const auto f = app == c.state().apps.end() ? std::nullopt : app->second->field(target.substr(dot + 1));
                if (!f) {
                    a.passed = false;
                    a.detail = "no field " + target;
                    goto done;
                }
                actual = *f;
            }
        } else {
            const Address addr = workerAddress(workerId(base));
            for (const auto& [eid, c] : net_.chains()) {
                if (n.count("chain") && eid.value != num(n.at("chain"))) continue;
                const auto it = c.state().balances.find(addr);
                if (it != c.state().balances.end()) actual += it->second;
            }
        }
        expectNum(actual);
    } else if (p == "trace-contains") {
        const auto sp = ev.rest.find_first_of(" \t");
        std::string needle = ev.rest.substr(sp);
        needle = needle.substr(needle.find_first_not_of(" \t"));
        a.passed = std::any_of(result_.trace.begin(), result_.trace.end(),
                               [&](const std::string& l) { return l.find(needle) != std::string::npos; });
        a.detail = a.passed ? "" : "not found";
    } else if (p == "invariant-holds") {
        const BridgeTotals t = bridgeTotals(bridges());
        a.passed = t.minted <= t.locked;
        a.detail = "minted=" + toString(t.minted) + " locked=" + toString(t.locked);
    } else if (p == "watch") {
        a.detail = checkWatch(ev.args.positional.at(1));
        a.passed = a.detail.empty();
    } else if (p == "compose") {
        const Path path = eventPath(ev);
        const ComposeKey key{path.receiver, addressOf(ev.args.positional.at(1)), computeGuid(num(n.at("nonce")), path),
                             static_cast<std::uint16_t>(n.count("index") ? num(n.at("index")) : 0)};
        const auto* entry = net_.chain(chainOf(ev.args.positional.at(1))).state().endpoint.compose(key);
        const std::string actual =
            entry == nullptr ? "none" : entry->status == ComposeStatus::Stored ? "stored" : "executed";
        a.passed = actual == n.at("is");
        a.detail = "actual=" + actual;
    } else if (p == "receipt") {
        const std::string actual = lower(lastReceipt_.str());
        std::string want = lower(n.at("is"));
        if (want == "out-of-budget") want = "outofbudget";
        a.passed = actual.rfind(want, 0) == 0;
        a.detail = "actual=" + lastReceipt_.str();
    } else if (p == "fate") {
        const Path path = eventPath(ev);
        const std::uint64_t nonce = num(n.at("nonce"));
        std::string actual = "open";
        if (deliveries_.count({path, nonce}))
            actual = "delivered";
        else if (const auto it = resolved_.find({path, nonce}); it != resolved_.end())
            actual = it->second;
        a.passed = actual == n.at("is");
        a.detail = "actual=" + actual;
    } else if (p == "height") {
        expectNum(net_.chain(EndpointId{static_cast<std::uint32_t>(num(ev.args.positional.at(1)))}).height());
    }

done:
    log(std::to_string(tick) + " ASSERT " + (a.passed ? "PASS" : "FAIL") + " line=" + std::to_string(a.line) + " " +
        a.text + (a.passed ? "" : " (" + a.detail + ")"));
    result_.assertions.push_back(a);
    return a;
}

std::string Simulation::checkWatch(const std::string& watch) const
{
    if (watch == "lossless") {
        for (const auto& [eid, chain] : net_.chains()) {
            for (const auto& [path, ch] : chain.state().endpoint.channels()) {
                if (path.dstEid != eid) continue;
                for (std::uint64_t m = 1; m <= ch.lazyInboundNonce; ++m) {
                    if (deliveries_.count({path, m}) || resolved_.count({path, m})) continue;
                    const auto it = ch.verified.find(m);
                    if (it != ch.verified.end() && it->second != kNilHash) continue;
                    return "nonce " + std::to_string(m) + " on channel " + std::to_string(path.srcEid.value) + ">" +
                           std::to_string(path.dstEid.value) + " passed by inbound nonce " +
                           std::to_string(ch.lazyInboundNonce) + " without delivery";
                }
            }
        }
        return {};
    }
    if (watch == "exactly-once") {
        for (const auto& [key, count] : deliveries_)
            if (count > 1) return "nonce " + std::to_string(key.second) + " delivered " + std::to_string(count) + " times";
        for (const auto& [key, count] : composeRuns_)
            if (count > 1) return "compose index " + std::to_string(key.index) + " executed " + std::to_string(count) + " times";
        return {};
    }
    if (watch == "gapless") return gapViolations_.empty() ? std::string() : gapViolations_.front();
    if (watch == "invariant-holds") {
        const BridgeTotals t = bridgeTotals(bridges());
        if (t.minted <= t.locked) return {};
        return "minted " + toString(t.minted) + " exceeds locked " + toString(t.locked);
    }
    return "unknown watch " + watch;
}

void Simulation::runTick(std::uint64_t tick)
{
    const auto& tl = scenario_.timeline;
    while (nextEvent_ < tl.size() && tl[nextEvent_].tick <= tick) {
        const ScenarioEvent& ev = tl[nextEvent_++];
        if (ev.verb == "assert")
            evaluate(ev, tick);
        else
            execute(ev, tick);
    }
    for (auto& [eid, chain] : net_.chains())
        if (tick % chain.config().blockTimeTicks == 0) chain.advance(1);
    workers_.step(net_, tick, [this](const std::string& l) { log(l); });

    for (const auto& w : scenario_.watches) {
        if (failedWatches_.count(w)) continue;
        const std::string why = checkWatch(w);
        if (why.empty()) continue;
        failedWatches_.insert(w);
        log(std::to_string(tick) + " WATCH FAIL " + w + " " + why);
        result_.assertions.push_back(AssertionResult{tick, 0, "watch " + w, false, why});
    }
}

RunResult Simulation::run()
{
    const std::uint64_t ticks = scenario_.tickCount();
    for (std::uint64_t t = 0; t < ticks; ++t) runTick(t);
    return result_;
}

RunResult runScenario(std::string_view text, std::optional<std::uint64_t> seedOverride)
{
    Simulation sim(parseScenario(text), seedOverride);
    return sim.run();
}

} // namespace omni
