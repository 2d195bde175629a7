#include "omni/workers.hpp"

#include "omni/error.hpp"
#include "omni/oapps.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace omni {

namespace {

std::uint64_t parseTick(std::string_view s)
{
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("bad tick: " + std::string(s));
    return v;
}

std::string prefix(std::uint64_t tick, const std::string& name)
{
    return std::to_string(tick) + " WORKER=" + name + " ";
}

std::string describePacket(const PacketHeader& h)
{
    return "src=" + std::to_string(h.path.srcEid.value) + " dst=" + std::to_string(h.path.dstEid.value) +
           " nonce=" + std::to_string(h.nonce);
}

bool isCommitted(const Endpoint& ep, const Path& path, std::uint64_t nonce, const Hash32& hash)
{
    const ChannelState* ch = ep.channel(path);
    if (ch == nullptr) return false;
    const auto it = ch->verified.find(nonce);
    return it != ch->verified.end() && it->second == hash;
}

bool isFinished(const Endpoint& ep, const Path& path, std::uint64_t nonce)
{
    const ChannelState* ch = ep.channel(path);
    return ch != nullptr && nonce <= ch->lazyInboundNonce && ch->verified.count(nonce) == 0;
}

bool ulnReady(const Chain& dst, const LibraryRef& lib, const PacketHeader& header, const Hash32& hash)
{
    const auto* record = dst.state().registry.find(lib);
    if (record == nullptr || record->kind != LibKind::Uln) return false;
    const SecurityStack* stack =
        dst.state().endpoint.resolveStack(header.path.receiver, header.path.srcEid, dst.height());
    if (stack == nullptr) return false;
    const auto store = dst.state().attestations.find(lib);
    if (store == dst.state().attestations.end()) return false;
    return committable(store->second, header, hash, UlnConfigView::of(*stack));
}

} // namespace

// --- behavior ------------------------------------------------------------------

BehaviorKind Behavior::at(std::uint64_t tick) const
{
    if (kind == BehaviorKind::Silent && (tick < from || tick > to)) return BehaviorKind::Honest;
    return kind;
}

Behavior Behavior::parse(std::string_view text)
{
    if (text == "honest") return {};
    if (text == "equivocate") return {BehaviorKind::Equivocate};
    if (text == "crashed") return {BehaviorKind::Crashed};
    if (text == "silent") return {BehaviorKind::Silent};
    if (text.rfind("silent:", 0) == 0) {
        const std::string_view range = text.substr(7);
        const auto dash = range.find('-');
        if (dash == std::string_view::npos) throw std::invalid_argument("silent window needs <from>-<to>");
        Behavior b{BehaviorKind::Silent, parseTick(range.substr(0, dash)), parseTick(range.substr(dash + 1))};
        if (b.from > b.to) throw std::invalid_argument("silent window is empty");
        return b;
    }
    throw std::invalid_argument("unknown behavior: " + std::string(text));
}

std::string Behavior::str() const
{
    switch (kind) {
    case BehaviorKind::Honest: return "honest";
    case BehaviorKind::Equivocate: return "equivocate";
    case BehaviorKind::Crashed: return "crashed";
    case BehaviorKind::Silent:
        if (from == 0 && to == std::numeric_limits<std::uint64_t>::max()) return "silent";
        return "silent:" + std::to_string(from) + "-" + std::to_string(to);
    }
    return "?";
}

Hash32 equivocate(const Hash32& honest)
{
    Hash32 h = honest;
    h.back() ^= 0xff;
    return h;
}

std::optional<LibraryRef> selectReceiveLibrary(const Chain& dst, const PacketHeader& header)
{
    const auto& state = dst.state();
    if (const SecurityStack* s =
            state.endpoint.resolveStack(header.path.receiver, header.path.srcEid, dst.height())) {
        if (s->receiveLibrary.major == header.version) return s->receiveLibrary;
        if (s->prevReceiveLibrary && s->prevReceiveLibrary->major == header.version) return s->prevReceiveLibrary;
    }
    const auto& records = state.registry.records();
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
        if (it->ref.major == header.version) return it->ref;
    }
    return std::nullopt;
}

std::vector<LedgerEvent> EventCursor::poll(const Chain& chain)
{
    if (chain.height() == 0) return {};
    auto& next = next_[chain.eid()];
    const std::uint64_t sealed = chain.height() - 1;
    if (next > sealed) return {};
    auto out = chain.readEvents(next, sealed);
    next = chain.height();
    return out;
}

void EventCursor::skipTo(const Chain& chain) { next_[chain.eid()] = chain.height(); }

// --- DVN -----------------------------------------------------------------------

std::size_t DvnWorker::step(Network& net, std::uint64_t tick, const WorkerLog& log)
{
    const BehaviorKind kind = spec_.behavior.at(tick);
    if (kind == BehaviorKind::Crashed) {
        pending_.clear();
        unassigned_.clear();
        for (const auto& [eid, chain] : net.chains()) cursor_.skipTo(chain);
        return 0;
    }

    for (const auto& [eid, chain] : net.chains()) {
        if (!spec_.watchedChains.empty() && spec_.watchedChains.count(eid) == 0) {
            cursor_.skipTo(chain);
            continue;
        }
        for (const auto& ev : cursor_.poll(chain)) {
            const auto* sent = std::get_if<PacketSent>(&ev.event);
            if (sent == nullptr) continue;
            if (std::find(sent->dvns.begin(), sent->dvns.end(), spec_.id) == sent->dvns.end())
                unassigned_.push_back(sent->packet);
            else
                pending_.push_back({sent->packet, tick + spec_.latencyTicks});
        }
    }
    if (kind == BehaviorKind::Silent) return 0;

    // A receiver that reconfigures its stack to include this DVN gets its
    // still-open packets verified too, not only ones sent afterwards.
    for (auto it = unassigned_.begin(); it != unassigned_.end();) {
        const PacketHeader& h = it->header;
        if (!net.has(h.path.dstEid)) {
            it = unassigned_.erase(it);
            continue;
        }
        const Chain& dst = net.chain(h.path.dstEid);
        const Endpoint& ep = dst.state().endpoint;
        if (isFinished(ep, h.path, h.nonce)) {
            it = unassigned_.erase(it);
            continue;
        }
        const SecurityStack* s = ep.resolveStack(h.path.receiver, h.path.srcEid, dst.height());
        if (s != nullptr && (s->requiredDvns.count(spec_.id) != 0 || s->optionalDvns.count(spec_.id) != 0)) {
            pending_.push_back({*it, tick + spec_.latencyTicks});
            it = unassigned_.erase(it);
        } else {
            ++it;
        }
    }

    std::size_t submitted = 0;
    std::vector<Pending> later;
    for (auto& p : pending_) {
        if (p.due > tick) {
            later.push_back(std::move(p));
            continue;
        }
        const PacketHeader& h = p.packet.header;
        if (!net.has(h.path.dstEid)) continue;
        Chain& dst = net.chain(h.path.dstEid);
        Hash32 hash = payloadHash(h.guid, p.packet.payload);
        if (kind == BehaviorKind::Equivocate) hash = equivocate(hash);

        const auto lib = selectReceiveLibrary(dst, h);
        if (!lib) {
            if (log) log(prefix(tick, spec_.name) + "ATTEST_SKIPPED " + describePacket(h) + " reason=NoLibrary");
            continue;
        }
        const auto* record = dst.state().registry.find(*lib);
        const bool whitelist = record != nullptr && record->kind == LibKind::Whitelist;
        const WorkerId id = spec_.id;
        const TxReceipt r = dst.submit(workerAddress(id), [&](TxContext& tx) {
            if (whitelist)
                whitelistVerify(tx, *lib, id, h, hash);
            else
                dvnVerify(tx, *lib, id, h, hash);
        });
        ++submitted;
        if (log)
            log(prefix(tick, spec_.name) + (whitelist ? "WHITELIST_COMMIT " : "ATTEST ") + describePacket(h) +
                " lib=" + lib->str() + " hash=" + toHex(hash) + " receipt=" + r.str());
    }
    pending_ = std::move(later);
    return submitted;
}

// --- Pre-Crime board / options ---------------------------------------------------

const PreCrimeVerdict* PreCrimeBoard::find(const Path& path, std::uint64_t nonce) const
{
    const auto it = verdicts_.find({path, nonce});
    return it == verdicts_.end() ? nullptr : &it->second;
}

bool optionsName(const Bytes& options, std::uint8_t workerId)
{
    if (options.empty()) return false;
    try {
        const MessageOptions o = decodeOptions(options);
        const auto* t3 = std::get_if<OptionsType3>(&o);
        if (t3 == nullptr) return false;
        return std::any_of(t3->entries.begin(), t3->entries.end(), [&](const WorkerOption& e) {
            return e.workerId == workerId && e.opType == kPreCrimeOpType;
        });
    } catch (const ProtocolError&) {
        return false;
    }
}

namespace {

bool guardedByPreCrime(const std::optional<MessageOptions>& o)
{
    if (!o) return false;
    const auto* t3 = std::get_if<OptionsType3>(&*o);
    if (t3 == nullptr) return false;
    return std::any_of(t3->entries.begin(), t3->entries.end(),
                       [](const WorkerOption& e) { return e.opType == kPreCrimeOpType; });
}

} // namespace

// --- executor ------------------------------------------------------------------

void ExecutorWorker::ingest(const Network& net)
{
    for (const auto& [eid, chain] : net.chains()) {
        for (const auto& ev : cursor_.poll(chain)) {
            if (const auto* sent = std::get_if<PacketSent>(&ev.event)) {
                if (!spec_.permissionless && sent->executor != spec_.id) continue;
                Tracked t{sent->packet, sent->options, std::nullopt, false};
                if (!t.options.empty()) {
                    try {
                        t.parsed = decodeOptions(t.options);
                    } catch (const ProtocolError&) {
                    }
                }
                t.guarded = !spec_.permissionless && guardedByPreCrime(t.parsed);
                const auto& h = sent->packet.header;
                tracked_[h.path][h.nonce] = std::move(t);
            } else if (const auto* cs = std::get_if<ComposeSent>(&ev.event)) {
                composes_.push_back({eid, cs->key, cs->message});
            }
        }
    }
}

std::size_t ExecutorWorker::drivePath(Network& net, std::uint64_t tick, const Path& path,
                                      std::map<std::uint64_t, Tracked>& packets, const PreCrimeBoard& board,
                                      const WorkerLog& log)
{
    if (!net.has(path.dstEid)) return 0;
    Chain& dst = net.chain(path.dstEid);
    const Address self = address();
    std::size_t submitted = 0;

    for (auto it = packets.begin(); it != packets.end();) {
        if (isFinished(dst.state().endpoint, path, it->first))
            it = packets.erase(it);
        else
            ++it;
    }

    auto blocked = [&](std::uint64_t nonce, const Tracked& t) {
        if (!t.guarded) return false;
        const PreCrimeVerdict* v = board.find(path, nonce);
        if (v == nullptr) return true;
        if (v->halt && reportedHalts_.insert({path, nonce}).second && log)
            log(prefix(tick, spec_.name) + "HALTED " + describePacket(t.packet.header));
        return v->halt;
    };

    // Commit whatever the Security Stack already allows, in any order.
    for (auto& [nonce, t] : packets) {
        if (blocked(nonce, t)) continue;
        const PacketHeader& h = t.packet.header;
        const Hash32 hash = payloadHash(h.guid, t.packet.payload);
        if (isCommitted(dst.state().endpoint, path, nonce, hash)) continue;
        const auto lib = selectReceiveLibrary(dst, h);
        if (!lib || !ulnReady(dst, *lib, h, hash)) continue;
        const TxReceipt r = dst.submit(self, [&](TxContext& tx) {
            if (commitIfReady(tx, *lib, h, hash) != CommitOutcome::Committed)
                fail(Errc::InvalidArgument, "quorum not met");
        });
        ++submitted;
        if (log) log(prefix(tick, spec_.name) + "COMMIT " + describePacket(h) + " lib=" + lib->str() + " receipt=" + r.str());
    }

    // Deliver in nonce order; stop at the first packet the channel cannot take.
    std::vector<std::uint64_t> done;
    for (auto& [nonce, t] : packets) {
        if (blocked(nonce, t)) break;
        const PacketHeader& h = t.packet.header;
        const Hash32 hash = payloadHash(h.guid, t.packet.payload);
        const Endpoint& ep = dst.state().endpoint;
        const ChannelState* ch = ep.channel(path);
        if (ch == nullptr) break;
        const auto entry = ch->verified.find(nonce);
        if (entry == ch->verified.end()) break;
        if (entry->second != hash) continue;   // NIL or a foreign hash: receiver must recover it
        if (!ep.deliverable(path, nonce)) break;

        const bool honorOptions = !spec_.permissionless;
        const TxReceipt r = dst.submit(self, [&](TxContext& tx) {
            tx.endpoint().lzReceive(tx, path, nonce, h.guid, t.packet.payload, {});
            if (!honorOptions || !t.parsed) return;
            if (const auto* o2 = std::get_if<OptionsType2>(&*t.parsed)) {
                tx.credit(o2->receiver, o2->nativeDropAmount);
                tx.emit(NativeDropped{o2->receiver, o2->nativeDropAmount, o2->executionGas});
            }
        });
        ++submitted;
        if (log) {
            std::string line = prefix(tick, spec_.name) + "DELIVER " + describePacket(h);
            if (honorOptions && t.parsed) line += " gas=" + toString(executionGasOf(*t.parsed));
            log(line + " receipt=" + r.str());
        }
        if (!r.applied()) break;
        done.push_back(nonce);
    }
    for (auto n : done) packets.erase(n);
    return submitted;
}

std::size_t ExecutorWorker::step(Network& net, std::uint64_t tick, const PreCrimeBoard& board, const WorkerLog& log)
{
    ingest(net);
    if (spec_.behavior.at(tick) != BehaviorKind::Honest && spec_.behavior.at(tick) != BehaviorKind::Equivocate)
        return 0;

    std::size_t submitted = 0;
    for (auto it = tracked_.begin(); it != tracked_.end();) {
        submitted += drivePath(net, tick, it->first, it->second, board, log);
        it = it->second.empty() ? tracked_.erase(it) : std::next(it);
    }

    std::vector<PendingCompose> keep;
    for (auto& c : composes_) {
        if (!net.has(c.chain)) continue;
        Chain& chain = net.chain(c.chain);
        const ComposeEntry* entry = chain.state().endpoint.compose(c.key);
        if (entry == nullptr || entry->status == ComposeStatus::Executed) continue;
        const TxReceipt r = chain.submit(address(), [&](TxContext& tx) {
            tx.endpoint().lzCompose(tx, c.key.from, c.key.to, c.key.guid, c.key.index, c.message, {});
        });
        ++submitted;
        if (log)
            log(prefix(tick, spec_.name) + "COMPOSE chain=" + std::to_string(c.chain.value) + " guid=" +
                toHex(c.key.guid) + " index=" + std::to_string(c.key.index) + " receipt=" + r.str());
        if (!r.applied()) keep.push_back(std::move(c));
    }
    composes_ = std::move(keep);
    return submitted;
}

// --- Pre-Crime -----------------------------------------------------------------

PeerInvariant bridgePeerInvariant()
{
    return [](const Network& fork, const PeerRef&, const std::vector<PeerRef>& peers) {
        std::vector<const BridgeState*> states;
        for (const auto& [eid, addr] : peers) {
            if (!fork.has(eid)) continue;
            const auto& apps = fork.chain(eid).state().apps;
            const auto it = apps.find(addr);
            if (it == apps.end()) continue;
            if (const auto* b = dynamic_cast<const BridgeApp*>(it->second.get())) states.push_back(&b->state());
        }
        return bridgeInvariant(states);
    };
}

std::optional<PreCrimeVerdict> PreCrimeWorker::simulate(const Network& net, const Packet& packet) const
{
    const PacketHeader& h = packet.header;
    if (!net.has(h.path.dstEid)) return std::nullopt;
    Network fork = net.fork();
    Chain& dst = fork.chain(h.path.dstEid);
    const Hash32 hash = payloadHash(h.guid, packet.payload);
    const Address self = workerAddress(spec_.id);

    if (!isCommitted(dst.state().endpoint, h.path, h.nonce, hash)) {
        const auto lib = selectReceiveLibrary(dst, h);
        if (!lib) return std::nullopt;
        const TxReceipt c = dst.submit(self, [&](TxContext& tx) {
            if (commitIfReady(tx, *lib, h, hash) != CommitOutcome::Committed)
                fail(Errc::InvalidArgument, "quorum not met");
        });
        if (!c.applied()) return std::nullopt;
    }
    const TxReceipt d = dst.submit(self, [&](TxContext& tx) {
        tx.endpoint().lzReceive(tx, h.path, h.nonce, h.guid, packet.payload, {});
    });
    if (!d.applied()) return std::nullopt;

    PreCrimeVerdict v;
    for (const auto& peer : spec_.peers) {
        if (!invariant_(fork, peer, spec_.peers)) v.violators.push_back(peer);
    }
    v.halt = !v.violators.empty();
    // Only this packet changed between the live state and the fork, so a
    // violation points at the chain that sent it.
    if (v.halt) v.suspect = h.path.srcEid;
    return v;
}

std::size_t PreCrimeWorker::step(Network& net, std::uint64_t tick, PreCrimeBoard& board, const WorkerLog& log)
{
    for (const auto& [eid, chain] : net.chains()) {
        for (const auto& ev : cursor_.poll(chain)) {
            const auto* sent = std::get_if<PacketSent>(&ev.event);
            if (sent == nullptr || !optionsName(sent->options, spec_.optionWorkerId)) continue;
            const auto& h = sent->packet.header;
            tracked_[{h.path, h.nonce}] = sent->packet;
        }
    }

    std::size_t published = 0;
    for (auto it = tracked_.begin(); it != tracked_.end();) {
        const auto& [path, nonce] = it->first;
        if (!net.has(path.dstEid) || isFinished(net.chain(path.dstEid).state().endpoint, path, nonce)) {
            it = tracked_.erase(it);
            continue;
        }
        const auto verdict = simulate(net, it->second);
        if (!verdict) {
            ++it;
            continue;
        }
        std::string line = prefix(tick, spec_.name) + (verdict->halt ? "PRECRIME_HALT " : "PRECRIME_ALLOW ") +
                           describePacket(it->second.header);
        if (verdict->halt) {
            line += " violators=";
            for (std::size_t i = 0; i < verdict->violators.size(); ++i)
                line += (i ? "," : "") + std::to_string(verdict->violators[i].first.value);
            line += " suspect=" + std::to_string(verdict->suspect.value);
        }
        if (log) log(line);
        board.publish(path, nonce, *verdict);
        ++published;
        it = tracked_.erase(it);
    }
    return published;
}

// --- worker set ----------------------------------------------------------------

namespace {

const std::string& nameOf(const std::variant<DvnWorker, ExecutorWorker, PreCrimeWorker>& w)
{
    return std::visit([](const auto& x) -> const std::string& { return x.spec().name; }, w);
}

} // namespace

void WorkerSet::addDvn(DvnSpec spec)
{
    if (has(spec.name)) throw std::invalid_argument("duplicate worker " + spec.name);
    if (spec.latencyTicks == 0) throw std::invalid_argument("DVN latency must be >= 1");
    workers_.emplace_back(DvnWorker(std::move(spec)));
}

void WorkerSet::addExecutor(ExecutorSpec spec)
{
    if (has(spec.name)) throw std::invalid_argument("duplicate worker " + spec.name);
    workers_.emplace_back(ExecutorWorker(std::move(spec)));
}

void WorkerSet::addPreCrime(PreCrimeSpec spec, PeerInvariant invariant)
{
    if (has(spec.name)) throw std::invalid_argument("duplicate worker " + spec.name);
    workers_.emplace_back(PreCrimeWorker(std::move(spec), std::move(invariant)));
}

bool WorkerSet::has(std::string_view name) const
{
    return std::any_of(workers_.begin(), workers_.end(), [&](const auto& w) { return nameOf(w) == name; });
}

void WorkerSet::setBehavior(std::string_view name, const Behavior& b)
{
    for (auto& w : workers_) {
        if (nameOf(w) != name) continue;
        if (auto* d = std::get_if<DvnWorker>(&w)) return d->setBehavior(b);
        if (auto* e = std::get_if<ExecutorWorker>(&w)) return e->setBehavior(b);
        throw std::invalid_argument("worker " + std::string(name) + " has no fault behavior");
    }
    throw std::invalid_argument("unknown worker " + std::string(name));
}

void WorkerSet::applyFaults(const FaultSchedule& schedule, std::uint64_t tick, const WorkerLog& log)
{
    for (const auto& f : schedule) {
        if (f.tick != tick) continue;
        setBehavior(f.worker, f.behavior);
        if (log) log(prefix(tick, f.worker) + "FAULT behavior=" + f.behavior.str());
    }
}

void WorkerSet::step(Network& net, std::uint64_t tick, const WorkerLog& log)
{
    for (auto& w : workers_) {
        if (auto* d = std::get_if<DvnWorker>(&w))
            d->step(net, tick, log);
        else if (auto* e = std::get_if<ExecutorWorker>(&w))
            e->step(net, tick, board_, log);
        else
            std::get<PreCrimeWorker>(w).step(net, tick, board_, log);
    }
}

void validateFaultSchedule(const FaultSchedule& schedule, const WorkerSet& workers)
{
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (i > 0 && schedule[i].tick < schedule[i - 1].tick)
            throw std::invalid_argument("fault schedule ticks decrease");
        if (!workers.has(schedule[i].worker)) throw std::invalid_argument("unknown worker " + schedule[i].worker);
    }
}

} // namespace omni
