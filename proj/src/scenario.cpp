#include "omni/harness.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace omni {

ScenarioError::ScenarioError(Kind kind, int line, const std::string& reason)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason : reason), kind_(kind), line_(line)
{
}

std::uint64_t Scenario::tickCount() const
{
    if (ticks) return *ticks;
    return timeline.empty() ? 32 : timeline.back().tick + 32;
}

std::set<std::pair<std::string, std::string>> Scenario::paths() const
{
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& ev : timeline) {
        if (ev.verb != "send" && ev.verb != "bridge" && ev.verb != "forge") continue;
        out.emplace(ev.args.positional.at(0), ev.args.named.at("to"));
    }
    return out;
}

namespace {

using Kind = ScenarioError::Kind;

[[noreturn]] void syntax(int line, const std::string& reason)
{
    throw ScenarioError(Kind::Syntax, line, reason);
}

[[noreturn]] void unknown(int line, const std::string& id)
{
    throw ScenarioError(Kind::UnknownReference, line, "unknown reference '" + id + "'");
}

std::vector<std::string> splitList(const std::string& s, char sep)
{
    std::vector<std::string> out;
    if (s.empty() || s == "-") return out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::uint64_t number(const std::string& s, int line, const std::string& what)
{
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || p != end) syntax(line, "bad " + what + " '" + s + "'");
    return v;
}

uint128 amount(const std::string& s, int line, const std::string& what)
{
    try {
        return parseU128(s);
    } catch (const std::invalid_argument&) {
        syntax(line, "bad " + what + " '" + s + "'");
    }
}

EndpointId eidOf(const std::string& s, int line)
{
    const auto v = number(s, line, "endpoint id");
    if (v == 0 || v > std::numeric_limits<std::uint32_t>::max()) syntax(line, "endpoint id out of range: " + s);
    return EndpointId{static_cast<std::uint32_t>(v)};
}

std::uint16_t u16(const std::string& s, int line, const std::string& what)
{
    const auto v = number(s, line, what);
    if (v > 0xffff) syntax(line, what + " out of range");
    return static_cast<std::uint16_t>(v);
}

LibraryRef libRef(const std::string& s, int line)
{
    const auto at = s.find('@');
    const auto dot = s.find('.', at == std::string::npos ? 0 : at);
    if (at == std::string::npos || dot == std::string::npos) syntax(line, "library must be <id>@<major>.<minor>: " + s);
    const auto id = number(s.substr(0, at), line, "library id");
    if (id > std::numeric_limits<std::uint32_t>::max()) syntax(line, "library id out of range");
    return LibraryRef{static_cast<std::uint32_t>(id), u16(s.substr(at + 1, dot - at - 1), line, "major"),
                      u16(s.substr(dot + 1), line, "minor")};
}

Bytes hexBytes(const std::string& s, int line)
{
    try {
        return fromHex(s);
    } catch (const std::invalid_argument&) {
        syntax(line, "bad hex '" + s + "'");
    }
}

Args tokenize(std::string_view text, int line)
{
    Args a;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) {
            a.positional.push_back(tok);
            continue;
        }
        const std::string key = tok.substr(0, eq);
        if (a.named.count(key) != 0) syntax(line, "duplicate argument " + key);
        a.named[key] = tok.substr(eq + 1);
    }
    return a;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

const std::set<std::string> kVerbs = {"send",   "bridge", "forge",  "advance", "fault",  "recvlib", "sendlib",
                                      "stack",  "skip",   "clear",  "nilify",  "burn",   "deliver", "attest",
                                      "commit", "compose", "topup", "assert"};

const std::set<std::string> kPredicates = {"state",  "delivered-count", "lazy",    "inbound", "balance",
                                           "trace-contains", "invariant-holds", "compose", "receipt", "height",
                                           "watch",  "fate"};

const std::set<std::string> kWatches = {"lossless", "exactly-once", "invariant-holds", "gapless"};

class Parser {
public:
    Scenario run(std::string_view text)
    {
        std::vector<std::pair<int, std::string>> lines;
        int n = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++n;
            const auto hash = raw.find('#');
            if (hash != std::string_view::npos) raw = raw.substr(0, hash);
            std::string body = trim(raw);
            if (!body.empty()) lines.emplace_back(n, std::move(body));
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }

        for (const auto& [ln, body] : lines) declaration(ln, body);
        for (const auto& [ln, name] : deferredOApps_)
            if (oapps_.count(name) == 0) unknown(ln, name);
        for (auto& ev : s_.timeline) validateEvent(ev);
        return std::move(s_);
    }

private:
    void declaration(int line, const std::string& body)
    {
        const auto sp = body.find_first_of(" \t");
        const std::string kw = body.substr(0, sp);
        const std::string rest = sp == std::string::npos ? std::string() : trim(body.substr(sp));
        Args a = tokenize(rest, line);

        if (kw == "seed") {
            s_.seed = number(need(a, 0, line, "seed value"), line, "seed");
        } else if (kw == "ticks") {
            s_.ticks = number(need(a, 0, line, "tick count"), line, "ticks");
        } else if (kw == "chain") {
            chain(line, a);
        } else if (kw == "library") {
            library(line, a);
        } else if (kw == "fees") {
            if (a.has("dvn")) s_.fees.feePerDvn = amount(a.named["dvn"], line, "fee");
            if (a.has("executor")) s_.fees.executorFee = amount(a.named["executor"], line, "fee");
        } else if (kw == "dvn" || kw == "executor" || kw == "user" || kw == "precrime") {
            worker(line, kw, a);
        } else if (kw == "oapp") {
            oapp(line, a);
        } else if (kw == "stack") {
            s_.stacks.push_back(stack(line, a, true));
        } else if (kw == "default") {
            DefaultDecl d;
            d.chain = chainRef(line, named(a, "chain", line));
            d.stack = stack(line, a, false);
            if (d.stack.optIn) syntax(line, "a default stack cannot opt in to itself");
            s_.defaults.push_back(d);
        } else if (kw == "quirk") {
            const std::string q = need(a, 0, line, "quirk name");
            if (q != "skip-unchecked") syntax(line, "unknown quirk " + q);
            s_.quirks.emplace_back(chainRef(line, named(a, "chain", line)), q);
        } else if (kw == "watch") {
            const std::string w = need(a, 0, line, "watch name");
            if (kWatches.count(w) == 0) syntax(line, "unknown watch " + w);
            s_.watches.insert(w);
        } else if (kw == "at") {
            timeline(line, rest);
        } else {
            syntax(line, "unknown keyword '" + kw + "'");
        }
    }

    static const std::string& need(const Args& a, std::size_t i, int line, const std::string& what)
    {
        if (a.positional.size() <= i) syntax(line, "missing " + what);
        return a.positional[i];
    }

    static const std::string& named(const Args& a, const std::string& key, int line)
    {
        const auto it = a.named.find(key);
        if (it == a.named.end()) syntax(line, "missing " + key + "=");
        return it->second;
    }

    EndpointId chainRef(int line, const std::string& s)
    {
        const EndpointId e = eidOf(s, line);
        if (chains_.count(e) == 0) unknown(line, "chain " + s);
        return e;
    }

    void chain(int line, const Args& a)
    {
        ChainConfig c;
        c.eid = eidOf(need(a, 0, line, "endpoint id"), line);
        if (!chains_.insert(c.eid).second) syntax(line, "duplicate chain " + std::to_string(c.eid.value));
        for (const auto& [k, v] : a.named) {
            if (k == "budget")
                c.iterationBudget = number(v, line, "budget");
            else if (k == "maxpayload")
                c.maxPayload = number(v, line, "maxpayload");
            else if (k == "blocktime")
                c.blockTimeTicks = number(v, line, "blocktime");
            else
                syntax(line, "unknown chain argument " + k);
        }
        if (c.iterationBudget == 0) syntax(line, "budget must be >= 1");
        if (c.blockTimeTicks == 0) syntax(line, "blocktime must be >= 1");
        s_.chains.push_back(c);
    }

    void library(int line, const Args& a)
    {
        LibraryDecl d;
        const std::string& first = need(a, 0, line, "library id");
        if (first.find('@') != std::string::npos)
            d.ref = libRef(first, line);
        else
            d.ref = libRef(first + "@" + need(a, 1, line, "library version"), line);
        const std::string kind = a.has("kind") ? a.named.at("kind") : "uln";
        if (kind == "uln")
            d.kind = LibKind::Uln;
        else if (kind == "whitelist")
            d.kind = LibKind::Whitelist;
        else
            syntax(line, "unknown library kind " + kind);
        if (a.has("chain")) d.chain = chainRef(line, a.named.at("chain"));
        if (a.has("allow")) {
            d.allow = splitList(a.named.at("allow"), ',');
            for (const auto& w : d.allow)
                if (workers_.count(w) == 0) unknown(line, w);
        }
        libs_.insert(d.ref);
        s_.libraries.push_back(d);
    }

    void worker(int line, const std::string& kw, const Args& a)
    {
        WorkerDecl w;
        w.name = need(a, 0, line, "worker id");
        if (workers_.count(w.name) != 0 || oapps_.count(w.name) != 0) syntax(line, "duplicate name " + w.name);
        w.id = static_cast<WorkerId>(s_.workers.size() + 1);
        w.kind = kw == "dvn"        ? WorkerDecl::Kind::Dvn
                 : kw == "executor" ? WorkerDecl::Kind::Executor
                 : kw == "user"     ? WorkerDecl::Kind::User
                                    : WorkerDecl::Kind::PreCrime;
        for (const auto& [k, v] : a.named) {
            if (k == "watch" && w.kind == WorkerDecl::Kind::Dvn) {
                for (const auto& e : splitList(v, ',')) w.watch.insert(chainRef(line, e));
            } else if (k == "latency" && w.kind == WorkerDecl::Kind::Dvn) {
                w.latency = number(v, line, "latency");
                if (w.latency == 0) syntax(line, "latency must be >= 1");
            } else if (k == "behavior" && w.kind != WorkerDecl::Kind::PreCrime) {
                try {
                    w.behavior = Behavior::parse(v);
                } catch (const std::invalid_argument& e) {
                    syntax(line, e.what());
                }
            } else if (k == "option-id" && w.kind == WorkerDecl::Kind::PreCrime) {
                const auto id = number(v, line, "option-id");
                if (id > 0xff) syntax(line, "option-id out of range");
                w.optionWorkerId = static_cast<std::uint8_t>(id);
            } else if (k == "peers" && w.kind == WorkerDecl::Kind::PreCrime) {
                w.peers = splitList(v, ',');
                for (const auto& p : w.peers) deferredOApps_.emplace_back(line, p);
            } else {
                syntax(line, "unknown " + kw + " argument " + k);
            }
        }
        if (w.kind == WorkerDecl::Kind::PreCrime && !a.has("option-id")) {
            if (w.id > 0xff) syntax(line, "option-id required");
            w.optionWorkerId = static_cast<std::uint8_t>(w.id);
        }
        workers_[w.name] = w.kind;
        optionIds_[w.name] = w.optionWorkerId;
        s_.workers.push_back(w);
    }

    void oapp(int line, const Args& a)
    {
        OAppDecl d;
        d.name = need(a, 0, line, "oapp name");
        if (oapps_.count(d.name) != 0 || workers_.count(d.name) != 0) syntax(line, "duplicate name " + d.name);
        d.kind = a.has("kind") ? a.named.at("kind") : need(a, 1, line, "oapp kind");
        d.chain = chainRef(line, named(a, "chain", line));
        d.addr = Address::fromU64(0x1000 + s_.oapps.size() + 1);
        if (a.has("addr")) {
            try {
                d.addr = Address::fromHex(a.named.at("addr"));
            } catch (const std::invalid_argument&) {
                syntax(line, "bad addr");
            }
        }
        for (const auto& o : s_.oapps)
            if (o.addr == d.addr && o.chain == d.chain) syntax(line, "address already used on this chain");

        static const std::map<std::string, std::set<std::string>> allowed = {
            {"bridge", {"kind", "chain", "addr", "balance", "available", "locked", "minted", "peers", "compose"}},
            {"swap", {"kind", "chain", "addr", "balance", "reserve-in", "reserve-out", "ratio"}},
            {"recorder", {"kind", "chain", "addr", "balance", "abort"}},
        };
        const auto k = allowed.find(d.kind);
        if (k == allowed.end()) syntax(line, "unknown oapp kind " + d.kind);
        for (const auto& [key, v] : a.named) {
            if (k->second.count(key) == 0) syntax(line, "unknown " + d.kind + " argument " + key);
            if (key == "balance" || key == "available" || key == "locked" || key == "minted" || key == "reserve-in" ||
                key == "reserve-out")
                amount(v, line, key);
            if (key == "abort") hexBytes(v, line);
            if (key == "ratio") {
                const auto parts = splitList(v, ':');
                if (parts.size() != 2) syntax(line, "ratio must be <num>:<den>");
                if (amount(parts[1], line, "ratio") == 0) syntax(line, "zero ratio denominator");
                amount(parts[0], line, "ratio");
            }
            if (key == "peers")
                for (const auto& p : splitList(v, ',')) deferredOApps_.emplace_back(line, p);
            if (key == "compose") deferredOApps_.emplace_back(line, v);
        }
        d.args = a;
        oapps_[d.name] = s_.oapps.size();
        s_.oapps.push_back(d);
    }

    LibraryRef libDeclared(int line, const std::string& s)
    {
        const LibraryRef r = libRef(s, line);
        if (libs_.count(r) == 0) unknown(line, "library " + s);
        return r;
    }

    std::vector<std::string> dvnList(int line, const std::string& s)
    {
        auto out = splitList(s, ',');
        for (const auto& d : out) {
            const auto it = workers_.find(d);
            if (it == workers_.end()) unknown(line, d);
            if (it->second != WorkerDecl::Kind::Dvn) syntax(line, d + " is not a DVN");
        }
        return out;
    }

    StackDecl stack(int line, const Args& a, bool owned)
    {
        StackDecl d;
        std::size_t pos = 0;
        if (owned) {
            d.oapp = need(a, pos++, line, "oapp name");
            if (oapps_.count(d.oapp) == 0) unknown(line, d.oapp);
        }
        d.remote = chainRef(line, named(a, "remote", line));
        if (a.positional.size() > pos) {
            if (a.positional[pos] != "default" || !owned) syntax(line, "unexpected '" + a.positional[pos] + "'");
            d.optIn = true;
            return d;
        }
        d.send = libDeclared(line, named(a, "send", line));
        d.recv = libDeclared(line, named(a, "recv", line));
        if (a.has("required")) d.required = dvnList(line, a.named.at("required"));
        if (a.has("optional")) d.optional = dvnList(line, a.named.at("optional"));
        if (a.has("threshold")) {
            const auto t = number(a.named.at("threshold"), line, "threshold");
            if (t > 0xff) syntax(line, "threshold out of range");
            d.threshold = static_cast<std::uint8_t>(t);
        }
        d.executor = named(a, "executor", line);
        const auto ex = workers_.find(d.executor);
        if (ex == workers_.end()) unknown(line, d.executor);
        if (ex->second != WorkerDecl::Kind::Executor && ex->second != WorkerDecl::Kind::User)
            syntax(line, d.executor + " is not an executor");
        for (const auto& [k, v] : a.named) {
            static const std::set<std::string> keys = {"remote",   "send",      "recv",    "required",
                                                       "optional", "threshold", "executor", "chain"};
            if (keys.count(k) == 0) syntax(line, "unknown stack argument " + k);
        }
        return d;
    }

    void timeline(int line, const std::string& rest)
    {
        std::istringstream in(rest);
        std::string tickText, verb;
        in >> tickText >> verb;
        if (verb.empty()) syntax(line, "expected 'at <tick> <command>'");
        ScenarioEvent ev;
        ev.tick = number(tickText, line, "tick");
        if (!s_.timeline.empty() && ev.tick < s_.timeline.back().tick) syntax(line, "timeline ticks must not decrease");
        if (kVerbs.count(verb) == 0) syntax(line, "unknown command '" + verb + "'");
        ev.verb = verb;
        std::string tail;
        std::getline(in, tail);
        ev.rest = trim(tail);
        ev.args = tokenize(ev.rest, line);
        ev.line = line;
        s_.timeline.push_back(std::move(ev));
    }

    // --- timeline validation (after all declarations are known) ----------

    const OAppDecl& oappRef(int line, const std::string& name, const char* kind = nullptr)
    {
        const auto it = oapps_.find(name);
        if (it == oapps_.end()) unknown(line, name);
        const OAppDecl& d = s_.oapps[it->second];
        if (kind != nullptr && d.kind != kind) syntax(line, name + " is not a " + kind);
        return d;
    }

    void workerRef(int line, const std::string& name)
    {
        if (workers_.count(name) == 0) unknown(line, name);
    }

    /// Normalizes path=A>B, or from=A plus a receiver, into from= and to=.
    void pathArgs(ScenarioEvent& ev, const std::string* receiver)
    {
        auto& n = ev.args.named;
        if (n.count("path") != 0) {
            const auto parts = splitList(n["path"], '>');
            if (parts.size() != 2) syntax(ev.line, "path must be <sender>><receiver>");
            if (receiver != nullptr && *receiver != parts[1])
                syntax(ev.line, "path receiver " + parts[1] + " does not match " + *receiver);
            n["from"] = parts[0];
            n["to"] = parts[1];
            n.erase("path");
        } else {
            if (n.count("from") == 0) syntax(ev.line, "missing from= or path=");
            if (receiver != nullptr) {
                if (n.count("to") != 0 && n["to"] != *receiver) syntax(ev.line, "to= does not match receiver");
                n["to"] = *receiver;
            }
            if (n.count("to") == 0) syntax(ev.line, "missing to= or path=");
        }
        const auto& from = oappRef(ev.line, n["from"]);
        const auto& to = oappRef(ev.line, n["to"]);
        if (from.chain == to.chain) syntax(ev.line, "path endpoints are on the same chain");
    }

    void nonceArg(ScenarioEvent& ev)
    {
        number(named(ev.args, "nonce", ev.line), ev.line, "nonce");
    }

    void hashArg(ScenarioEvent& ev)
    {
        if (!ev.args.has("hash")) return;
        const std::string& h = ev.args.named["hash"];
        if (h == "stored" || h == "honest" || h == "wrong" || h == "nil") return;
        try {
            hashFromHex(h);
        } catch (const std::invalid_argument&) {
            syntax(ev.line, "hash must be stored|honest|wrong|nil|<hex32>");
        }
    }

    /// Rewrites options=<spec> to hex. Specs: hex, gas:<n>,
    /// drop:<gas>:<amount>:<oapp>, precrime:<worker>.
    void optionsArg(ScenarioEvent& ev)
    {
        auto& n = ev.args.named;
        if (n.count("options") == 0) return;
        const std::string spec = n["options"];
        const auto parts = splitList(spec, ':');
        MessageOptions opts;
        if (parts[0] == "gas" && parts.size() == 2) {
            opts = OptionsType1{amount(parts[1], ev.line, "gas")};
        } else if (parts[0] == "drop" && parts.size() == 4) {
            opts = OptionsType2{amount(parts[1], ev.line, "gas"), amount(parts[2], ev.line, "drop"),
                                oappRef(ev.line, parts[3]).addr};
        } else if (parts[0] == "precrime" && parts.size() == 2) {
            const auto it = workers_.find(parts[1]);
            if (it == workers_.end()) unknown(ev.line, parts[1]);
            if (it->second != WorkerDecl::Kind::PreCrime) syntax(ev.line, parts[1] + " is not a Pre-Crime worker");
            opts = OptionsType3{{WorkerOption{optionIds_[parts[1]], kPreCrimeOpType, {}}}};
        } else {
            const Bytes raw = hexBytes(spec, ev.line);
            try {
                decodeOptions(raw);
            } catch (const ProtocolError& e) {
                syntax(ev.line, std::string("bad options: ") + e.what());
            }
            n["options"] = toHex(raw);
            return;
        }
        n["options"] = toHex(encodeOptions(opts));
    }

    /// Resolves the receiver of a send-like command into to= and dst=.
    void receiverArg(ScenarioEvent& ev, const OAppDecl& sender)
    {
        auto& n = ev.args.named;
        if (n.count("to") != 0) {
            const auto& to = oappRef(ev.line, n["to"]);
            if (n.count("dst") != 0 && eidOf(n["dst"], ev.line) != to.chain) syntax(ev.line, "dst= does not match to=");
            n["dst"] = std::to_string(to.chain.value);
            return;
        }
        const EndpointId dst = chainRef(ev.line, named(ev.args, "dst", ev.line));
        if (sender.kind == "bridge" && sender.args.has("peers")) {
            for (const auto& p : splitList(sender.args.named.at("peers"), ',')) {
                if (oappRef(ev.line, p).chain == dst) {
                    n["to"] = p;
                    return;
                }
            }
        }
        std::vector<std::string> onDst;
        for (const auto& o : s_.oapps)
            if (o.chain == dst) onDst.push_back(o.name);
        if (onDst.size() != 1) syntax(ev.line, "cannot infer receiver on chain " + n["dst"] + "; add to=");
        n["to"] = onDst.front();
    }

    void validateEvent(ScenarioEvent& ev)
    {
        const int line = ev.line;
        auto& pos = ev.args.positional;
        auto& n = ev.args.named;
        const std::string& v = ev.verb;

        if (v == "send" || v == "bridge" || v == "forge") {
            const auto& sender = oappRef(line, need(ev.args, 0, line, "sender oapp"), v == "send" ? nullptr : "bridge");
            receiverArg(ev, sender);
            if (oappRef(line, n["to"]).chain == sender.chain) syntax(line, "sender and receiver share a chain");
            optionsArg(ev);
            if (v == "send") {
                if (n.count("payload") != 0) {
                    const std::string& p = n["payload"];
                    if (p.rfind("rand:", 0) == 0)
                        number(p.substr(5), line, "payload size");
                    else
                        hexBytes(p, line);
                }
                if (n.count("count") != 0 && number(n["count"], line, "count") == 0) syntax(line, "count must be >= 1");
            } else {
                amount(named(ev.args, "amount", line), line, "amount");
                if (n.count("compose") != 0 && n["compose"] != "0" && n["compose"] != "1")
                    syntax(line, "compose must be 0 or 1");
            }
        } else if (v == "advance") {
            chainRef(line, need(ev.args, 0, line, "chain"));
            if (number(n.count("blocks") ? n["blocks"] : need(ev.args, 1, line, "block count"), line, "blocks") == 0)
                syntax(line, "advance needs at least one block");
        } else if (v == "fault") {
            std::string who;
            for (const char* k : {"worker", "dvn", "executor"})
                if (n.count(k) != 0) who = n[k];
            std::size_t next = 0;
            if (who.empty()) who = need(ev.args, next++, line, "worker");
            workerRef(line, who);
            if (workers_.at(who) == WorkerDecl::Kind::PreCrime) syntax(line, who + " has no fault behavior");
            const std::string behavior = n.count("behavior") ? n["behavior"] : need(ev.args, next, line, "behavior");
            try {
                Behavior::parse(behavior);
            } catch (const std::invalid_argument& e) {
                syntax(line, e.what());
            }
            n["worker"] = who;
            n["behavior"] = behavior;
        } else if (v == "recvlib" || v == "sendlib") {
            oappRef(line, need(ev.args, 0, line, "oapp"));
            chainRef(line, named(ev.args, "remote", line));
            libDeclared(line, named(ev.args, "lib", line));
            if (v == "recvlib") number(named(ev.args, "grace", line), line, "grace");
        } else if (v == "stack") {
            ev.stack = stack(line, ev.args, true);
        } else if (v == "skip" || v == "clear" || v == "nilify" || v == "burn" || v == "deliver") {
            const std::string receiver = need(ev.args, 0, line, "receiver oapp");
            pathArgs(ev, &receiver);
            nonceArg(ev);
            hashArg(ev);
            if (n.count("by") != 0) workerRef(line, n["by"]);
        } else if (v == "attest") {
            const std::string& dvn = need(ev.args, 0, line, "dvn");
            workerRef(line, dvn);
            if (workers_.at(dvn) != WorkerDecl::Kind::Dvn) syntax(line, dvn + " is not a DVN");
            pathArgs(ev, nullptr);
            nonceArg(ev);
            hashArg(ev);
            if (n.count("lib") != 0) libDeclared(line, n["lib"]);
        } else if (v == "commit") {
            pathArgs(ev, nullptr);
            nonceArg(ev);
            hashArg(ev);
            if (n.count("lib") != 0) libDeclared(line, n["lib"]);
        } else if (v == "compose") {
            oappRef(line, need(ev.args, 0, line, "compose target"));
            pathArgs(ev, nullptr);
            nonceArg(ev);
            if (n.count("index") != 0) u16(n["index"], line, "index");
        } else if (v == "topup") {
            oappRef(line, need(ev.args, 0, line, "swap oapp"), "swap");
            amount(named(ev.args, "amount", line), line, "amount");
        } else if (v == "assert") {
            predicate(ev);
        }
        (void)pos;
    }

    void predicate(ScenarioEvent& ev)
    {
        const int line = ev.line;
        const std::string& p = need(ev.args, 0, line, "predicate");
        if (kPredicates.count(p) == 0) syntax(line, "unknown predicate '" + p + "'");
        auto& n = ev.args.named;
        if (p == "trace-contains") {
            const auto sp = ev.rest.find_first_of(" \t");
            if (sp == std::string::npos || trim(ev.rest.substr(sp)).empty()) syntax(line, "trace-contains needs text");
            return;
        }
        if (p == "invariant-holds") return;
        if (p == "watch") {
            const std::string& w = need(ev.args, 1, line, "watch name");
            if (kWatches.count(w) == 0) syntax(line, "unknown watch " + w);
            return;
        }
        named(ev.args, "is", line);
        if (p == "state" || p == "delivered-count" || p == "lazy" || p == "inbound") {
            pathArgs(ev, nullptr);
            if (p == "state") {
                nonceArg(ev);
                static const std::set<std::string> states = {"unsent",   "sent",     "committable",
                                                             "verified", "nilified", "received"};
                std::string s = n["is"];
                std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
                if (states.count(s) == 0) syntax(line, "unknown packet state " + n["is"]);
            } else {
                number(n["is"], line, "count");
            }
        } else if (p == "balance") {
            const std::string& target = need(ev.args, 1, line, "balance target");
            const auto dot = target.find('.');
            const std::string base = target.substr(0, dot);
            if (oapps_.count(base) == 0 && workers_.count(base) == 0) unknown(line, base);
            if (dot != std::string::npos && oapps_.count(base) == 0) syntax(line, "fields exist only on oapps");
            if (n.count("chain") != 0) chainRef(line, n["chain"]);
            amount(n["is"], line, "balance");
        } else if (p == "compose") {
            oappRef(line, need(ev.args, 1, line, "compose target"));
            pathArgs(ev, nullptr);
            nonceArg(ev);
            if (n.count("index") != 0) u16(n["index"], line, "index");
            const std::string& s = n["is"];
            if (s != "stored" && s != "executed" && s != "none") syntax(line, "compose state must be stored|executed|none");
        } else if (p == "fate") {
            pathArgs(ev, nullptr);
            nonceArg(ev);
            static const std::set<std::string> fates = {"open", "delivered", "skipped", "cleared", "burned"};
            if (fates.count(n["is"]) == 0) syntax(line, "fate must be open|delivered|skipped|cleared|burned");
        } else if (p == "height") {
            chainRef(line, need(ev.args, 1, line, "chain"));
            number(n["is"], line, "height");
        }
    }

    Scenario s_;
    std::set<EndpointId> chains_;
    std::set<LibraryRef> libs_;
    std::map<std::string, WorkerDecl::Kind> workers_;
    std::map<std::string, std::uint8_t> optionIds_;
    std::map<std::string, std::size_t> oapps_;
    std::vector<std::pair<int, std::string>> deferredOApps_;
};

} // namespace

Scenario parseScenario(std::string_view text)
{
    return Parser().run(text);
}

Scenario loadScenarioFile(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(ScenarioError::Kind::Syntax, 0, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseScenario(buf.str());
}

} // namespace omni
