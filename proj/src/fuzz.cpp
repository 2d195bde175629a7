#include "omni/fuzz.hpp"

#include "omni/harness.hpp"

#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

namespace omni {

std::string FuzzReport::summary() const
{
    std::ostringstream out;
    out << "schedules=" << schedules << " plain=" << plainSchedules << " operations=" << operations
        << " violations=" << violations;
    for (const auto& [op, count] : opCounts) out << " " << op << "=" << count;
    if (firstFailingSchedule) out << "\nfirst failure in schedule " << *firstFailingSchedule << ": " << firstFailure;
    return out.str();
}

namespace {

enum class Slot { None, Honest, Wrong, Nil };
enum class Fate { Open, Delivered, Skipped, Cleared, Burned };

const char* fateName(Fate f)
{
    switch (f) {
    case Fate::Open: return "open";
    case Fate::Delivered: return "delivered";
    case Fate::Skipped: return "skipped";
    case Fate::Cleared: return "cleared";
    case Fate::Burned: return "burned";
    }
    return "?";
}

const char* hashName(Slot s)
{
    return s == Slot::Honest ? "honest" : s == Slot::Wrong ? "wrong" : "nil";
}

/// Per-nonce reference channel. Every rule is evaluated from scratch over
/// the whole nonce range; nothing is cached between operations.
struct Model {
    std::uint32_t nonces = 0;
    std::uint32_t sent = 0;
    std::vector<Slot> slot;
    std::vector<Fate> fate;
    std::set<std::tuple<std::uint32_t, bool, std::uint32_t>> attested;   // nonce, wrong, dvn
    std::set<std::uint32_t> required;
    std::set<std::uint32_t> optional;
    std::uint32_t threshold = 0;

    explicit Model(std::uint32_t n) : nonces(n), slot(n + 2, Slot::None), fate(n + 2, Fate::Open) {}

    std::uint32_t lazy() const
    {
        std::uint32_t l = 0;
        for (std::uint32_t i = 1; i < fate.size(); ++i)
            if (fate[i] == Fate::Delivered || fate[i] == Fate::Skipped || fate[i] == Fate::Cleared) l = i;
        return l;
    }

    std::uint32_t inbound() const
    {
        std::uint32_t i = lazy();
        while (i + 1 < slot.size() && (slot[i + 1] == Slot::Honest || slot[i + 1] == Slot::Wrong)) ++i;
        return i;
    }

    bool quorum(std::uint32_t n, bool wrong) const
    {
        for (auto d : required)
            if (attested.count({n, wrong, d}) == 0) return false;
        std::uint32_t opt = 0;
        for (auto d : optional) opt += attested.count({n, wrong, d}) ? 1 : 0;
        return opt >= threshold;
    }

    bool send()
    {
        if (sent >= nonces) return false;
        ++sent;
        return true;
    }

    bool attest(std::uint32_t dvn, std::uint32_t n, bool wrong)
    {
        return attested.insert({n, wrong, dvn}).second;
    }

    bool commit(std::uint32_t n, bool wrong)
    {
        if (!quorum(n, wrong) || n <= lazy()) return false;
        slot[n] = wrong ? Slot::Wrong : Slot::Honest;
        return true;
    }

    bool deliverable(std::uint32_t n, bool correctPayload) const
    {
        if (n > lazy()) {
            for (std::uint32_t m = lazy() + 1; m < n; ++m)
                if (slot[m] == Slot::None || slot[m] == Slot::Nil) return false;
        }
        return slot[n] == Slot::Honest && correctPayload;
    }

    bool deliver(std::uint32_t n, bool correctPayload, Fate as)
    {
        if (!deliverable(n, correctPayload)) return false;
        slot[n] = Slot::None;
        fate[n] = as;
        return true;
    }

    bool skip(std::uint32_t n)
    {
        if (n != inbound() + 1) return false;
        slot[n] = Slot::None;
        fate[n] = Fate::Skipped;
        return true;
    }

    bool nilify(std::uint32_t n, Slot expected)
    {
        if (n <= lazy() || slot[n] == Slot::None || slot[n] == Slot::Nil || slot[n] != expected) return false;
        slot[n] = Slot::Nil;
        return true;
    }

    bool burn(std::uint32_t n, Slot expected)
    {
        if (n > lazy() || slot[n] == Slot::None || slot[n] != expected) return false;
        slot[n] = Slot::None;
        fate[n] = Fate::Burned;
        return true;
    }

    std::string state(std::uint32_t n) const
    {
        if (n > sent) return "Unsent";
        if (slot[n] == Slot::Nil) return "Nilified";
        if (slot[n] != Slot::None) return "Verified";
        if (n <= lazy()) return "Received";
        return quorum(n, false) ? "Committable" : "Sent";
    }
};

/// Strict in-order channel for honest schedules: nonce n can only ever be
/// delivered once all of 1..n had an honest commit accepted.
class InOrderOracle {
public:
    InOrderOracle(std::set<std::uint32_t> required, std::set<std::uint32_t> optional, std::uint32_t threshold)
        : required_(std::move(required)), optional_(std::move(optional)), threshold_(threshold)
    {
    }

    void attest(std::uint32_t dvn, std::uint32_t n) { seen_[n].insert(dvn); }

    void commit(std::uint32_t n)
    {
        const auto& who = seen_[n];
        for (auto d : required_)
            if (who.count(d) == 0) return;
        std::uint32_t opt = 0;
        for (auto d : optional_) opt += who.count(d);
        if (opt >= threshold_) committed_.insert(n);
    }

    std::set<std::uint32_t> delivered(std::uint32_t sent) const
    {
        std::set<std::uint32_t> out;
        for (std::uint32_t n = 1; n <= sent && committed_.count(n); ++n) out.insert(n);
        return out;
    }

private:
    std::set<std::uint32_t> required_;
    std::set<std::uint32_t> optional_;
    std::uint32_t threshold_;
    std::map<std::uint32_t, std::set<std::uint32_t>> seen_;
    std::set<std::uint32_t> committed_;
};

struct Generated {
    std::string text;
    bool plain = false;
    std::uint64_t operations = 0;
    std::map<std::string, std::uint64_t> ops;
    std::string oracleMismatch;
};

std::string dvnList(const std::set<std::uint32_t>& ids)
{
    if (ids.empty()) return "-";
    std::string out;
    for (auto id : ids) out += (out.empty() ? "D" : ",D") + std::to_string(id);
    return out;
}

Generated generate(const FuzzConfig& cfg, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    // Plain modulo keeps the stream identical across standard libraries.
    const auto below = [&](std::uint64_t n) { return n == 0 ? 0 : rng() % n; };
    const auto chance = [&](unsigned pct) { return below(100) < pct; };

    const std::uint32_t nonces = 1 + static_cast<std::uint32_t>(below(std::max<std::uint32_t>(cfg.maxNonces, 1)));
    const std::uint32_t dvns = 1 + static_cast<std::uint32_t>(below(std::max<std::uint32_t>(cfg.maxDvns, 1)));

    Model model(nonces);
    for (std::uint32_t d = 1; d <= dvns; ++d) (chance(50) ? model.required : model.optional).insert(d);
    model.threshold = static_cast<std::uint32_t>(below(model.optional.size() + 1));

    Generated g;
    g.plain = chance(30);
    InOrderOracle inOrder(model.required, model.optional, model.threshold);

    std::ostringstream s;
    s << "# channel schedule " << index << " (fuzz seed " << cfg.seed << ")\n";
    s << "seed " << cfg.seed << "\n";
    s << "chain 1\nchain 2\n";
    s << "library 1@1.0 kind=uln\n";
    for (std::uint32_t d = 1; d <= dvns; ++d) s << "dvn D" << d << " behavior=crashed\n";
    s << "executor E1 behavior=crashed\n";
    s << "oapp S kind=recorder chain=1\n";
    s << "oapp R kind=recorder chain=2\n";
    const std::string stackArgs = " send=1@1.0 recv=1@1.0 required=" + dvnList(model.required) +
                                  " optional=" + dvnList(model.optional) +
                                  " threshold=" + std::to_string(model.threshold) + " executor=E1\n";
    s << "stack S remote=2" << stackArgs;
    s << "stack R remote=1" << stackArgs;
    if (cfg.mutantSkipUnchecked) s << "quirk skip-unchecked chain=2\n";
    s << "watch lossless\nwatch exactly-once\nwatch gapless\n";

    std::uint64_t tick = 0;
    const auto op = [&](const std::string& name, const std::string& line, bool expectOk) {
        s << "at " << tick << " " << line << "\n";
        s << "at " << tick << " assert receipt is=" << (expectOk ? "applied" : "reverted") << "\n";
        ++tick;
        ++g.operations;
        ++g.ops[name];
    };
    const auto path = [&](std::uint32_t n) { return " path=S>R nonce=" + std::to_string(n); };
    const auto pickSent = [&] { return 1 + static_cast<std::uint32_t>(below(model.sent)); };
    const auto pickHash = [&] {
        const auto r = below(10);
        return r < 6 ? Slot::Honest : r < 8 ? Slot::Wrong : Slot::Nil;
    };
    std::uint32_t payloadCounter = 0;
    const auto sendOp = [&] {
        std::ostringstream p;
        p << std::hex << (0x100 + ++payloadCounter);
        const bool ok = model.send();
        op("send", "send S to=R payload=" + std::string(p.str().size() % 2 ? "0" : "") + p.str(), ok);
    };

    const std::uint64_t steps = 4ull * nonces + below(4ull * nonces + 1);
    for (std::uint64_t i = 0; i < steps; ++i) {
        if (model.sent == 0 || (model.sent < nonces && chance(18))) {
            sendOp();
            continue;
        }
        const auto r = below(100);
        if (r < 30) {
            const std::uint32_t d = 1 + static_cast<std::uint32_t>(below(dvns));
            const std::uint32_t n = pickSent();
            const bool wrong = !g.plain && chance(15);
            const bool ok = model.attest(d, n, wrong);
            if (!wrong) inOrder.attest(d, n);
            op("attest", "attest D" + std::to_string(d) + path(n) + (wrong ? " hash=wrong" : " hash=honest"), ok);
        } else if (r < 50) {
            const std::uint32_t n = pickSent();
            const bool wrong = !g.plain && chance(15);
            const bool ok = model.commit(n, wrong);
            if (!wrong) inOrder.commit(n);
            op("commit", "commit" + path(n) + (wrong ? " hash=wrong" : " hash=honest"), ok);
        } else if (r < 72 || g.plain) {
            const std::uint32_t n = pickSent();
            const bool correct = !chance(12);
            const bool ok = model.deliver(n, correct, Fate::Delivered);
            op("deliver", "deliver R" + path(n) + (correct ? "" : " payload=wrong"), ok);
        } else if (r < 80) {
            std::uint32_t n = model.inbound() + 1;
            if (chance(50) || n > nonces) n = 1 + static_cast<std::uint32_t>(below(std::min(nonces, model.sent + 1)));
            const bool ok = model.skip(n);
            op("skip", "skip R" + path(n), ok);
        } else if (r < 87) {
            const std::uint32_t n = pickSent();
            const bool correct = !chance(12);
            const bool ok = model.deliver(n, correct, Fate::Cleared);
            op("clear", "clear R" + path(n) + (correct ? "" : " payload=wrong"), ok);
        } else if (r < 94) {
            const std::uint32_t n = pickSent();
            const Slot h = pickHash();
            const bool ok = model.nilify(n, h);
            op("nilify", "nilify R" + path(n) + " hash=" + hashName(h), ok);
        } else {
            const std::uint32_t n = pickSent();
            const Slot h = pickHash();
            const bool ok = model.burn(n, h);
            op("burn", "burn R" + path(n) + " hash=" + hashName(h), ok);
        }
    }

    // Drain: one ascending delivery attempt per sent nonce.
    for (std::uint32_t n = 1; n <= model.sent; ++n) {
        const bool ok = model.deliver(n, true, Fate::Delivered);
        op("drain", "deliver R" + path(n), ok);
    }

    std::uint64_t delivered = 0;
    std::set<std::uint32_t> modelDelivered;
    for (std::uint32_t n = 1; n <= nonces; ++n) {
        s << "at " << tick << " assert fate" << path(n) << " is=" << fateName(model.fate[n]) << "\n";
        s << "at " << tick << " assert state" << path(n) << " is=" << model.state(n) << "\n";
        if (model.fate[n] == Fate::Delivered) {
            ++delivered;
            modelDelivered.insert(n);
        }
    }
    s << "at " << tick << " assert delivered-count path=S>R is=" << delivered << "\n";
    s << "at " << tick << " assert balance R.deliveries is=" << delivered << "\n";
    s << "ticks " << tick + 1 << "\n";

    if (g.plain && modelDelivered != inOrder.delivered(model.sent))
        g.oracleMismatch = "reference model and in-order oracle disagree on the delivered set";

    g.text = s.str();
    return g;
}

} // namespace

std::string fuzzSchedule(const FuzzConfig& config, std::uint64_t index)
{
    return generate(config, index).text;
}

FuzzReport fuzzChannel(const FuzzConfig& config)
{
    FuzzReport report;
    for (std::uint64_t i = 0; i < config.iterations; ++i) {
        Generated g = generate(config, i);
        ++report.schedules;
        report.plainSchedules += g.plain ? 1 : 0;
        report.operations += g.operations;
        for (const auto& [name, count] : g.ops) report.opCounts[name] += count;

        std::string failure = g.oracleMismatch;
        if (failure.empty()) {
            Simulation sim(parseScenario(g.text));
            const RunResult r = sim.run();
            for (const auto& a : r.assertions) {
                if (a.passed) continue;
                failure = "tick " + std::to_string(a.tick) + ": " + a.text + " (" + a.detail + ")";
                break;
            }
        }
        if (failure.empty()) continue;
        ++report.violations;
        if (!report.firstFailingSchedule) {
            report.firstFailingSchedule = i;
            report.firstFailure = failure;
            report.counterexample = "# first failure: " + failure + "\n" + g.text;
        }
    }
    return report;
}

} // namespace omni
