// Command-line front end: run scenarios, fuzz the channel, print vectors.

#include "omni/fuzz.hpp"
#include "omni/harness.hpp"
#include "omni/vectors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitScenarioError = 2;

bool writeFile(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

int runCommand(const std::string& file, const std::string& traceOut, std::optional<std::uint64_t> seed)
{
    try {
        omni::Simulation sim(omni::loadScenarioFile(file), seed);
        const omni::RunResult r = sim.run();
        if (!traceOut.empty() && !writeFile(traceOut, r.traceText())) {
            std::cerr << "cannot write " << traceOut << "\n";
            return kExitScenarioError;
        }
        std::size_t failed = 0;
        for (const auto& a : r.assertions) {
            if (a.passed) continue;
            ++failed;
            std::cout << "FAIL tick=" << a.tick << " line=" << a.line << " " << a.text << " (" << a.detail << ")\n";
        }
        std::cout << (failed == 0 ? "PASS " : "FAIL ") << r.assertions.size() - failed << "/" << r.assertions.size()
                  << " checks, trace sha256=" << r.traceDigest() << "\n";
        return failed == 0 ? kExitPass : kExitFail;
    } catch (const omni::ScenarioError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return kExitScenarioError;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Deterministic omnichain messaging simulator"};
    app.require_subcommand(1);

    std::string file, traceOut;
    std::optional<std::uint64_t> runSeed;
    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("file", file, "Scenario file")->required();
    run->add_option("--trace", traceOut, "Write the event trace to this file");
    run->add_option("--seed", runSeed, "Override the scenario seed");

    omni::FuzzConfig fuzzCfg;
    std::string mutant, fuzzOut;
    auto* fuzz = app.add_subcommand("fuzz", "Fuzz channel schedules against the reference model");
    fuzz->add_option("--iters", fuzzCfg.iterations, "Schedules to run")->capture_default_str();
    fuzz->add_option("--seed", fuzzCfg.seed, "Master seed")->capture_default_str();
    fuzz->add_option("--max-nonces", fuzzCfg.maxNonces, "Nonces per schedule")
        ->capture_default_str()
        ->check(CLI::Range(1u, 64u));
    fuzz->add_option("--max-dvns", fuzzCfg.maxDvns, "DVNs per schedule")
        ->capture_default_str()
        ->check(CLI::Range(1u, 8u));
    fuzz->add_option("--mutant", mutant, "Inject a known endpoint bug")->check(CLI::IsMember({"skip-unchecked"}));
    fuzz->add_option("--out", fuzzOut, "Write the first counterexample scenario here");

    auto* vectors = app.add_subcommand("vectors", "Print codec golden vectors as hex");

    CLI11_PARSE(app, argc, argv);

    if (*run) return runCommand(file, traceOut, runSeed);

    if (*fuzz) {
        fuzzCfg.mutantSkipUnchecked = mutant == "skip-unchecked";
        const omni::FuzzReport report = omni::fuzzChannel(fuzzCfg);
        std::cout << report.summary() << "\n";
        if (report.counterexample) {
            if (!fuzzOut.empty()) {
                if (!writeFile(fuzzOut, *report.counterexample)) {
                    std::cerr << "cannot write " << fuzzOut << "\n";
                    return kExitScenarioError;
                }
                std::cout << "counterexample written to " << fuzzOut << "\n";
            } else {
                std::cout << *report.counterexample;
            }
        }
        return report.clean() ? kExitPass : kExitFail;
    }

    if (*vectors) {
        for (const auto& [name, hex] : omni::codecVectors()) std::cout << name << " " << hex << "\n";
        return kExitPass;
    }
    return kExitScenarioError;
}
