// Copyright 2026 The qecopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// qecopt command line front end.
//
//   qecopt channel   --config run.json [--out DIR] [--mode opt-all] ...
//   qecopt verify    [--inject-fault]
//
// Each experiment subcommand reads a JSON config, applies the command line
// overrides, and writes CSV tables plus manifest.json into the output
// directory. Exit status: 0 success, 1 runtime failure, 2 bad config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qecopt/qecopt.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> tiebreak_seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> out;
    std::optional<std::string> ties;
    std::vector<std::string> modes;
};

int run(const std::string& kind, const Overrides& o) {
    qecopt::json j;
    {
        std::ifstream in(o.config);
        if (!in) throw qecopt::ConfigError("--config", "cannot open '" + o.config + "'");
        try {
            in >> j;
        } catch (const qecopt::json::parse_error& e) {
            throw qecopt::ConfigError("--config", std::string("invalid JSON: ") + e.what());
        }
    }
    if (!j.is_object()) throw qecopt::ConfigError("(root)", "configuration must be a JSON object");
    auto expected = qecopt::parse_experiment_kind(kind);
    if (!j.contains("kind")) {
        j["kind"] = qecopt::to_string(expected);
    } else if (qecopt::parse_experiment_kind(j["kind"].get<std::string>()) != expected) {
        throw qecopt::ConfigError("kind", "config is '" + j["kind"].get<std::string>() + "' but the subcommand is '" +
                                              kind + "'");
    }
    if (o.seed) j["seed"] = *o.seed;
    if (o.tiebreak_seed) j["tiebreak_seed"] = *o.tiebreak_seed;
    if (o.workers) j["workers"] = *o.workers;
    if (o.out) j["output"] = *o.out;
    if (o.ties) j["ties"] = *o.ties;
    if (!o.modes.empty()) {
        j.erase("mode");
        j["modes"] = o.modes;
    }
    qecopt::ExperimentConfig cfg = qecopt::config_from_json(j);
    auto manifest = qecopt::run_experiment(cfg);
    std::printf("%s: wrote", kind.c_str());
    for (const auto& f : manifest["outputs"]) std::printf(" %s", f["file"].get<std::string>().c_str());
    std::printf(" manifest.json to %s (%.2f s)\n", cfg.output.c_str(), manifest["wall_time_seconds"].get<double>());
    return 0;
}

int run_verify(bool inject_fault, std::optional<std::uint64_t> seed, const std::vector<std::string>& codes,
               const std::vector<std::string>& suites) {
    qecopt::VerifyOptions opt;
    if (!suites.empty()) opt.suites = suites;
    opt.inject_fault = inject_fault;
    if (seed) opt.seed = *seed;
    if (!codes.empty()) opt.codes = codes;
    auto checks = qecopt::verify(opt);
    std::size_t failed = 0;
    for (const auto& c : checks) {
        if (!c.pass) ++failed;
        std::printf("%s %-12s %-36s worst=%.3g %s\n", c.pass ? "ok  " : "FAIL", c.suite.c_str(), c.subject.c_str(),
                    c.worst, c.detail.c_str());
    }
    std::printf("%zu checks, %zu failed\n", checks.size(), failed);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimized decoders for concatenated stabilizer codes"};
    app.set_version_flag("--version", std::string(qecopt::kToolVersion));
    app.require_subcommand(1);

    Overrides o;
    const std::vector<std::pair<std::string, std::string>> experiments = {
        {"channel", "effective logical channel per level"},
        {"sweep", "infidelity versus one noise parameter"},
        {"threshold", "threshold search over a grid of co-parameters"},
        {"contour", "threshold surface over two co-parameters"},
        {"twirl", "bare versus Pauli-twirled thresholds"},
        {"perturb", "robustness of pre-optimized schedules to unitary perturbations"},
    };
    std::string chosen;
    for (const auto& [name, help] : experiments) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "experiment JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--tiebreak-seed", o.tiebreak_seed, "shuffle minimum-weight ties in the syndrome table");
        sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--ties", o.ties, "level-1 tie handling")->check(CLI::IsMember({"first", "exhaustive"}));
        sub->add_option("--mode", o.modes, "decoder mode (repeatable)")
            ->check(CLI::IsMember({"symmetric", "opt-all", "opt-pauli"}));
        sub->callback([&chosen, name = name] { chosen = name; });
    }

    bool inject_fault = false;
    std::optional<std::uint64_t> verify_seed;
    std::vector<std::string> verify_codes;
    std::vector<std::string> verify_suites;
    auto* ver = app.add_subcommand("verify", "oracle, beta and closed-form self checks");
    ver->add_flag("--inject-fault", inject_fault, "corrupt a stabilizer element (negative control)");
    ver->add_option("--seed", verify_seed, "seed for the random channels");
    ver->add_option("--code", verify_codes, "restrict the oracle suite to these codes");
    ver->add_option("--suite", verify_suites, "suites to run (default all)")
        ->check(CLI::IsMember({"beta", "closed-form", "oracle"}));
    ver->callback([&chosen] { chosen = "verify"; });

    CLI11_PARSE(app, argc, argv);
    try {
        if (chosen == "verify") return run_verify(inject_fault, verify_seed, verify_codes, verify_suites);
        return run(chosen, o);
    } catch (const qecopt::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
