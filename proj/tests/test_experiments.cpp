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


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qecopt/experiments.hpp"

namespace qecopt {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("qecopt_test_" + name);
    fs::remove_all(p);
    return p;
}

json sweep_config() {
    return json::parse(R"({
        "kind": "sweep",
        "code": "steane",
        "noise": {"kind": "amplitude-phase-damping", "params": {"lambda": 0.1}},
        "grids": [{"name": "p", "start": 0.0, "stop": 0.2, "count": 5}],
        "modes": ["symmetric", "opt-all"],
        "levels": 2
    })");
}

std::string error_field(const json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

TEST(Config, ParsesAndRoundTrips) {
    ExperimentConfig c = config_from_json(sweep_config());
    EXPECT_EQ(c.kind, ExperimentKind::infidelity_sweep);
    ASSERT_EQ(c.grids.size(), 1u);
    EXPECT_EQ(c.grids[0].values.size(), 5u);
    EXPECT_DOUBLE_EQ(c.grids[0].values[4], 0.2);
    ExperimentConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, ErrorsNameTheField) {
    json j = sweep_config();
    j["levels"] = 0;
    EXPECT_EQ(error_field(j), "levels");
    j = sweep_config();
    j["code"] = "toric";
    EXPECT_EQ(error_field(j), "code");
    j = sweep_config();
    j["colour"] = 1;
    EXPECT_EQ(error_field(j), "colour");
    j = sweep_config();
    j["noise"]["kind"] = "thermal";
    EXPECT_EQ(error_field(j), "noise.kind");
    j = sweep_config();
    j["grids"][0]["name"] = "theta";
    EXPECT_EQ(error_field(j), "grids[0].name");
    j = sweep_config();
    j["kind"] = "perturb";
    EXPECT_EQ(error_field(j), "seed");
    j = sweep_config();
    j["kind"] = "contour";
    j["noise"]["swept"] = "p";
    EXPECT_EQ(error_field(j), "grids");
    j = sweep_config();
    j["ties"] = "sometimes";
    EXPECT_EQ(error_field(j), "ties");
    j = sweep_config();
    j.erase("kind");
    EXPECT_EQ(error_field(j), "kind");
}

TEST(Config, PerturbedNoiseFamily) {
    json n = json::parse(R"({"kind": "perturbed", "base": {"kind": "coherent", "params": {"phi": 1.0}, "swept": "theta"},
                             "perturbation": {"f": "sin2/10", "seed": 3, "index": 2}})");
    NoiseFamily f = noise_from_json(n);
    EXPECT_EQ(f.kind, NoiseKind::coherent);
    ASSERT_TRUE(f.perturbation.has_value());
    EXPECT_EQ(f.perturbation->index, 2u);
    NoiseFamily back = noise_from_json(noise_to_json(f));
    EXPECT_LT(back.at(0.3).local().max_abs_diff(f.at(0.3).local()), 1e-15);
    n.erase("perturbation");
    EXPECT_THROW(noise_from_json(n), ConfigError);
}

TEST(Experiments, SweepOutputsAreDeterministic) {
    ExperimentConfig c = config_from_json(sweep_config());
    const fs::path first = scratch("sweep_a");
    c.output = first.string();
    json m = run_experiment(c);
    c.output = scratch("sweep_b").string();
    c.workers = 3;
    run_experiment(c);
    std::string a = slurp(first / "sweep.csv");
    std::string b = slurp(fs::path(c.output) / "sweep.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.substr(0, a.find('\n')), "p,mode,level,infidelity,trace,status");
    EXPECT_EQ(m["outputs"][0]["rows"], 5 * 2 * 2);
    EXPECT_EQ(m["version"], kToolVersion);
    json manifest = json::parse(slurp(fs::path(c.output) / "manifest.json"));
    EXPECT_EQ(manifest["config"]["code"], "steane");
    EXPECT_TRUE(manifest.contains("wall_time_seconds"));
}

TEST(Experiments, ChannelTableHasProcessMatrix) {
    ExperimentConfig c;
    c.kind = ExperimentKind::channel;
    c.noise = NoiseFamily::make(NoiseKind::depolarizing, {{"p", 0.01}});
    c.levels = 3;
    auto out = compute_experiment(c);
    ASSERT_EQ(out.tables.size(), 1u);
    EXPECT_EQ(out.tables[0].rows.size(), 3u);
    EXPECT_EQ(out.tables[0].header.size(), 21u);
    EXPECT_EQ(out.tables[0].rows[0][5], "1");  // G_II
}

TEST(Experiments, ThresholdTables) {
    ExperimentConfig c;
    c.kind = ExperimentKind::threshold;
    c.code = "five-qubit";
    c.noise = NoiseFamily::make(NoiseKind::coherent, {{"gamma", 0.0}}, "theta");
    c.grids = {{"phi", {1.5707963267948966}}};
    c.modes = {DecoderMode::all_transversal};
    c.validate();
    auto out = compute_experiment(c);
    ASSERT_EQ(out.tables.size(), 2u);
    EXPECT_EQ(out.tables[1].name, "thresholds");
    ASSERT_EQ(out.tables[1].rows.size(), 1u);
    EXPECT_NEAR(std::stod(out.tables[1].rows[0][4]), 0.7854, 1e-3);
    EXPECT_GT(out.tables[0].rows.size(), 10u);
}

TEST(Experiments, PerturbationIsSeededAndWorkerInvariant) {
    CodeContext ctx = CodeContext::make(builtin_code("five-qubit"));
    PerturbationStudy s;
    s.base = NoiseFamily::make(NoiseKind::coherent, {{"phi", 1.5707963267948966}, {"gamma", 0.0}}, "theta");
    s.values = {0.05, 0.3};
    s.unitaries = 8;
    s.seed = 17;
    s.random_axis = true;
    auto a = perturbation_experiment(ctx, s);
    s.workers = 2;
    auto b = perturbation_experiment(ctx, s);
    ASSERT_EQ(a.size(), 2u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].perturbed_tilde, b[i].perturbed_tilde);
        EXPECT_EQ(a[i].perturbed_sym, b[i].perturbed_sym);
        EXPECT_LE(a[i].perturbed_opt, a[i].perturbed_sym + 1e-12);
    }
    s.seed = 18;
    EXPECT_NE(perturbation_experiment(ctx, s)[0].perturbed_tilde, a[0].perturbed_tilde);
}

TEST(Verify, NegativeControlIsDetected) {
    VerifyOptions opt;
    opt.suites = {"beta"};
    for (const auto& c : verify(opt)) EXPECT_TRUE(c.pass) << c.subject << ": " << c.detail;
    opt.inject_fault = true;
    std::size_t failed = 0;
    for (const auto& c : verify(opt)) failed += c.pass ? 0 : 1;
    EXPECT_GE(failed, 4u);
}

TEST(Verify, OracleSuiteOnSmallCode) {
    VerifyOptions opt;
    opt.suites = {"oracle", "closed-form"};
    opt.codes = {"bitflip-3"};
    opt.random_channels = 3;
    auto checks = verify(opt);
    EXPECT_EQ(checks.size(), 4u + 5u + 3u + 1u);
    for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.subject;
}

#ifdef QECOPT_CLI_PATH
int run_cli(const std::string& args) {
    std::string cmd = std::string(QECOPT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(Cli, ExitCodes) {
    fs::path dir = scratch("cli");
    fs::create_directories(dir);
    std::ofstream(dir / "sweep.json") << sweep_config().dump();
    json bad = sweep_config();
    bad["xi"] = -1;
    std::ofstream(dir / "bad.json") << bad.dump();

    EXPECT_EQ(run_cli("sweep --config " + (dir / "sweep.json").string() + " --out " + (dir / "out").string() +
                      " --mode symmetric"),
              0);
    EXPECT_TRUE(fs::exists(dir / "out" / "sweep.csv"));
    EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
    EXPECT_EQ(run_cli("sweep --config " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run_cli("threshold --config " + (dir / "sweep.json").string()), 2);  // kind mismatch
    EXPECT_EQ(run_cli("verify --suite beta"), 0);
    EXPECT_EQ(run_cli("verify --suite beta --inject-fault"), 1);
    EXPECT_NE(run_cli("sweep --config " + (dir / "sweep.json").string() + " --ties maybe"), 0);
}
#endif

}  // namespace
}  // namespace qecopt
