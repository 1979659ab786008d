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

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qecopt/dense_oracle.hpp"
#include "qecopt/threshold.hpp"

namespace qecopt {

inline constexpr const char* kToolName = "qecopt";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kConfigSchema = 1;

using json = nlohmann::json;

/// Invalid configuration; the message starts with the offending field.
class ConfigError : public std::invalid_argument {
   public:
    ConfigError(const std::string& field, const std::string& what)
        : std::invalid_argument("config field '" + field + "': " + what), field_(field) {}
    const std::string& field() const { return field_; }

   private:
    std::string field_;
};

enum class ExperimentKind { channel, infidelity_sweep, threshold, contour, twirl_compare, perturbation };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::channel:
            return "channel";
        case ExperimentKind::infidelity_sweep:
            return "infidelity-sweep";
        case ExperimentKind::threshold:
            return "threshold";
        case ExperimentKind::contour:
            return "contour";
        case ExperimentKind::twirl_compare:
            return "twirl-compare";
        case ExperimentKind::perturbation:
            return "perturbation";
    }
    return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
    if (s == "channel") return ExperimentKind::channel;
    if (s == "infidelity-sweep" || s == "sweep") return ExperimentKind::infidelity_sweep;
    if (s == "threshold") return ExperimentKind::threshold;
    if (s == "contour") return ExperimentKind::contour;
    if (s == "twirl-compare" || s == "twirl") return ExperimentKind::twirl_compare;
    if (s == "perturbation" || s == "perturb") return ExperimentKind::perturbation;
    throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

/// Values of one named parameter.
struct Grid {
    std::string name;
    std::vector<double> values;
};

struct ExperimentConfig {
    int schema = kConfigSchema;
    ExperimentKind kind = ExperimentKind::channel;
    std::string code = "steane";
    std::string code_file;  // optional custom code text; overrides `code`
    NoiseFamily noise;
    std::vector<Grid> grids;
    std::vector<DecoderMode> modes{DecoderMode::symmetric};
    std::size_t levels = 1;
    double xi = 0.01;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> tiebreak_seed;  // shuffles min-weight ties
    TieMode ties = TieMode::first;
    std::string output = "out";
    std::size_t workers = 1;

    // threshold search
    std::size_t max_levels = 25;
    double scan_step = 0.05;
    double granularity = 1e-4;
    std::vector<double> refine_steps{0.01, 0.001, 0.0001};
    std::optional<double> upper;

    // perturbation study
    std::size_t unitaries = 100;
    std::string perturbation_f = "sin2/10";
    bool random_axis = false;

    bool randomized() const { return kind == ExperimentKind::perturbation || noise.kind == NoiseKind::random; }

    void validate() const {
        if (schema != kConfigSchema) {
            throw ConfigError("schema", "unsupported schema " + std::to_string(schema));
        }
        if (code_file.empty()) {
            const auto& names = builtin_code_names();
            if (std::find(names.begin(), names.end(), code) == names.end()) {
                throw ConfigError("code", "unknown code '" + code + "'");
            }
        }
        if (modes.empty()) throw ConfigError("modes", "at least one decoder mode is required");
        if (levels < 1) throw ConfigError("levels", "must be at least 1");
        if (!(xi > 0)) throw ConfigError("xi", "must be positive");
        if (workers < 1) throw ConfigError("workers", "must be at least 1");
        if (max_levels < 1) throw ConfigError("max_levels", "must be at least 1");
        if (!(scan_step > 0)) throw ConfigError("scan_step", "must be positive");
        if (!(granularity > 0)) throw ConfigError("granularity", "must be positive");
        for (double s : refine_steps) {
            if (!(s > 0)) throw ConfigError("refine_steps", "steps must be positive");
        }
        for (std::size_t g = 0; g < grids.size(); ++g) {
            if (grids[g].values.empty()) {
                throw ConfigError("grids[" + std::to_string(g) + "]", "grid '" + grids[g].name + "' is empty");
            }
            auto names = noise.parameter_names();
            if (std::find(names.begin(), names.end(), grids[g].name) == names.end()) {
                throw ConfigError("grids[" + std::to_string(g) + "].name",
                                  "'" + grids[g].name + "' is not a parameter of " + to_string(noise.kind));
            }
        }
        if (randomized() && !seed) {
            throw ConfigError("seed", "required for randomized experiments");
        }
        switch (kind) {
            case ExperimentKind::channel:
                break;
            case ExperimentKind::infidelity_sweep:
            case ExperimentKind::perturbation:
                if (grids.size() != 1) throw ConfigError("grids", "needs exactly one grid (the swept parameter)");
                break;
            case ExperimentKind::threshold:
                if (noise.swept.empty()) throw ConfigError("noise.swept", "threshold search needs a swept parameter");
                break;
            case ExperimentKind::contour:
                if (noise.swept.empty()) throw ConfigError("noise.swept", "threshold search needs a swept parameter");
                if (grids.size() != 2) throw ConfigError("grids", "contour needs exactly two co-parameter grids");
                break;
            case ExperimentKind::twirl_compare:
                if (noise.kind != NoiseKind::coherent) throw ConfigError("noise.kind", "twirl-compare needs coherent");
                if (grids.size() != 1 || grids[0].name != "phi") throw ConfigError("grids", "needs one 'phi' grid");
                break;
        }
        if (kind == ExperimentKind::perturbation) {
            if (unitaries < 1) throw ConfigError("unitaries", "must be at least 1");
            Perturbation p;
            p.f = perturbation_f;
            for (double v : grids[0].values) {
                double w = 0;
                try {
                    w = p.weight(v);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError("perturbation_f", e.what());
                }
                if (!(w >= 0 && w <= 1)) {
                    throw ConfigError("grids[0]", "f(" + std::to_string(v) + ") is outside [0,1]");
                }
            }
        }
    }
};

// ---------------------------------------------------------------------------
// JSON

inline json noise_to_json(const NoiseFamily& f) {
    json j;
    j["kind"] = to_string(f.kind);
    j["params"] = json::object();
    for (const auto& [k, v] : f.params) j["params"][k] = v;
    if (!f.swept.empty()) j["swept"] = f.swept;
    if (f.twirl) j["twirl"] = true;
    if (f.perturbation) {
        j["perturbation"] = {{"f", f.perturbation->f}, {"seed", f.perturbation->seed}, {"index", f.perturbation->index}};
    }
    return j;
}

/// Accepts {"kind", "params", "swept", "twirl", "perturbation"}; kind
/// "perturbed" wraps a "base" family and requires "perturbation".
inline NoiseFamily noise_from_json(const json& j, const std::string& path = "noise") {
    if (!j.is_object()) throw ConfigError(path, "must be an object");
    if (!j.contains("kind")) throw ConfigError(path + ".kind", "missing");
    std::string kind = j.at("kind").get<std::string>();
    NoiseFamily f;
    if (kind == "perturbed") {
        if (!j.contains("base")) throw ConfigError(path + ".base", "missing for a perturbed family");
        if (!j.contains("perturbation")) throw ConfigError(path + ".perturbation", "missing for a perturbed family");
        f = noise_from_json(j.at("base"), path + ".base");
    } else {
        try {
            f.kind = parse_noise_kind(kind);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + ".kind", e.what());
        }
        if (j.contains("params")) {
            if (!j.at("params").is_object()) throw ConfigError(path + ".params", "must be an object");
            for (const auto& [k, v] : j.at("params").items()) {
                if (!v.is_number()) throw ConfigError(path + ".params." + k, "must be a number");
                f.params[k] = v.get<double>();
            }
        }
        if (j.contains("swept")) f.swept = j.at("swept").get<std::string>();
    }
    if (j.contains("twirl")) f.twirl = j.at("twirl").get<bool>();
    if (j.contains("perturbation")) {
        const json& p = j.at("perturbation");
        Perturbation pert;
        if (p.contains("f")) pert.f = p.at("f").get<std::string>();
        if (p.contains("seed")) pert.seed = p.at("seed").get<std::uint64_t>();
        if (p.contains("index")) pert.index = p.at("index").get<std::uint64_t>();
        try {
            pert.weight(0.0);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + ".perturbation.f", e.what());
        }
        f.perturbation = pert;
    }
    try {
        f.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return f;
}

inline Grid grid_from_json(const json& j, const std::string& path) {
    Grid g;
    if (!j.contains("name")) throw ConfigError(path + ".name", "missing");
    g.name = j.at("name").get<std::string>();
    if (j.contains("values")) {
        g.values = j.at("values").get<std::vector<double>>();
    } else if (j.contains("start") && j.contains("stop") && j.contains("count")) {
        double a = j.at("start").get<double>();
        double b = j.at("stop").get<double>();
        auto n = j.at("count").get<std::size_t>();
        for (std::size_t i = 0; i < n; ++i) {
            g.values.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
    } else {
        throw ConfigError(path, "needs 'values' or 'start', 'stop' and 'count'");
    }
    return g;
}

inline ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("(root)", "configuration must be a JSON object");
    ExperimentConfig c;
    static const std::vector<std::string> kKnown = {
        "schema",  "kind",   "code",       "code_file",     "noise",       "grids",       "modes",
        "mode",    "levels", "xi",         "seed",          "tiebreak_seed", "ties",      "output",
        "workers", "max_levels", "scan_step", "granularity", "refine_steps", "upper",     "unitaries",
        "perturbation_f", "random_axis"};
    for (const auto& [k, v] : j.items()) {
        if (std::find(kKnown.begin(), kKnown.end(), k) == kKnown.end()) {
            throw ConfigError(k, "unknown field");
        }
    }
    auto field = [&](const char* name, auto fn) {
        if (!j.contains(name)) return;
        try {
            fn(j.at(name));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(name, e.what());
        }
    };
    field("schema", [&](const json& v) { c.schema = v.get<int>(); });
    if (!j.contains("kind")) throw ConfigError("kind", "missing");
    field("kind", [&](const json& v) { c.kind = parse_experiment_kind(v.get<std::string>()); });
    field("code", [&](const json& v) { c.code = v.get<std::string>(); });
    field("code_file", [&](const json& v) { c.code_file = v.get<std::string>(); });
    if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
    field("grids", [&](const json& v) {
        for (std::size_t i = 0; i < v.size(); ++i) c.grids.push_back(grid_from_json(v[i], "grids[" + std::to_string(i) + "]"));
    });
    field("mode", [&](const json& v) { c.modes = {parse_decoder_mode(v.get<std::string>())}; });
    field("modes", [&](const json& v) {
        c.modes.clear();
        for (const auto& m : v) c.modes.push_back(parse_decoder_mode(m.get<std::string>()));
    });
    field("levels", [&](const json& v) { c.levels = v.get<std::size_t>(); });
    field("xi", [&](const json& v) { c.xi = v.get<double>(); });
    field("seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); });
    field("tiebreak_seed", [&](const json& v) { c.tiebreak_seed = v.get<std::uint64_t>(); });
    field("ties", [&](const json& v) { c.ties = parse_tie_mode(v.get<std::string>()); });
    field("output", [&](const json& v) { c.output = v.get<std::string>(); });
    field("workers", [&](const json& v) { c.workers = v.get<std::size_t>(); });
    field("max_levels", [&](const json& v) { c.max_levels = v.get<std::size_t>(); });
    field("scan_step", [&](const json& v) { c.scan_step = v.get<double>(); });
    field("granularity", [&](const json& v) { c.granularity = v.get<double>(); });
    field("refine_steps", [&](const json& v) { c.refine_steps = v.get<std::vector<double>>(); });
    field("upper", [&](const json& v) { c.upper = v.get<double>(); });
    field("unitaries", [&](const json& v) { c.unitaries = v.get<std::size_t>(); });
    field("perturbation_f", [&](const json& v) { c.perturbation_f = v.get<std::string>(); });
    field("random_axis", [&](const json& v) { c.random_axis = v.get<bool>(); });
    c.validate();
    return c;
}

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["schema"] = c.schema;
    j["kind"] = to_string(c.kind);
    j["code"] = c.code;
    if (!c.code_file.empty()) j["code_file"] = c.code_file;
    j["noise"] = noise_to_json(c.noise);
    j["grids"] = json::array();
    for (const auto& g : c.grids) j["grids"].push_back({{"name", g.name}, {"values", g.values}});
    j["modes"] = json::array();
    for (auto m : c.modes) j["modes"].push_back(to_string(m));
    j["levels"] = c.levels;
    j["xi"] = c.xi;
    if (c.seed) j["seed"] = *c.seed;
    if (c.tiebreak_seed) j["tiebreak_seed"] = *c.tiebreak_seed;
    j["ties"] = to_string(c.ties);
    j["output"] = c.output;
    j["workers"] = c.workers;
    j["max_levels"] = c.max_levels;
    j["scan_step"] = c.scan_step;
    j["granularity"] = c.granularity;
    j["refine_steps"] = c.refine_steps;
    if (c.upper) j["upper"] = *c.upper;
    if (c.kind == ExperimentKind::perturbation) {
        j["unitaries"] = c.unitaries;
        j["perturbation_f"] = c.perturbation_f;
        j["random_axis"] = c.random_axis;
    }
    return j;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// CSV

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

struct Table {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& out) const {
        auto cell = [](const std::string& s) {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char c : s) {
                if (c == '"') q += '"';
                q += c;
            }
            return q + "\"";
        };
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << cell(header[i]);
        out << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << cell(r[i]);
            out << "\n";
        }
    }
};

// ---------------------------------------------------------------------------
// Perturbation study

struct PerturbationStudy {
    NoiseFamily base;  // base.swept is the grid parameter
    std::vector<double> values;
    std::string f = "sin2/10";
    std::size_t unitaries = 100;
    std::uint64_t seed = 0;
    bool random_axis = false;  // coherent only: a fresh uniform axis per unitary
    DecoderMode mode = DecoderMode::all_transversal;
    std::size_t workers = 1;
};

/// Level-1 infidelities averaged over the unitaries.
struct PerturbationRow {
    double value = 0;
    double weight = 0;           // f(value)
    double unperturbed_opt = 0;  // G(N_p)
    double perturbed_opt = 0;    // G(N_{U,p})
    double perturbed_sym = 0;    // G_{U,sym}
    double perturbed_tilde = 0;  // schedule optimized for N_p, applied to N_{U,p}
    std::size_t samples = 0;
};

/// Sample i uses the unitary keyed by mix_seed(seed, i) and, with
/// random_axis, an axis drawn from mix_seed(mix_seed(seed, i), 1).
inline std::vector<PerturbationRow> perturbation_experiment(const CodeContext& ctx, const PerturbationStudy& study) {
    if (study.base.swept.empty()) throw std::invalid_argument("perturbation study needs a swept parameter");
    if (study.random_axis && study.base.kind != NoiseKind::coherent) {
        throw std::invalid_argument("random axes only apply to coherent noise");
    }
    std::vector<PerturbationRow> rows(study.values.size());
    HardDecodeOptions one;
    one.max_levels = 1;
    parallel_for(study.values.size(), study.workers, [&](std::size_t vi) {
        const double v = study.values[vi];
        PerturbationRow row;
        row.value = v;
        row.samples = study.unitaries;
        double s_base = 0, s_opt = 0, s_sym = 0, s_tilde = 0;
        std::optional<DecoderSchedule> fixed;
        for (std::size_t i = 0; i < study.unitaries; ++i) {
            NoiseFamily fam = study.base.at(v);
            fam.perturbation.reset();
            if (study.random_axis) {
                std::mt19937_64 rng(mix_seed(mix_seed(study.seed, i), 1));
                std::uniform_real_distribution<double> u(0.0, 1.0);
                fam.params["phi"] = std::acos(1.0 - 2.0 * u(rng));
                fam.params["gamma"] = 2.0 * std::numbers::pi * u(rng);
            }
            Perturbation pert;
            pert.f = study.f;
            pert.seed = study.seed;
            pert.index = i;
            row.weight = pert.weight(v);
            NoiseFamily perturbed = fam;
            perturbed.perturbation = pert;
            const PhysicalNoise n_base = fam.block(ctx.code.n);
            const PhysicalNoise n_pert = perturbed.block(ctx.code.n);

            // The unperturbed optimum only changes with the axis.
            if (study.random_axis || !fixed) {
                auto r = run_hard_decoder(ctx, n_base, study.mode, one);
                fixed = make_schedule(ctx, r, study.mode);
                s_base += infidelity(r.final_channel());
            } else {
                s_base += infidelity(apply_schedule(ctx, n_base, *fixed, 1)[0]);
            }
            s_opt += infidelity(run_hard_decoder(ctx, n_pert, study.mode, one).final_channel());
            s_sym += infidelity(run_hard_decoder(ctx, n_pert, DecoderMode::symmetric, one).final_channel());
            s_tilde += infidelity(apply_schedule(ctx, n_pert, *fixed, 1)[0]);
        }
        double k = static_cast<double>(study.unitaries);
        row.unperturbed_opt = s_base / k;
        row.perturbed_opt = s_opt / k;
        row.perturbed_sym = s_sym / k;
        row.perturbed_tilde = s_tilde / k;
        rows[vi] = row;
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Verification suites

struct VerifyCheck {
    std::string suite;
    std::string subject;
    bool pass = false;
    double worst = 0;  // largest deviation seen, where meaningful
    std::string detail;
};

struct VerifyOptions {
    std::vector<std::string> codes{"bitflip-3", "five-qubit", "steane", "shor-z", "surface-17"};
    std::size_t random_channels = 10;
    std::uint64_t seed = 2026;
    double tol = 1e-10;
    bool inject_fault = false;  // corrupts one stabilizer element before the beta check
    std::vector<std::string> suites{"beta", "closed-form", "oracle"};

    bool runs(const std::string& suite) const { return std::find(suites.begin(), suites.end(), suite) != suites.end(); }
};

inline DenseNoise dense_noise_of(const NoiseFamily& f, std::size_t n) {
    if (f.kind == NoiseKind::correlated_dephasing_mix) {
        return DenseNoise::correlated_ring(n, f.local_kraus(), f.get("q"));
    }
    return DenseNoise::uniform(n, f.local_kraus());
}

/// Named families the oracle suite runs on every code.
inline std::vector<std::pair<std::string, NoiseFamily>> oracle_families() {
    return {
        {"identity", NoiseFamily::make(NoiseKind::identity, {})},
        {"apd", NoiseFamily::make(NoiseKind::amplitude_phase_damping, {{"p", 0.17}, {"lambda", 0.1}})},
        {"coherent", NoiseFamily::make(NoiseKind::coherent, {{"theta", 0.3}, {"phi", 1.0}, {"gamma", 0.4}})},
        {"depolarizing", NoiseFamily::make(NoiseKind::depolarizing, {{"p", 0.05}})},
        {"correlated", NoiseFamily::make(NoiseKind::correlated_dephasing_mix, {{"p", 0.01}, {"q", 0.05}})},
    };
}

inline VerifyCheck oracle_check(const StabilizerCode& code, const std::string& label, const PhysicalNoise& engine,
                                const DenseNoise& dense, double tol) {
    VerifyCheck c;
    c.suite = "oracle";
    c.subject = code.name + "/" + label;
    AlphaTable alpha = build_alpha(code);
    SyndromeTable table = symmetric_decoder(code);
    DenseCode dc = build_dense_code(code);
    auto ours = conditional_channels(code, alpha, engine, table);
    auto ref = oracle_conditionals(dc, dense, table);
    ProcessMatrix eff_ours, eff_ref;
    for (std::size_t l = 0; l < ours.size(); ++l) {
        c.worst = std::max(c.worst, ours[l].matrix.max_abs_diff(ref[l]));
        eff_ours += ours[l].matrix;
        eff_ref += ref[l];
    }
    c.worst = std::max(c.worst, eff_ours.max_abs_diff(eff_ref));
    c.pass = c.worst <= tol;
    return c;
}

/// Rz1 = ((7 cos 8t + 25)/32) U_{phi/2} for the trivial syndrome, Rz2 =
/// (7 sin^2 4t / 16) U_{-3t} for the sum over the other syndromes, with
/// tan phi = (3cos4t + cos8t + 10) tan^3 2t / (-3cos4t + cos8t + 10).
inline VerifyCheck steane_closed_form_check(double theta, double tol) {
    VerifyCheck c;
    c.suite = "closed-form";
    c.subject = "steane/theta=" + fmt(theta);
    CodeContext ctx = CodeContext::make(builtin_code("steane"));
    const double half_pi = std::numbers::pi / 2;
    auto conds = conditional_channels(ctx.code, ctx.alpha, PhysicalNoise::uniform(7, coherent_rotation(theta, half_pi, 0)),
                                      ctx.table);
    double c4 = std::cos(4 * theta), c8 = std::cos(8 * theta);
    double phi = std::atan((3 * c4 + c8 + 10) * std::pow(std::tan(2 * theta), 3) / (-3 * c4 + c8 + 10));
    ProcessMatrix rz1 = ((7 * c8 + 25) / 32) * coherent_rotation(phi / 2, half_pi, 0);
    ProcessMatrix rz2 = (7 * std::pow(std::sin(4 * theta), 2) / 16) * coherent_rotation(-3 * theta, half_pi, 0);
    ProcessMatrix rest;
    for (std::size_t l = 1; l < conds.size(); ++l) rest += conds[l].matrix;
    c.worst = std::max(conds[0].matrix.max_abs_diff(rz1), rest.max_abs_diff(rz2));
    c.pass = c.worst <= tol;
    return c;
}

/// At theta = pi/12 the non-trivial syndromes carry U_{-pi/4}, which a
/// transversal Clifford undoes; the corrected group is the identity.
inline VerifyCheck steane_exact_recovery_check(double tol = 1e-12) {
    VerifyCheck c;
    c.suite = "closed-form";
    c.subject = "steane/pi-12-recovery";
    CodeContext ctx = CodeContext::make(builtin_code("steane"));
    auto noise = PhysicalNoise::uniform(7, coherent_rotation(std::numbers::pi / 12, std::numbers::pi / 2, 0));
    HardDecodeOptions o;
    o.max_levels = 1;
    auto r = run_hard_decoder(ctx, noise, DecoderMode::all_transversal, o);
    const auto& lv = r.levels.front();
    c.worst = 0;
    for (std::size_t k = 0; k < lv.groups.size(); ++k) {
        const auto& g = lv.groups[k];
        if (g.members.front() == 0 || g.probability() < 1e-6) continue;
        ProcessMatrix fixed = ctx.gates.elements[lv.gate_of_group[k]].matrix * g.sum;
        c.worst = std::max(c.worst, infidelity((1.0 / g.probability()) * fixed));
        c.detail = "gate " + ctx.gates.elements[lv.gate_of_group[k]].name;
    }
    c.pass = std::abs(c.worst) < tol;
    return c;
}

inline VerifyCheck beta_check(const StabilizerCode& code, bool inject_fault) {
    VerifyCheck c;
    c.suite = "beta";
    c.subject = code.name;
    try {
        AlphaTable alpha = build_alpha(code);
        std::size_t entries = 0;
        for (int t = 0; t < 4; ++t) {
            for (std::size_t m = 0; m < alpha.size(); ++m) {
                if (alpha_sign_closed_form(code, alpha.group[m].generator_mask, t) != alpha.sign[t][m]) {
                    throw std::logic_error("closed-form alpha sign differs at element " + std::to_string(m));
                }
            }
        }
        if (inject_fault && alpha.size() > 1) {
            PauliOp& e = alpha.group[1].element;
            e = PauliOp(e.n(), e.z_bits(), e.x_bits() ^ 1u, e.phase_exp());
        }
        auto tables = build_beta(code, alpha, symmetric_decoder(code));
        for (const auto& b : tables) entries += 4 * b.value[0].size();
        c.pass = true;
        c.detail = std::to_string(entries) + " entries";
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = e.what();
    }
    return c;
}

inline std::vector<VerifyCheck> verify(const VerifyOptions& opt = {}) {
    std::vector<VerifyCheck> out;
    if (opt.runs("beta")) {
        for (const auto& name : builtin_code_names()) out.push_back(beta_check(builtin_code(name), opt.inject_fault));
    }
    if (opt.runs("closed-form")) {
        for (double t : {0.05, 0.1, std::numbers::pi / 12}) out.push_back(steane_closed_form_check(t, opt.tol));
        out.push_back(steane_exact_recovery_check());
    }
    if (!opt.runs("oracle")) return out;
    for (const auto& name : opt.codes) {
        StabilizerCode code = builtin_code(name);
        for (const auto& [label, fam] : oracle_families()) {
            out.push_back(oracle_check(code, label, fam.block(code.n), dense_noise_of(fam, code.n), opt.tol));
        }
        for (std::size_t k = 0; k < opt.random_channels; ++k) {
            KrausChannel kr = random_kraus_channel(mix_seed(opt.seed, k));
            out.push_back(oracle_check(code, "random-" + std::to_string(k),
                                       PhysicalNoise::uniform(code.n, kraus_to_process(kr)),
                                       DenseNoise::uniform(code.n, kr), opt.tol));
        }
        // Different channel on every qubit.
        std::vector<ProcessMatrix> pm;
        DenseNoise dn;
        dn.terms.push_back({1.0, {}});
        for (std::size_t q = 0; q < code.n; ++q) {
            KrausChannel kr = random_kraus_channel(mix_seed(opt.seed + 1, q), 2);
            pm.push_back(kraus_to_process(kr));
            dn.terms[0].per_qubit.push_back(kr);
        }
        out.push_back(oracle_check(code, "per-qubit", PhysicalNoise::product(pm), dn, opt.tol));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiment runner

struct ExperimentOutput {
    std::vector<Table> tables;
    json manifest;
};

namespace detail {

inline StabilizerCode load_code(const ExperimentConfig& c) {
    if (c.code_file.empty()) return builtin_code(c.code);
    std::ifstream in(c.code_file);
    if (!in) throw ConfigError("code_file", "cannot open '" + c.code_file + "'");
    return parse_code(in);
}

inline NoiseFamily seeded_noise(const ExperimentConfig& c) {
    NoiseFamily f = c.noise;
    if (f.kind == NoiseKind::random && !f.params.count("seed")) f.params["seed"] = static_cast<double>(*c.seed);
    return f;
}

inline ThresholdQuery make_query(const ExperimentConfig& c, const CodeContext& ctx, DecoderMode mode) {
    ThresholdQuery q;
    q.ctx = &ctx;
    q.family = seeded_noise(c);
    q.mode = mode;
    q.ties = c.ties;
    q.options.max_levels = c.max_levels;
    q.options.xi = c.xi;
    q.scan_step = c.scan_step;
    q.granularity = c.granularity;
    q.refine_steps = c.refine_steps;
    q.upper = c.upper;
    return q;
}

inline void cartesian(const std::vector<Grid>& grids, std::size_t at, MeshPoint& cur, std::vector<MeshPoint>& out) {
    if (at == grids.size()) {
        out.push_back(cur);
        return;
    }
    for (double v : grids[at].values) {
        cur.coords[grids[at].name] = v;
        cartesian(grids, at + 1, cur, out);
    }
}

inline Table channel_table(const ExperimentConfig& c, const CodeContext& ctx) {
    Table t{"channel", {"code", "mode", "level", "infidelity", "trace"}, {}};
    static const char* kP = "IXYZ";
    for (int s = 0; s < 4; ++s) {
        for (int u = 0; u < 4; ++u) t.header.push_back(std::string("G_") + kP[s] + kP[u]);
    }
    NoiseFamily f = seeded_noise(c);
    for (auto mode : c.modes) {
        HardDecodeOptions o;
        o.max_levels = c.levels;
        o.xi = c.xi;
        o.stop_when_correctable = false;
        o.run_all_levels = true;
        auto r = run_hard_decoder(ctx, f.block(ctx.code.n), mode, o);
        for (std::size_t l = 0; l < r.levels.size(); ++l) {
            const auto& g = r.levels[l].channel;
            std::vector<std::string> row{ctx.code.name, to_string(mode), std::to_string(l + 1), fmt(infidelity(g)),
                                         fmt(g.trace())};
            for (int s = 0; s < 4; ++s) {
                for (int u = 0; u < 4; ++u) row.push_back(fmt(g(s, u)));
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

inline Table sweep_table(const ExperimentConfig& c, const CodeContext& ctx) {
    const Grid& g = c.grids.front();
    Table t{"sweep", {g.name, "mode", "level", "infidelity", "trace", "status"}, {}};
    NoiseFamily f = seeded_noise(c);
    std::vector<std::vector<std::vector<std::string>>> per(g.values.size());
    parallel_for(g.values.size(), c.workers, [&](std::size_t i) {
        for (auto mode : c.modes) {
            try {
                HardDecodeOptions o;
                o.max_levels = c.levels;
                o.xi = c.xi;
                o.stop_when_correctable = false;
                o.run_all_levels = true;
                auto r = run_hard_decoder(ctx, f.with(g.name, g.values[i]).block(ctx.code.n), mode, o);
                for (std::size_t l = 0; l < r.levels.size(); ++l) {
                    const auto& ch = r.levels[l].channel;
                    per[i].push_back({fmt(g.values[i]), to_string(mode), std::to_string(l + 1), fmt(infidelity(ch)),
                                      fmt(ch.trace()), "ok"});
                }
            } catch (const std::exception& e) {
                per[i].push_back({fmt(g.values[i]), to_string(mode), "", "", "", std::string("error: ") + e.what()});
            }
        }
    });
    for (auto& rows : per) {
        for (auto& r : rows) t.rows.push_back(std::move(r));
    }
    return t;
}

inline std::vector<Table> threshold_tables(const ExperimentConfig& c, const CodeContext& ctx) {
    std::vector<MeshPoint> mesh;
    MeshPoint cur;
    cartesian(c.grids, 0, cur, mesh);
    std::vector<std::string> coords;
    for (const auto& g : c.grids) coords.push_back(g.name);

    Table th{c.kind == ExperimentKind::contour ? "contour" : "thresholds", coords, {}};
    for (const char* h : {"mode", "ties", "swept", "threshold", "granularity", "bracketed", "stop", "status"}) {
        th.header.push_back(h);
    }
    Table pr{"probes", coords, {}};
    for (const char* h : {"mode", "stage", "swept", "value", "correctable", "levels_to_correct", "infidelity_level1",
                          "infidelity_final"}) {
        pr.header.push_back(h);
    }
    for (auto mode : c.modes) {
        ThresholdQuery base = make_query(c, ctx, mode);
        auto results = hypersurface_mesh(base, mesh, c.workers);
        for (const auto& r : results) {
            std::vector<std::string> head;
            for (const auto& name : coords) head.push_back(fmt(r.coords.at(name)));
            auto row = head;
            row.insert(row.end(), {to_string(mode), to_string(c.ties), c.noise.swept});
            if (r.result) {
                row.insert(row.end(), {fmt(r.result->threshold), fmt(r.result->granularity),
                                       r.result->bracketed ? "1" : "0", r.result->stop, r.status});
                for (const auto& p : r.result->probes) {
                    auto pr_row = head;
                    pr_row.insert(pr_row.end(),
                                  {to_string(mode), p.stage, c.noise.swept, fmt(p.value), p.verdict.correctable ? "1" : "0",
                                   std::to_string(p.verdict.levels_to_correct), fmt(p.verdict.infidelity_level1),
                                   fmt(p.verdict.infidelity_final)});
                    pr.rows.push_back(std::move(pr_row));
                }
            } else {
                row.insert(row.end(), {"", "", "", "", r.status});
            }
            th.rows.push_back(std::move(row));
        }
    }
    return {pr, th};
}

inline Table twirl_table(const ExperimentConfig& c, const CodeContext& ctx) {
    Table t{"twirl", {"phi", "gamma", "twirled_all", "bare_all", "bare_pauli", "twirled_pauli", "ratio_bare_all_to_pauli"}, {}};
    NoiseFamily f = seeded_noise(c);
    if (f.swept.empty()) f.swept = "theta";
    ThresholdQuery q = make_query(c, ctx, DecoderMode::all_transversal);
    auto pts = twirl_compare(ctx, f, c.grids.front().values, q, c.workers);
    for (const auto& p : pts) {
        t.rows.push_back({fmt(p.phi), fmt(f.get("gamma")), fmt(p.twirled_all), fmt(p.bare_all), fmt(p.bare_pauli),
                          fmt(p.twirled_pauli), fmt(p.bare_pauli > 0 ? p.bare_all / p.bare_pauli : 0.0)});
    }
    return t;
}

inline Table perturbation_table(const ExperimentConfig& c, const CodeContext& ctx) {
    PerturbationStudy s;
    s.base = seeded_noise(c);
    s.base.swept = c.grids.front().name;
    s.values = c.grids.front().values;
    s.f = c.perturbation_f;
    s.unitaries = c.unitaries;
    s.seed = *c.seed;
    s.random_axis = c.random_axis;
    s.mode = c.modes.front() == DecoderMode::symmetric ? DecoderMode::all_transversal : c.modes.front();
    s.workers = c.workers;
    Table t{"perturbation",
            {s.base.swept, "f", "weight", "samples", "mode", "unperturbed_opt", "perturbed_opt", "perturbed_sym",
             "perturbed_tilde", "ratio_tilde_to_sym"},
            {}};
    for (const auto& r : perturbation_experiment(ctx, s)) {
        t.rows.push_back({fmt(r.value), s.f, fmt(r.weight), std::to_string(r.samples), to_string(s.mode),
                          fmt(r.unperturbed_opt), fmt(r.perturbed_opt), fmt(r.perturbed_sym), fmt(r.perturbed_tilde),
                          fmt(r.perturbed_sym > 0 ? r.perturbed_tilde / r.perturbed_sym : 0.0)});
    }
    return t;
}

}  // namespace detail

/// Computes the tables of `config`; nothing is written.
inline ExperimentOutput compute_experiment(const ExperimentConfig& config) {
    config.validate();
    StabilizerCode code = detail::load_code(config);
    SyndromeTable table = symmetric_decoder(code, config.tiebreak_seed);
    CodeContext ctx = CodeContext::make(std::move(code), std::move(table));
    ExperimentOutput out;
    switch (config.kind) {
        case ExperimentKind::channel:
            out.tables.push_back(detail::channel_table(config, ctx));
            break;
        case ExperimentKind::infidelity_sweep:
            out.tables.push_back(detail::sweep_table(config, ctx));
            break;
        case ExperimentKind::threshold:
        case ExperimentKind::contour:
            out.tables = detail::threshold_tables(config, ctx);
            break;
        case ExperimentKind::twirl_compare:
            out.tables.push_back(detail::twirl_table(config, ctx));
            break;
        case ExperimentKind::perturbation:
            out.tables.push_back(detail::perturbation_table(config, ctx));
            break;
    }
    return out;
}

/// Writes one CSV per table plus manifest.json into config.output.
inline json run_experiment(const ExperimentConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentOutput res = compute_experiment(config);
    std::filesystem::create_directories(config.output);
    json files = json::array();
    for (const auto& t : res.tables) {
        std::string file = t.name + ".csv";
        std::ofstream os(std::filesystem::path(config.output) / file, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + file + " in " + config.output);
        t.write(os);
        files.push_back({{"file", file}, {"rows", t.rows.size()}, {"columns", t.header}});
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest = {{"tool", kToolName},
                     {"version", kToolVersion},
                     {"kind", to_string(config.kind)},
                     {"config", config_to_json(config)},
                     {"outputs", files},
                     {"wall_time_seconds", wall}};
    std::ofstream ms(std::filesystem::path(config.output) / "manifest.json", std::ios::binary);
    ms << manifest.dump(2) << "\n";
    return manifest;
}

}  // namespace qecopt
