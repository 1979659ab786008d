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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qecopt/channel.hpp"
#include "qecopt/logical_channel.hpp"

namespace qecopt {

enum class NoiseKind { identity, amplitude_phase_damping, coherent, depolarizing, correlated_dephasing_mix, random };

inline std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::identity:
            return "identity";
        case NoiseKind::amplitude_phase_damping:
            return "amplitude-phase-damping";
        case NoiseKind::coherent:
            return "coherent";
        case NoiseKind::depolarizing:
            return "depolarizing";
        case NoiseKind::correlated_dephasing_mix:
            return "correlated-dephasing-mix";
        case NoiseKind::random:
            return "random";
    }
    return "?";
}

inline NoiseKind parse_noise_kind(const std::string& s) {
    if (s == "identity") return NoiseKind::identity;
    if (s == "amplitude-phase-damping" || s == "apd") return NoiseKind::amplitude_phase_damping;
    if (s == "coherent") return NoiseKind::coherent;
    if (s == "depolarizing") return NoiseKind::depolarizing;
    if (s == "correlated-dephasing-mix" || s == "correlated") return NoiseKind::correlated_dephasing_mix;
    if (s == "random") return NoiseKind::random;
    throw std::invalid_argument("unknown noise kind '" + s + "'");
}

/// Perturbation (1 - f(v)) N_v + f(v) U.U^dagger with a seeded Haar unitary.
struct Perturbation {
    std::string f = "sin2/10";  // "sin2/10": sin^2(v)/10, "linear/10": v/10
    std::uint64_t seed = 0;
    std::uint64_t index = 0;    // stream index; unitary = haar(mix_seed(seed, index))

    double weight(double v) const {
        if (f == "sin2/10") return std::sin(v) * std::sin(v) / 10.0;
        if (f == "linear/10") return v / 10.0;
        throw std::invalid_argument("unknown perturbation function '" + f + "'");
    }
    Mat2 unitary() const { return haar_random_unitary(mix_seed(seed, index)); }
};

/// A one-parameter slice of a noise model: fixed parameters plus the name of
/// the swept one.
///
/// Parameters by kind:
///   amplitude-phase-damping: p, lambda
///   coherent: theta, phi, gamma (axis (sin phi cos gamma, sin phi sin gamma, cos phi))
///   depolarizing: p
///   correlated-dephasing-mix: p (local depolarizing), q (ring ZZ weight)
///   random: seed, rank
struct NoiseFamily {
    NoiseKind kind = NoiseKind::identity;
    std::map<std::string, double> params;
    std::string swept;
    bool twirl = false;
    std::optional<Perturbation> perturbation;

    static NoiseFamily make(NoiseKind kind, std::map<std::string, double> params, std::string swept = {}) {
        NoiseFamily f;
        f.kind = kind;
        f.params = std::move(params);
        f.swept = std::move(swept);
        f.validate();
        return f;
    }

    std::vector<std::string> parameter_names() const {
        switch (kind) {
            case NoiseKind::identity:
                return {};
            case NoiseKind::amplitude_phase_damping:
                return {"p", "lambda"};
            case NoiseKind::coherent:
                return {"theta", "phi", "gamma"};
            case NoiseKind::depolarizing:
                return {"p"};
            case NoiseKind::correlated_dephasing_mix:
                return {"p", "q"};
            case NoiseKind::random:
                return {"seed", "rank"};
        }
        return {};
    }

    void validate() const {
        auto names = parameter_names();
        for (const auto& [k, v] : params) {
            if (std::find(names.begin(), names.end(), k) == names.end()) {
                throw std::invalid_argument("noise kind " + to_string(kind) + " has no parameter '" + k + "'");
            }
        }
        if (!swept.empty() && std::find(names.begin(), names.end(), swept) == names.end()) {
            throw std::invalid_argument("cannot sweep '" + swept + "' for noise kind " + to_string(kind));
        }
    }

    double get(const std::string& name, double fallback = 0.0) const {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }

    /// Copy with the swept parameter (or any other) set.
    NoiseFamily with(const std::string& name, double value) const {
        NoiseFamily f = *this;
        f.params[name] = value;
        return f;
    }
    NoiseFamily at(double value) const {
        if (swept.empty()) throw std::invalid_argument("noise family has no swept parameter");
        return with(swept, value);
    }

    /// Largest meaningful value of the swept parameter.
    double sweep_limit() const {
        if (kind == NoiseKind::depolarizing || (kind == NoiseKind::correlated_dephasing_mix && swept == "p")) {
            return 0.75;
        }
        if (kind == NoiseKind::coherent && swept == "theta") return std::numbers::pi / 2;
        if (kind == NoiseKind::coherent) return std::numbers::pi;
        return 1.0;
    }

    /// Single-qubit channel (the local part for the correlated mixture).
    ProcessMatrix local() const {
        ProcessMatrix m;
        switch (kind) {
            case NoiseKind::identity:
                m = ProcessMatrix::identity();
                break;
            case NoiseKind::amplitude_phase_damping:
                m = amplitude_phase_damping(get("p"), get("lambda"));
                break;
            case NoiseKind::coherent:
                m = coherent_rotation(get("theta"), get("phi"), get("gamma"));
                break;
            case NoiseKind::depolarizing:
            case NoiseKind::correlated_dephasing_mix:
                m = depolarizing(get("p"));
                break;
            case NoiseKind::random:
                m = kraus_to_process(random_kraus_channel(static_cast<std::uint64_t>(get("seed")),
                                                          static_cast<int>(get("rank", 3))));
                break;
        }
        if (perturbation) {
            double v = swept.empty() ? 0.0 : get(swept);
            m = perturb(m, perturbation->unitary(), perturbation->weight(v));
        }
        if (twirl) m = pauli_twirl(m);
        return m;
    }

    /// Kraus form of local(), for the dense oracle.
    KrausChannel local_kraus() const {
        KrausChannel k({Mat2::Identity()});
        switch (kind) {
            case NoiseKind::identity:
                break;
            case NoiseKind::amplitude_phase_damping:
                k = amplitude_phase_damping_kraus(get("p"), get("lambda"));
                break;
            case NoiseKind::coherent:
                k = KrausChannel({rotation_unitary(get("theta"), get("phi"), get("gamma"))}, 1e-10);
                break;
            case NoiseKind::depolarizing:
            case NoiseKind::correlated_dephasing_mix:
                k = depolarizing_kraus(get("p"));
                break;
            case NoiseKind::random:
                k = random_kraus_channel(static_cast<std::uint64_t>(get("seed")), static_cast<int>(get("rank", 3)));
                break;
        }
        if (perturbation) {
            double v = swept.empty() ? 0.0 : get(swept);
            k = k.mixed_with(KrausChannel({perturbation->unitary()}, 1e-10), perturbation->weight(v));
        }
        if (twirl) {
            std::vector<Mat2> ops;
            for (const auto& pm : pauli_matrices()) {
                for (const auto& a : k.ops()) ops.push_back(0.5 * pm * a);
            }
            k = KrausChannel(std::move(ops), 1e-10);
        }
        return k;
    }

    /// Noise on an n-qubit block.
    PhysicalNoise block(std::size_t n) const {
        if (kind == NoiseKind::correlated_dephasing_mix) {
            return PhysicalNoise::correlated_ring(n, local(), get("q"));
        }
        return PhysicalNoise::uniform(n, local());
    }
};

}  // namespace qecopt
