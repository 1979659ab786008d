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
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qecopt/decoder_opt.hpp"
#include "qecopt/noise.hpp"

namespace qecopt {

enum class TieMode { first, exhaustive };

inline TieMode parse_tie_mode(const std::string& s) {
    if (s == "first") return TieMode::first;
    if (s == "exhaustive") return TieMode::exhaustive;
    throw std::invalid_argument("unknown tie mode '" + s + "'");
}

inline std::string to_string(TieMode t) { return t == TieMode::first ? "first" : "exhaustive"; }

struct Verdict {
    bool correctable = false;
    std::size_t levels_to_correct = 0;  // t(p)
    std::size_t levels_run = 0;
    double infidelity_level1 = 0;
    double infidelity_final = 0;
    std::size_t tie_tuples = 1;  // tuples examined at level 1
    std::size_t tie_index = 0;   // tuple that produced this verdict
};

namespace detail {

inline Verdict verdict_of(const HardDecodeResult& r) {
    Verdict v;
    v.correctable = r.correctable;
    v.levels_to_correct = r.levels_to_correct;
    v.levels_run = r.levels.size();
    v.infidelity_level1 = infidelity(r.levels.front().channel);
    v.infidelity_final = infidelity(r.final_channel());
    return v;
}

}  // namespace detail

/// Correctable iff some level t <= max_levels has Tr G^(t) >= 4 - xi. In
/// exhaustive mode every tuple of tied level-1 choices is tried.
inline Verdict correctable(const CodeContext& ctx, const PhysicalNoise& noise, DecoderMode mode,
                           const HardDecodeOptions& opts = {}, TieMode ties = TieMode::first) {
    if (!(opts.xi > 0)) {
        throw std::invalid_argument("xi must be positive");
    }
    HardDecodeOptions o = opts;
    o.stop_when_correctable = true;
    o.run_all_levels = false;
    HardDecodeResult first = run_hard_decoder(ctx, noise, mode, o);
    Verdict v = detail::verdict_of(first);
    if (v.correctable || ties == TieMode::first || mode == DecoderMode::symmetric) {
        return v;
    }
    auto tuples = enumerate_tie_schedules(first.levels.front().choices);
    v.tie_tuples = tuples.size();
    for (std::size_t k = 1; k < tuples.size(); ++k) {
        o.level1_gates = tuples[k];
        HardDecodeResult alt = run_hard_decoder(ctx, noise, mode, o);
        if (alt.correctable) {
            Verdict w = detail::verdict_of(alt);
            w.tie_tuples = tuples.size();
            w.tie_index = k;
            return w;
        }
    }
    return v;
}

struct ThresholdQuery {
    const CodeContext* ctx = nullptr;
    NoiseFamily family;  // family.swept names the parameter searched
    DecoderMode mode = DecoderMode::symmetric;
    TieMode ties = TieMode::first;
    HardDecodeOptions options;
    double scan_step = 0.05;
    double granularity = 1e-4;
    std::vector<double> refine_steps{0.01, 0.001, 0.0001};
    bool stop_on_level_drop = true;  // refinement also stops where t(p) decreases
    std::optional<double> upper;     // defaults to family.sweep_limit()
};

struct Probe {
    double value = 0;
    std::string stage;
    Verdict verdict;
};

struct ThresholdResult {
    double threshold = 0;
    double granularity = 0;
    bool bracketed = false;  // an uncorrectable value was found
    std::string stop = "limit";  // "uncorrectable", "level-drop" or "limit"
    std::vector<Probe> probes;
};

namespace detail {

inline Verdict probe(const ThresholdQuery& q, double value, DecoderMode mode, const std::string& stage,
                     ThresholdResult& out) {
    Verdict v = correctable(*q.ctx, q.family.at(value).block(q.ctx->code.n), mode, q.options, q.ties);
    out.probes.push_back({value, stage, v});
    return v;
}

}  // namespace detail

/// Forward scan in scan_step increments from 0 to the first uncorrectable
/// value, then bisection of the last interval down to `granularity`. The
/// decoder is q.mode (symmetric for the classic search).
inline ThresholdResult symmetric_threshold(const ThresholdQuery& q, std::optional<DecoderMode> mode_override = {}) {
    if (q.ctx == nullptr) throw std::invalid_argument("threshold query without a code");
    DecoderMode mode = mode_override.value_or(q.mode);
    double top = q.upper.value_or(q.family.sweep_limit());
    ThresholdResult out;
    out.granularity = q.granularity;
    double lo = 0;
    std::optional<double> hi;
    for (std::size_t k = 0;; ++k) {
        double v = std::min(top, static_cast<double>(k) * q.scan_step);
        if (!detail::probe(q, v, mode, "scan", out).correctable) {
            hi = v;
            out.stop = "uncorrectable";
            break;
        }
        lo = v;
        if (v >= top) break;
    }
    if (!hi) {
        out.threshold = top;
        return out;
    }
    out.bracketed = true;
    if (*hi == 0) {
        out.threshold = 0;
        return out;
    }
    double h = *hi;
    while (h - lo > q.granularity) {
        double mid = 0.5 * (lo + h);
        if (detail::probe(q, mid, mode, "bisect", out).correctable) {
            lo = mid;
        } else {
            h = mid;
        }
    }
    out.threshold = lo;
    return out;
}

/// Lower bound for the optimized decoder: start from the symmetric threshold
/// and advance while the next value stays correctable, with steps 0.01, then
/// 0.001, then 0.0001.
///
/// With stop_on_level_drop, a probe whose t(p) is below that of the previous
/// accepted probe (same level-1 tie tuple) means a peak of t(p) was passed.
/// The next pass restarts from the last value before the peak, and on the
/// finest step the search ends at the last accepted value. A correctable
/// window narrower than the coarse step is not stepped over this way.
inline ThresholdResult optimized_threshold(const ThresholdQuery& q) {
    if (q.mode == DecoderMode::symmetric) {
        return symmetric_threshold(q);
    }
    ThresholdResult out = symmetric_threshold(q, DecoderMode::symmetric);
    for (auto& p : out.probes) p.stage = "symmetric-" + p.stage;
    double top = q.upper.value_or(q.family.sweep_limit());
    out.bracketed = false;
    out.stop = "limit";

    struct Accepted {
        double value;
        Verdict verdict;
    };
    Verdict start = detail::probe(q, out.threshold, q.mode, "refine-start", out);
    std::vector<Accepted> accepted{{out.threshold, start}};
    for (std::size_t pass = 0; pass < q.refine_steps.size(); ++pass) {
        const double step = q.refine_steps[pass];
        const bool last_pass = pass + 1 == q.refine_steps.size();
        const double base = accepted.back().value;
        accepted = {accepted.back()};
        for (std::size_t k = 1;; ++k) {
            double v = base + static_cast<double>(k) * step;
            if (v > top + 1e-12) break;
            Verdict vd = detail::probe(q, v, q.mode, "refine-" + std::to_string(step), out);
            if (!vd.correctable) {
                out.bracketed = true;
                out.stop = "uncorrectable";
                break;
            }
            const Verdict& prev = accepted.back().verdict;
            bool drop = q.stop_on_level_drop && prev.correctable && vd.tie_index == prev.tie_index &&
                        vd.levels_to_correct < prev.levels_to_correct;
            if (drop) {
                out.stop = "level-drop";
                // The peak lies after the second-to-last accepted value.
                if (!last_pass && accepted.size() >= 2) accepted.pop_back();
                break;
            }
            accepted.push_back({v, vd});
        }
    }
    out.threshold = accepted.back().value;
    out.granularity = q.refine_steps.empty() ? out.granularity : q.refine_steps.back();
    return out;
}

inline ThresholdResult threshold(const ThresholdQuery& q) {
    return q.mode == DecoderMode::symmetric ? symmetric_threshold(q) : optimized_threshold(q);
}

struct MeshPoint {
    std::map<std::string, double> coords;
};

struct MeshResult {
    std::map<std::string, double> coords;
    std::optional<ThresholdResult> result;
    std::string status = "ok";
};

/// Runs `fn(i)` for i in [0, count) on up to `workers` threads. Results are
/// the caller's responsibility; each index is visited exactly once.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// One threshold per mesh point; failures are recorded, not thrown.
inline std::vector<MeshResult> hypersurface_mesh(const ThresholdQuery& base, const std::vector<MeshPoint>& mesh,
                                                 std::size_t workers = 1) {
    std::vector<MeshResult> out(mesh.size());
    parallel_for(mesh.size(), workers, [&](std::size_t i) {
        out[i].coords = mesh[i].coords;
        try {
            ThresholdQuery q = base;
            for (const auto& [k, v] : mesh[i].coords) q.family = q.family.with(k, v);
            out[i].result = threshold(q);
        } catch (const std::exception& e) {
            out[i].status = std::string("error: ") + e.what();
        }
    });
    return out;
}

/// Thresholds of one twirl-comparison point: bare or twirled noise against
/// all-transversal or Pauli-only correction.
struct TwirlPoint {
    double phi = 0;
    double twirled_all = 0;   // optimized, all transversal gates, twirled noise
    double bare_all = 0;      // optimized, all transversal gates, bare noise
    double bare_pauli = 0;    // optimized, Pauli gates only, bare noise
    double twirled_pauli = 0; // optimized, Pauli gates only, twirled noise
};

/// Rotation axis (sin phi cos gamma, sin phi sin gamma, cos phi) with gamma
/// fixed by `family`; theta is the swept parameter.
inline std::vector<TwirlPoint> twirl_compare(const CodeContext& ctx, const NoiseFamily& family,
                                             const std::vector<double>& phis, const ThresholdQuery& options,
                                             std::size_t workers = 1) {
    std::vector<TwirlPoint> out(phis.size());
    parallel_for(phis.size(), workers, [&](std::size_t i) {
        ThresholdQuery q = options;
        q.ctx = &ctx;
        NoiseFamily bare = family.with("phi", phis[i]);
        bare.swept = "theta";
        NoiseFamily tw = bare;
        tw.twirl = true;
        auto run = [&](const NoiseFamily& f, DecoderMode m) {
            ThresholdQuery qq = q;
            qq.family = f;
            qq.mode = m;
            return optimized_threshold(qq).threshold;
        };
        out[i].phi = phis[i];
        out[i].twirled_all = run(tw, DecoderMode::all_transversal);
        out[i].bare_all = run(bare, DecoderMode::all_transversal);
        out[i].bare_pauli = run(bare, DecoderMode::pauli_only);
        out[i].twirled_pauli = run(tw, DecoderMode::pauli_only);
    });
    return out;
}

}  // namespace qecopt
