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
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qecopt/channel.hpp"
#include "qecopt/code.hpp"
#include "qecopt/logical_channel.hpp"

namespace qecopt {

inline constexpr double kGroupTolerance = 1e-9;
inline constexpr double kTieTolerance = 1e-9;
inline constexpr double kConvergenceTolerance = 1e-8;
inline constexpr std::size_t kMaxTieTuples = 4096;

enum class DecoderMode { symmetric, all_transversal, pauli_only };

inline std::string to_string(DecoderMode m) {
    switch (m) {
        case DecoderMode::symmetric:
            return "symmetric";
        case DecoderMode::all_transversal:
            return "opt-all";
        case DecoderMode::pauli_only:
            return "opt-pauli";
    }
    return "?";
}

inline DecoderMode parse_decoder_mode(const std::string& s) {
    if (s == "symmetric" || s == "sym") return DecoderMode::symmetric;
    if (s == "opt-all" || s == "all-transversal" || s == "optimized-all") return DecoderMode::all_transversal;
    if (s == "opt-pauli" || s == "pauli-only" || s == "optimized-pauli") return DecoderMode::pauli_only;
    throw std::invalid_argument("unknown decoder mode '" + s + "'");
}

/// Everything about a code that does not depend on the noise.
struct CodeContext {
    StabilizerCode code;
    AlphaTable alpha;
    SyndromeTable table;
    TransversalGroup gates;

    static CodeContext make(StabilizerCode code) {
        SyndromeTable table = symmetric_decoder(code);
        return make(std::move(code), std::move(table));
    }
    static CodeContext make(StabilizerCode code, SyndromeTable table) {
        CodeContext ctx;
        ctx.alpha = build_alpha(code);
        ctx.gates = transversal_group(code);
        ctx.table = std::move(table);
        ctx.code = std::move(code);
        return ctx;
    }

    /// Gate indices the optimizer may pick from.
    std::vector<std::size_t> candidates(DecoderMode mode) const {
        if (mode == DecoderMode::symmetric) return {0};
        return gates.indices(mode == DecoderMode::pauli_only);
    }
};

/// Syndromes whose conditional channels coincide.
struct DistinctGroup {
    ProcessMatrix representative;  // conditional of the lowest member syndrome
    ProcessMatrix sum;             // sum over members
    std::vector<std::uint64_t> members;

    std::size_t multiplicity() const { return members.size(); }
    double probability() const { return sum(0, 0); }
};

/// Groups conditionals whose entries agree within `tol`. Groups are ordered by
/// their lowest syndrome.
inline std::vector<DistinctGroup> group_conditionals(const std::vector<ConditionalChannel>& conditionals,
                                                     double tol = kGroupTolerance) {
    std::vector<DistinctGroup> groups;
    for (const auto& c : conditionals) {
        bool placed = false;
        for (auto& g : groups) {
            if (g.representative.max_abs_diff(c.matrix) <= tol) {
                g.members.push_back(c.syndrome);
                g.sum += c.matrix;
                placed = true;
                break;
            }
        }
        if (!placed) {
            groups.push_back({c.matrix, c.matrix, {c.syndrome}});
        }
    }
    return groups;
}

/// Objective for a corrected (unnormalized) channel; larger is better.
using ScoreFn = std::function<double(const ProcessMatrix&)>;

inline double trace_score(const ProcessMatrix& m) { return m.trace(); }

struct GateChoice {
    std::size_t gate = 0;             // first maximizer in enumeration order
    std::vector<std::size_t> tied;    // every maximizer, enumeration order
    double score = 0;
};

/// For each group pick the gate L maximizing score(L * group_sum).
inline std::vector<GateChoice> optimize_level(const std::vector<DistinctGroup>& groups, const TransversalGroup& gates,
                                              const std::vector<std::size_t>& candidates,
                                              const ScoreFn& score = trace_score, double tie_tol = kTieTolerance) {
    if (candidates.empty()) {
        throw std::invalid_argument("no logical gates to choose from");
    }
    std::vector<GateChoice> out;
    out.reserve(groups.size());
    std::vector<double> values(candidates.size());
    for (const auto& g : groups) {
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            values[c] = score(gates.elements[candidates[c]].matrix * g.sum);
        }
        double best = *std::max_element(values.begin(), values.end());
        double slack = tie_tol * std::abs(best);
        GateChoice choice;
        choice.score = best;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (values[c] >= best - slack) {
                choice.tied.push_back(candidates[c]);
            }
        }
        // A group that never occurs has nothing to decide.
        if (g.sum.mat().cwiseAbs().maxCoeff() == 0.0) {
            choice.tied.resize(1);
        }
        choice.gate = choice.tied.front();
        out.push_back(std::move(choice));
    }
    return out;
}

/// Cartesian product of the tied maximizers, one tuple per combination, in
/// lexicographic order with the first-choice tuple first.
inline std::vector<std::vector<std::size_t>> enumerate_tie_schedules(const std::vector<GateChoice>& choices,
                                                                     std::size_t cap = kMaxTieTuples) {
    std::size_t total = 1;
    for (const auto& c : choices) {
        if (c.tied.empty()) {
            throw std::invalid_argument("gate choice without candidates");
        }
        total *= c.tied.size();
        if (total > cap) {
            throw std::length_error("tie product exceeds " + std::to_string(cap) + " tuples");
        }
    }
    std::vector<std::vector<std::size_t>> out;
    out.reserve(total);
    std::vector<std::size_t> digit(choices.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<std::size_t> tuple(choices.size());
        for (std::size_t g = 0; g < choices.size(); ++g) tuple[g] = choices[g].tied[digit[g]];
        out.push_back(std::move(tuple));
        for (std::size_t g = choices.size(); g-- > 0;) {
            if (++digit[g] < choices[g].tied.size()) break;
            digit[g] = 0;
        }
    }
    return out;
}

/// Logical channel after applying gate gate_of_group[k] to every member of group k.
inline ProcessMatrix corrected_channel(const std::vector<DistinctGroup>& groups, const TransversalGroup& gates,
                                       const std::vector<std::size_t>& gate_of_group) {
    ProcessMatrix total;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        total += gates.elements[gate_of_group[k]].matrix * groups[k].sum;
    }
    return total;
}

/// Per-level recovery: base Pauli plus logical gate for every syndrome.
struct DecoderSchedule {
    struct Level {
        std::vector<PauliOp> recovery;
        std::vector<std::size_t> gate;  // index into the code's TransversalGroup
    };
    std::string code_name;
    DecoderMode mode = DecoderMode::symmetric;
    bool converged = false;
    std::vector<Level> levels;

    std::size_t depth() const { return levels.size(); }
};

struct LevelRecord {
    std::vector<DistinctGroup> groups;
    std::vector<GateChoice> choices;
    std::vector<std::size_t> gate_of_group;
    ProcessMatrix channel;  // G^(t) after corrections
};

struct HardDecodeOptions {
    std::size_t max_levels = 25;
    double xi = 0.01;
    double convergence_tol = kConvergenceTolerance;
    std::size_t divergence_run = 5;   // consecutive trace decreases before giving up
    bool stop_when_correctable = true;
    bool run_all_levels = false;      // ignore every early exit
    ScoreFn score = trace_score;
    std::optional<std::vector<std::size_t>> level1_gates;  // per group, overrides level 1
};

struct HardDecodeResult {
    std::vector<LevelRecord> levels;
    bool correctable = false;
    std::size_t levels_to_correct = 0;  // t(p); 0 when never correctable
    bool converged = false;
    std::string stop_reason;

    const ProcessMatrix& final_channel() const { return levels.back().channel; }
};

namespace detail {

inline LevelRecord decode_level(const CodeContext& ctx, const PhysicalNoise& noise, DecoderMode mode,
                                const HardDecodeOptions& opts, const std::vector<std::size_t>* forced) {
    LevelRecord rec;
    rec.groups = group_conditionals(conditional_channels(ctx.code, ctx.alpha, noise, ctx.table));
    rec.choices = optimize_level(rec.groups, ctx.gates, ctx.candidates(mode), opts.score);
    if (forced != nullptr) {
        if (forced->size() != rec.groups.size()) {
            throw std::invalid_argument("forced gate tuple has " + std::to_string(forced->size()) +
                                        " entries for " + std::to_string(rec.groups.size()) + " groups");
        }
        rec.gate_of_group = *forced;
    } else {
        for (const auto& c : rec.choices) rec.gate_of_group.push_back(c.gate);
    }
    rec.channel = settle_trace_row(corrected_channel(rec.groups, ctx.gates, rec.gate_of_group));
    return rec;
}

}  // namespace detail

/// Iterated hard decoding: each level groups the conditionals of the current
/// noise, picks logical corrections and feeds the corrected channel to the
/// next level. Symmetric mode always picks the identity.
inline HardDecodeResult run_hard_decoder(const CodeContext& ctx, const PhysicalNoise& noise, DecoderMode mode,
                                         const HardDecodeOptions& opts = {}) {
    if (opts.max_levels < 1) {
        throw std::invalid_argument("max_levels must be at least 1");
    }
    if (opts.max_levels > 1 && !ctx.code.concatenable) {
        throw std::invalid_argument(ctx.code.name + " cannot be concatenated; use max_levels = 1");
    }
    HardDecodeResult res;
    PhysicalNoise current = noise;
    std::size_t falling = 0;
    for (std::size_t t = 1; t <= opts.max_levels; ++t) {
        const std::vector<std::size_t>* forced = (t == 1 && opts.level1_gates) ? &*opts.level1_gates : nullptr;
        res.levels.push_back(detail::decode_level(ctx, current, mode, opts, forced));
        const ProcessMatrix& g = res.levels.back().channel;
        if (!res.correctable && g.trace() >= 4.0 - opts.xi) {
            res.correctable = true;
            res.levels_to_correct = t;
        }
        if (opts.run_all_levels) {
            current = PhysicalNoise::uniform(ctx.code.n, g);
            continue;
        }
        if (res.correctable && opts.stop_when_correctable) {
            res.stop_reason = "correctable";
            break;
        }
        if (t > 1) {
            const ProcessMatrix& prev = res.levels[t - 2].channel;
            if (g.max_abs_diff(prev) < opts.convergence_tol) {
                res.converged = true;
                res.stop_reason = "converged";
                break;
            }
            falling = g.trace() < prev.trace() ? falling + 1 : 0;
            if (falling >= opts.divergence_run) {
                res.stop_reason = "diverging";
                break;
            }
        }
        current = PhysicalNoise::uniform(ctx.code.n, g);
    }
    if (res.stop_reason.empty()) res.stop_reason = "max-levels";
    return res;
}

/// Per-syndrome view of a decoding run.
inline DecoderSchedule make_schedule(const CodeContext& ctx, const HardDecodeResult& res, DecoderMode mode) {
    DecoderSchedule s;
    s.code_name = ctx.code.name;
    s.mode = mode;
    s.converged = res.converged;
    for (const auto& lv : res.levels) {
        DecoderSchedule::Level out;
        out.recovery = ctx.table.recovery;
        out.gate.assign(ctx.table.size(), 0);
        for (std::size_t k = 0; k < lv.groups.size(); ++k) {
            for (auto l : lv.groups[k].members) out.gate[l] = lv.gate_of_group[k];
        }
        s.levels.push_back(std::move(out));
    }
    return s;
}

/// Channels G^(1..levels) when a fixed schedule is applied to `noise`. Levels
/// beyond the schedule depth reuse its last level.
inline std::vector<ProcessMatrix> apply_schedule(const CodeContext& ctx, const PhysicalNoise& noise,
                                                 const DecoderSchedule& schedule, std::size_t levels) {
    if (schedule.levels.empty()) {
        throw std::invalid_argument("empty decoder schedule");
    }
    if (levels > 1 && !ctx.code.concatenable) {
        throw std::invalid_argument(ctx.code.name + " cannot be concatenated");
    }
    std::vector<ProcessMatrix> out;
    PhysicalNoise current = noise;
    for (std::size_t t = 0; t < levels; ++t) {
        const auto& lv = schedule.levels[std::min(t, schedule.levels.size() - 1)];
        SyndromeTable table{ctx.code.num_generators(), lv.recovery};
        auto cond = conditional_channels(ctx.code, ctx.alpha, current, table);
        ProcessMatrix g;
        for (std::size_t l = 0; l < cond.size(); ++l) {
            g += ctx.gates.elements[lv.gate[l]].matrix * cond[l].matrix;
        }
        g = settle_trace_row(g);
        out.push_back(g);
        current = PhysicalNoise::uniform(ctx.code.n, g);
    }
    return out;
}

/// Text form: a header, then per level one line per syndrome with the
/// syndrome bits, recovery letters and gate name.
inline std::string serialize_schedule(const DecoderSchedule& s, const TransversalGroup& gates,
                                      std::size_t num_generators) {
    std::ostringstream os;
    os << "# qecopt decoder schedule v1\n";
    os << "code " << s.code_name << "\n";
    os << "mode " << to_string(s.mode) << "\n";
    os << "converged " << (s.converged ? 1 : 0) << "\n";
    os << "levels " << s.levels.size() << "\n";
    for (std::size_t t = 0; t < s.levels.size(); ++t) {
        os << "level " << (t + 1) << "\n";
        const auto& lv = s.levels[t];
        for (std::size_t l = 0; l < lv.recovery.size(); ++l) {
            os << syndrome_string(l, num_generators) << ' ' << lv.recovery[l].letters() << ' '
               << gates.elements[lv.gate[l]].name << "\n";
        }
    }
    return os.str();
}

inline DecoderSchedule parse_schedule(std::istream& in, const TransversalGroup& gates) {
    DecoderSchedule s;
    std::string line;
    std::size_t expected_levels = 0;
    auto fail = [](const std::string& what) { throw std::invalid_argument("decoder schedule: " + what); };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "code") {
            ls >> s.code_name;
        } else if (head == "mode") {
            std::string m;
            ls >> m;
            s.mode = parse_decoder_mode(m);
        } else if (head == "converged") {
            int c = 0;
            ls >> c;
            s.converged = c != 0;
        } else if (head == "levels") {
            ls >> expected_levels;
        } else if (head == "level") {
            s.levels.emplace_back();
        } else {
            if (s.levels.empty()) fail("entry before any 'level' line");
            std::string letters, gate;
            ls >> letters >> gate;
            if (letters.empty() || gate.empty()) fail("malformed line '" + line + "'");
            // Syndrome bits are written with generator 0 first.
            std::uint64_t l = 0;
            for (std::size_t j = 0; j < head.size(); ++j) {
                if (head[j] == '1') {
                    l |= std::uint64_t{1} << j;
                } else if (head[j] != '0') {
                    fail("bad syndrome '" + head + "'");
                }
            }
            auto& lv = s.levels.back();
            if (l != lv.recovery.size()) fail("syndromes must be listed in order");
            auto idx = gates.find(gate);
            if (!idx) fail("unknown gate '" + gate + "'");
            lv.recovery.push_back(PauliOp::from_string(letters));
            lv.gate.push_back(*idx);
        }
    }
    if (s.levels.size() != expected_levels) {
        fail("expected " + std::to_string(expected_levels) + " levels, found " + std::to_string(s.levels.size()));
    }
    return s;
}

}  // namespace qecopt
