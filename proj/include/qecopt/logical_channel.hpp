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

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qecopt/channel.hpp"
#include "qecopt/code.hpp"
#include "qecopt/pauli.hpp"

namespace qecopt {

/// Physical noise on a code block: a convex mixture of product channels.
/// Uncorrelated noise is a single term; ring-correlated dephasing adds one
/// term per adjacent pair.
struct PhysicalNoise {
    struct Term {
        double weight = 1.0;
        std::vector<ProcessMatrix> per_qubit;
    };
    std::vector<Term> terms;

    static PhysicalNoise uniform(std::size_t n, const ProcessMatrix& m) {
        return {{{1.0, std::vector<ProcessMatrix>(n, m)}}};
    }
    static PhysicalNoise product(std::vector<ProcessMatrix> per_qubit) { return {{{1.0, std::move(per_qubit)}}}; }

    /// (1-q) local^{(x)n} + (q/n) sum_j Z_j Z_{j+1} (ring order, wrap-around).
    static PhysicalNoise correlated_ring(std::size_t n, const ProcessMatrix& local, double q) {
        require_unit_interval(q, "correlation probability q");
        PhysicalNoise noise;
        noise.terms.push_back({1 - q, std::vector<ProcessMatrix>(n, local)});
        if (q > 0) {
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<ProcessMatrix> slots(n, ProcessMatrix::identity());
                slots[j] = pauli_conjugation(3);
                slots[(j + 1) % n] = pauli_conjugation(3);
                noise.terms.push_back({q / static_cast<double>(n), std::move(slots)});
            }
        }
        return noise;
    }

    std::size_t n() const { return terms.empty() ? 0 : terms.front().per_qubit.size(); }

    /// True when every term is the same channel on all qubits with weight 1.
    bool is_uniform_product() const {
        if (terms.size() != 1) return false;
        const auto& q = terms.front().per_qubit;
        for (const auto& m : q) {
            if (m.max_abs_diff(q.front()) != 0) return false;
        }
        return true;
    }
};

/// Sum of values by recursive halving.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Expansion of the encoded logical basis in normalized n-qubit Paulis.
///
/// For element m of the stabilizer group and logical label t, the Pauli
/// S_m * logical(t) equals sign[t][m] * (mu_0 (x) ... (x) mu_{n-1}), and the
/// coefficient is sign * scale with scale = 2^{-(n-1)/2}.
struct AlphaTable {
    std::size_t n = 0;
    double scale = 0;
    std::vector<SignedStabilizerElement> group;
    std::array<std::vector<PauliOp>, 4> products;  // S_m * logical(t)
    std::array<std::vector<int>, 4> sign;
    std::array<std::vector<std::uint64_t>, 4> letters;  // 2 bits per qubit

    std::size_t size() const { return group.size(); }
    double value(std::size_t m, int t) const { return scale * sign[t][m]; }
    unsigned letter(int t, std::size_t m, std::size_t q) const {
        return static_cast<unsigned>((letters[t][m] >> (2 * q)) & 3u);
    }
};

inline constexpr std::size_t kMaxEngineQubits = 32;

inline std::uint64_t pack_letters(const PauliOp& p) {
    std::uint64_t out = 0;
    for (std::size_t q = 0; q < p.n(); ++q) {
        out |= static_cast<std::uint64_t>(p.letter(q)) << (2 * q);
    }
    return out;
}

/// Sign of S_m * logical(t) from the symplectic closed form: the generator
/// reordering phase, the Z/X swap between S and the logical, and the i^{a.b}
/// conversion to a tensor product of Pauli letters.
inline int alpha_sign_closed_form(const StabilizerCode& code, std::uint64_t mask, int t) {
    std::uint64_t abar = 0;
    std::uint64_t bbar = 0;
    for (std::size_t j = 0; j < code.generators.size(); ++j) {
        if ((mask >> j) & 1u) {
            abar ^= code.generators[j].z_bits();
            bbar ^= code.generators[j].x_bits();
        }
    }
    PauliOp tau = code.logical(t);
    unsigned k = reordering_phase(code, mask) + tau.phase_exp();
    k += 2u * (static_cast<unsigned>(std::popcount(bbar & tau.z_bits())) & 1u);
    k += static_cast<unsigned>(std::popcount((abar ^ tau.z_bits()) & (bbar ^ tau.x_bits())));
    k &= 3u;
    if (k & 1u) {
        throw std::logic_error(code.name + ": stabilizer times logical is not Hermitian");
    }
    return k == 0 ? 1 : -1;
}

inline AlphaTable build_alpha(const StabilizerCode& code) {
    if (code.n > kMaxEngineQubits) {
        throw DimensionError("logical channel engine supports at most 32 qubits");
    }
    AlphaTable table;
    table.n = code.n;
    table.scale = std::pow(2.0, -0.5 * static_cast<double>(code.n - 1));
    table.group = stabilizer_group(code);
    for (int t = 0; t < 4; ++t) {
        PauliOp logical = code.logical(t);
        for (const auto& el : table.group) {
            PauliOp prod = pauli_mul(el.element, logical);
            if (!prod.is_hermitian()) {
                throw std::logic_error(code.name + ": stabilizer times logical is not Hermitian");
            }
            table.products[t].push_back(prod);
            table.sign[t].push_back(prod.sign());
            table.letters[t].push_back(pack_letters(prod));
        }
    }
    return table;
}

/// Coefficients of D_s = R^dag E_s R for one syndrome.
struct BetaTable {
    std::uint64_t syndrome = 0;
    PauliOp recovery;
    std::array<std::vector<double>, 4> value;  // [sigma][m]
};

/// Beta tables for every syndrome of `table`. Each entry is computed twice,
/// from commutation signs eta(R,S) eta(R,logical) and from the symplectic
/// form of R against S*logical; a mismatch throws.
inline std::vector<BetaTable> build_beta(const StabilizerCode& code, const AlphaTable& alpha,
                                         const SyndromeTable& table) {
    if (table.size() != code.num_syndromes()) {
        throw std::invalid_argument("syndrome table does not cover all syndromes");
    }
    std::vector<BetaTable> out;
    out.reserve(table.size());
    for (std::uint64_t l = 0; l < table.size(); ++l) {
        const PauliOp& r = table[l];
        BetaTable b;
        b.syndrome = l;
        b.recovery = r;
        for (int s = 0; s < 4; ++s) {
            PauliOp logical = code.logical(s);
            int eta_logical = commutes(r, logical);
            b.value[s].resize(alpha.size());
            for (std::size_t m = 0; m < alpha.size(); ++m) {
                int eta_product = commutes(r, alpha.group[m].element) * eta_logical;
                const PauliOp& prod = alpha.products[s][m];
                int symplectic = (std::popcount((r.z_bits() & prod.x_bits()) ^ (r.x_bits() & prod.z_bits())) & 1)
                                     ? -1
                                     : 1;
                if (eta_product != symplectic) {
                    throw std::logic_error(code.name + ": beta sign mismatch at syndrome " +
                                           syndrome_string(l, code.num_generators()));
                }
                b.value[s][m] = alpha.value(m, s) * eta_product;
            }
        }
        out.push_back(std::move(b));
    }
    return out;
}

/// Unnormalized logical channel given one syndrome outcome and recovery.
/// Entry (I,I) is the probability of the syndrome.
struct ConditionalChannel {
    std::uint64_t syndrome = 0;
    ProcessMatrix matrix;
    PauliOp recovery;

    double probability() const { return matrix(0, 0); }
};

namespace detail {

inline void require_noise_size(const AlphaTable& alpha, const PhysicalNoise& noise) {
    if (noise.terms.empty()) {
        throw std::invalid_argument("physical noise has no terms");
    }
    for (const auto& term : noise.terms) {
        if (term.per_qubit.size() != alpha.n) {
            throw DimensionError("noise has " + std::to_string(term.per_qubit.size()) + " qubits, code has " +
                                 std::to_string(alpha.n));
        }
    }
}

/// Per-qubit 16-entry lookup: entry[q][nu * 4 + mu] = N_q(nu, mu).
inline std::vector<std::array<double, 16>> lookup_tables(const std::vector<ProcessMatrix>& per_qubit) {
    std::vector<std::array<double, 16>> out(per_qubit.size());
    for (std::size_t q = 0; q < per_qubit.size(); ++q) {
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                out[q][r * 4 + c] = per_qubit[q](r, c);
            }
        }
    }
    return out;
}

inline double letter_product(const std::vector<std::array<double, 16>>& lut, std::uint64_t nu, std::uint64_t mu,
                             std::size_t n) {
    double prod = 1;
    for (std::size_t q = 0; q < n && prod != 0; ++q) {
        prod *= lut[q][((nu >> (2 * q)) & 3u) * 4 + ((mu >> (2 * q)) & 3u)];
    }
    return prod;
}

inline void walsh_hadamard(std::vector<double>& v) {
    for (std::size_t h = 1; h < v.size(); h <<= 1) {
        for (std::size_t i = 0; i < v.size(); i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                double a = v[j];
                double b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

}  // namespace detail

/// Direct evaluation of one conditional channel from the double sum over
/// stabilizer elements with beta coefficients. Cost 16 * 4^{n-1} * n.
inline ConditionalChannel conditional_channel(const StabilizerCode& code, const AlphaTable& alpha,
                                              const PhysicalNoise& noise, const PauliOp& recovery) {
    detail::require_noise_size(alpha, noise);
    if (recovery.n() != code.n) {
        throw DimensionError("recovery operator has wrong qubit count");
    }
    ConditionalChannel out;
    out.syndrome = syndrome(recovery, code);
    out.recovery = recovery;
    std::size_t size = alpha.size();
    std::vector<double> terms(size * size);
    for (int s = 0; s < 4; ++s) {
        int eta_logical = commutes(recovery, code.logical(s));
        std::vector<double> beta(size);
        for (std::size_t m = 0; m < size; ++m) {
            beta[m] = alpha.value(m, s) * eta_logical * commutes(recovery, alpha.group[m].element);
        }
        for (int t = 0; t < 4; ++t) {
            double total = 0;
            for (const auto& term : noise.terms) {
                auto lut = detail::lookup_tables(term.per_qubit);
                for (std::size_t m1 = 0; m1 < size; ++m1) {
                    for (std::size_t m2 = 0; m2 < size; ++m2) {
                        terms[m1 * size + m2] = beta[m1] * alpha.value(m2, t) *
                                                detail::letter_product(lut, alpha.letters[s][m1],
                                                                       alpha.letters[t][m2], alpha.n);
                    }
                }
                total += term.weight * pairwise_sum(terms);
            }
            out.matrix(s, t) = total;
        }
    }
    return out;
}

/// Channels C(l) for every syndrome l, before the recovery's logical class is
/// applied: the conditional channel with recovery R is diag(1, eta(R,X_L),
/// eta(R,Y_L), eta(R,Z_L)) * C(l). Uses a Walsh-Hadamard transform over the
/// stabilizer group, since eta(R, S_m) = (-1)^{l.m}.
inline std::vector<ProcessMatrix> syndrome_channels(const AlphaTable& alpha, const PhysicalNoise& noise) {
    detail::require_noise_size(alpha, noise);
    std::size_t size = alpha.size();
    std::array<std::vector<double>, 16> coeff;
    for (auto& c : coeff) c.assign(size, 0.0);
    std::vector<double> inner(size);
    for (const auto& term : noise.terms) {
        auto lut = detail::lookup_tables(term.per_qubit);
        for (int s = 0; s < 4; ++s) {
            for (std::size_t m1 = 0; m1 < size; ++m1) {
                std::uint64_t nu = alpha.letters[s][m1];
                double a1 = alpha.value(m1, s);
                for (int t = 0; t < 4; ++t) {
                    for (std::size_t m2 = 0; m2 < size; ++m2) {
                        inner[m2] = alpha.sign[t][m2] * detail::letter_product(lut, nu, alpha.letters[t][m2], alpha.n);
                    }
                    coeff[s * 4 + t][m1] += term.weight * a1 * alpha.scale * pairwise_sum(inner);
                }
            }
        }
    }
    for (auto& c : coeff) detail::walsh_hadamard(c);
    std::vector<ProcessMatrix> out(size);
    for (std::size_t l = 0; l < size; ++l) {
        for (int s = 0; s < 4; ++s) {
            for (int t = 0; t < 4; ++t) {
                out[l](s, t) = coeff[s * 4 + t][l];
            }
        }
    }
    return out;
}

/// Logical action of a recovery: diag(1, eta(R,X_L), eta(R,Y_L), eta(R,Z_L)).
inline ProcessMatrix recovery_logical_action(const StabilizerCode& code, const PauliOp& recovery) {
    return ProcessMatrix::diagonal(1, commutes(recovery, code.logical(1)), commutes(recovery, code.logical(2)),
                                   commutes(recovery, code.logical(3)));
}

/// Conditional channels for every syndrome using the table's recoveries.
inline std::vector<ConditionalChannel> conditional_channels(const StabilizerCode& code, const AlphaTable& alpha,
                                                            const PhysicalNoise& noise, const SyndromeTable& table) {
    if (table.size() != code.num_syndromes()) {
        throw std::invalid_argument("syndrome table does not cover all syndromes");
    }
    auto raw = syndrome_channels(alpha, noise);
    std::vector<ConditionalChannel> out(raw.size());
    for (std::uint64_t l = 0; l < raw.size(); ++l) {
        out[l].syndrome = l;
        out[l].recovery = table[l];
        out[l].matrix = recovery_logical_action(code, table[l]) * raw[l];
    }
    return out;
}

/// Syndrome-averaged logical channel; the conditionals are summed without
/// renormalization.
inline ProcessMatrix effective_channel(const StabilizerCode& code, const AlphaTable& alpha,
                                       const PhysicalNoise& noise, const SyndromeTable& table) {
    ProcessMatrix total;
    for (const auto& c : conditional_channels(code, alpha, noise, table)) {
        total += c.matrix;
    }
    return total;
}

inline ProcessMatrix correlated_effective_channel(const StabilizerCode& code, const AlphaTable& alpha,
                                                  const ProcessMatrix& local, double q, const SyndromeTable& table) {
    return effective_channel(code, alpha, PhysicalNoise::correlated_ring(code.n, local, q), table);
}

/// One level of a concatenated code: the code and its decoding table.
struct ConcatenationLevel {
    const StabilizerCode* code = nullptr;
    const AlphaTable* alpha = nullptr;
    const SyndromeTable* table = nullptr;
};

/// Composition of coding maps; levels[0] is the innermost code and sees the
/// physical noise, every later level sees the previous logical channel on
/// each of its qubits.
inline std::vector<ProcessMatrix> concatenate(const std::vector<ConcatenationLevel>& levels,
                                              const PhysicalNoise& noise) {
    if (levels.empty()) {
        throw std::invalid_argument("concatenation needs at least one level");
    }
    if (levels.size() > 1) {
        for (const auto& lv : levels) {
            if (!lv.code->concatenable) {
                throw std::invalid_argument(lv.code->name + " cannot be concatenated");
            }
        }
    }
    std::vector<ProcessMatrix> out;
    ProcessMatrix current =
        settle_trace_row(effective_channel(*levels[0].code, *levels[0].alpha, noise, *levels[0].table));
    out.push_back(current);
    for (std::size_t t = 1; t < levels.size(); ++t) {
        const auto& lv = levels[t];
        current = settle_trace_row(
            effective_channel(*lv.code, *lv.alpha, PhysicalNoise::uniform(lv.code->n, current), *lv.table));
        out.push_back(current);
    }
    return out;
}

/// Same code and decoder at every level; returns the channels for t = 1..levels.
inline std::vector<ProcessMatrix> concatenate(const StabilizerCode& code, const PhysicalNoise& noise,
                                              const SyndromeTable& table, std::size_t levels) {
    if (levels < 1) {
        throw std::invalid_argument("concatenation level must be at least 1");
    }
    AlphaTable alpha = build_alpha(code);
    std::vector<ConcatenationLevel> stack(levels, ConcatenationLevel{&code, &alpha, &table});
    return concatenate(stack, noise);
}

}  // namespace qecopt
