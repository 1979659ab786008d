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

// Brute-force reference for the coefficient engine. Everything here works on
// explicit 2^n state vectors and density matrices, so it is slow and limited
// to n <= 9, but it shares no algebra with logical_channel.hpp beyond the
// PauliOp type.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qecopt/channel.hpp"
#include "qecopt/code.hpp"
#include "qecopt/logical_channel.hpp"
#include "qecopt/pauli.hpp"

namespace qecopt {

inline constexpr std::size_t kMaxDenseQubits = 9;

using StateVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;

// Basis index bit q is qubit q, which matches the PauliOp bit layout.

/// P|k> = i^phase (-1)^{z.(k^x)} |k^x>.
inline StateVector apply_pauli(const PauliOp& p, const StateVector& v) {
    std::size_t dim = std::size_t{1} << p.n();
    if (static_cast<std::size_t>(v.size()) != dim) {
        throw DimensionError("state vector size does not match Pauli operator");
    }
    static const cplx kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    cplx global = kPhase[p.phase_exp()];
    StateVector out(v.size());
    for (std::size_t k = 0; k < dim; ++k) {
        std::size_t target = k ^ p.x_bits();
        double s = (std::popcount(p.z_bits() & target) & 1) ? -1.0 : 1.0;
        out(static_cast<Eigen::Index>(target)) = global * s * v(static_cast<Eigen::Index>(k));
    }
    return out;
}

/// Explicit 2^n x 2^n matrix of a Pauli operator.
inline DenseMatrix dense_matrix(const PauliOp& p) {
    if (p.n() > 12) {
        throw DimensionError("dense Pauli matrices are limited to 12 qubits");
    }
    auto dim = static_cast<Eigen::Index>(std::size_t{1} << p.n());
    DenseMatrix out = DenseMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        StateVector e = StateVector::Zero(dim);
        e(k) = 1;
        out.col(k) = apply_pauli(p, e);
    }
    return out;
}

/// Mixture of product Kraus channels on n qubits.
struct DenseNoise {
    struct Term {
        double weight = 1.0;
        std::vector<KrausChannel> per_qubit;
    };
    std::vector<Term> terms;

    static DenseNoise uniform(std::size_t n, const KrausChannel& k) { return {{{1.0, std::vector<KrausChannel>(n, k)}}}; }

    /// (1-q) local^{(x)n} + (q/n) sum_j Z_j Z_{j+1}, ring order.
    static DenseNoise correlated_ring(std::size_t n, const KrausChannel& local, double q) {
        require_unit_interval(q, "correlation probability q");
        const auto& pm = pauli_matrices();
        DenseNoise out;
        out.terms.push_back({1 - q, std::vector<KrausChannel>(n, local)});
        if (q > 0) {
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<KrausChannel> slots(n, KrausChannel({pm[0]}));
                slots[j] = KrausChannel({pm[3]});
                slots[(j + 1) % n] = KrausChannel({pm[3]});
                out.terms.push_back({q / static_cast<double>(n), std::move(slots)});
            }
        }
        return out;
    }

    std::size_t n() const { return terms.empty() ? 0 : terms.front().per_qubit.size(); }

    /// The same noise as process matrices, for the coefficient engine.
    PhysicalNoise to_physical() const {
        PhysicalNoise out;
        for (const auto& t : terms) {
            PhysicalNoise::Term pt;
            pt.weight = t.weight;
            for (const auto& k : t.per_qubit) pt.per_qubit.push_back(kraus_to_process(k));
            out.terms.push_back(std::move(pt));
        }
        return out;
    }
};

/// Explicit codewords and generator list of a stabilizer code.
struct DenseCode {
    const StabilizerCode* code = nullptr;
    std::array<StateVector, 2> codeword;  // |0_L>, |1_L>
    std::array<Mat2, 4> logical;          // <a_L| code.logical(t) |b_L>

    std::size_t n() const { return code->n; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(std::size_t{1} << code->n); }
};

/// prod_j (I + (-1)^{l_j} g_j)/2 applied to v.
inline StateVector project_syndrome(const StabilizerCode& code, std::uint64_t l, const StateVector& v) {
    StateVector out = v;
    for (std::size_t j = 0; j < code.generators.size(); ++j) {
        StateVector gv = apply_pauli(code.generators[j], out);
        if ((l >> j) & 1u) {
            out = 0.5 * (out - gv);
        } else {
            out = 0.5 * (out + gv);
        }
    }
    return out;
}

/// |0_L> is the largest-norm column of P_0 (I + Z_L)/2, normalized; |1_L> = X_L|0_L>.
inline DenseCode build_dense_code(const StabilizerCode& code) {
    if (code.n > kMaxDenseQubits) {
        throw DimensionError("dense oracle is limited to " + std::to_string(kMaxDenseQubits) + " qubits");
    }
    DenseCode out;
    out.code = &code;
    Eigen::Index dim = out.dim();
    double trace = 0;
    double best = -1;
    StateVector pick;
    for (Eigen::Index k = 0; k < dim; ++k) {
        StateVector e = StateVector::Zero(dim);
        e(k) = 1;
        StateVector col = project_syndrome(code, 0, e);
        trace += col(k).real();
        StateVector zcol = 0.5 * (col + apply_pauli(code.logical_z, col));
        double norm = zcol.norm();
        if (norm > best + 1e-12) {
            best = norm;
            pick = zcol;
        }
    }
    if (std::abs(trace - 2.0) > 1e-9) {
        throw std::invalid_argument("code space projector has rank " + std::to_string(trace) + ", expected 2");
    }
    out.codeword[0] = pick / pick.norm();
    out.codeword[1] = apply_pauli(code.logical_x, out.codeword[0]);
    for (int t = 0; t < 4; ++t) {
        PauliOp op = code.logical(t);
        for (int b = 0; b < 2; ++b) {
            StateVector w = apply_pauli(op, out.codeword[b]);
            for (int a = 0; a < 2; ++a) out.logical[t](a, b) = out.codeword[a].dot(w);
        }
    }
    return out;
}

namespace detail {

/// rho -> sum_k A_k rho A_k^dagger with A_k acting on qubit q.
inline void apply_kraus_on_qubit(DenseMatrix& rho, const KrausChannel& k, std::size_t q) {
    const Eigen::Index dim = rho.rows();
    const Eigen::Index bit = Eigen::Index{1} << q;
    DenseMatrix out = DenseMatrix::Zero(dim, dim);
    DenseMatrix left(dim, dim);
    for (const auto& a : k.ops()) {
        const cplx a00 = a(0, 0), a01 = a(0, 1), a10 = a(1, 0), a11 = a(1, 1);
        // Column-major storage: the row pairs (r, r|bit) sit inside one column.
        for (Eigen::Index c = 0; c < dim; ++c) {
            const cplx* src = rho.data() + c * dim;
            cplx* dst = left.data() + c * dim;
            for (Eigen::Index r = 0; r < dim; ++r) {
                if (r & bit) continue;
                cplx x0 = src[r];
                cplx x1 = src[r | bit];
                dst[r] = a00 * x0 + a01 * x1;
                dst[r | bit] = a10 * x0 + a11 * x1;
            }
        }
        const cplx b00 = std::conj(a00), b01 = std::conj(a01), b10 = std::conj(a10), b11 = std::conj(a11);
        for (Eigen::Index c = 0; c < dim; ++c) {
            if (c & bit) continue;
            const cplx* l0 = left.data() + c * dim;
            const cplx* l1 = left.data() + (c | bit) * dim;
            cplx* o0 = out.data() + c * dim;
            cplx* o1 = out.data() + (c | bit) * dim;
            for (Eigen::Index r = 0; r < dim; ++r) {
                o0[r] += b00 * l0[r] + b01 * l1[r];
                o1[r] += b10 * l0[r] + b11 * l1[r];
            }
        }
    }
    rho = std::move(out);
}

/// N(E_t) for the encoded normalized logical Pauli E_t = code.logical(t)/sqrt 2
/// restricted to the code space.
inline std::array<DenseMatrix, 4> noisy_logical_basis(const DenseCode& dc, const DenseNoise& noise) {
    if (noise.n() != dc.n()) {
        throw DimensionError("noise acts on " + std::to_string(noise.n()) + " qubits, code has " +
                             std::to_string(dc.n()));
    }
    const auto& pm = dc.logical;
    std::array<DenseMatrix, 4> out;
    for (int t = 0; t < 4; ++t) {
        DenseMatrix e = DenseMatrix::Zero(dc.dim(), dc.dim());
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                e += pm[t](a, b) / std::sqrt(2.0) * dc.codeword[a] * dc.codeword[b].adjoint();
            }
        }
        out[t] = DenseMatrix::Zero(dc.dim(), dc.dim());
        for (const auto& term : noise.terms) {
            DenseMatrix rho = e;
            for (std::size_t q = 0; q < dc.n(); ++q) {
                apply_kraus_on_qubit(rho, term.per_qubit[q], q);
            }
            out[t] += term.weight * rho;
        }
    }
    return out;
}

inline ProcessMatrix conditional_from_images(const DenseCode& dc, const std::array<DenseMatrix, 4>& images,
                                             const PauliOp& recovery) {
    const auto& pm = dc.logical;
    std::uint64_t l = syndrome(recovery, *dc.code);
    // v_a = P_l R^dagger |a_L>; a Pauli is either Hermitian or anti-Hermitian.
    std::array<StateVector, 2> v;
    for (int a = 0; a < 2; ++a) {
        StateVector w = apply_pauli(recovery, dc.codeword[a]);
        if (!recovery.is_hermitian()) w = -w;
        v[a] = project_syndrome(*dc.code, l, w);
    }
    // Codewords are sparse in the computational basis; skip exact zeros.
    std::array<std::vector<Eigen::Index>, 2> support;
    for (int a = 0; a < 2; ++a) {
        for (Eigen::Index i = 0; i < v[a].size(); ++i) {
            if (v[a](i) != cplx(0, 0)) support[a].push_back(i);
        }
    }
    ProcessMatrix out;
    for (int t = 0; t < 4; ++t) {
        cplx m[2][2];
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                cplx acc = 0;  // <v_b| rho |v_a>
                for (Eigen::Index i : support[b]) {
                    cplx row = 0;
                    for (Eigen::Index j : support[a]) row += images[t](i, j) * v[a](j);
                    acc += std::conj(v[b](i)) * row;
                }
                m[b][a] = acc;
            }
        }
        for (int s = 0; s < 4; ++s) {
            cplx g = 0;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    g += pm[s](a, b) / std::sqrt(2.0) * m[b][a];
                }
            }
            if (std::abs(g.imag()) > 1e-10) {
                throw std::logic_error("oracle conditional has imaginary part " + std::to_string(g.imag()));
            }
            out(s, t) = g.real();
        }
    }
    return out;
}

}  // namespace detail

/// Unnormalized conditional channel for the syndrome of `recovery`, applying
/// the recovery after the projective syndrome measurement.
inline ProcessMatrix oracle_conditional(const DenseCode& dc, const DenseNoise& noise, const PauliOp& recovery) {
    return detail::conditional_from_images(dc, detail::noisy_logical_basis(dc, noise), recovery);
}

inline std::vector<ProcessMatrix> oracle_conditionals(const DenseCode& dc, const DenseNoise& noise,
                                                      const SyndromeTable& table) {
    auto images = detail::noisy_logical_basis(dc, noise);
    std::vector<ProcessMatrix> out;
    out.reserve(table.size());
    for (std::size_t l = 0; l < table.size(); ++l) {
        out.push_back(detail::conditional_from_images(dc, images, table[l]));
    }
    return out;
}

inline ProcessMatrix oracle_effective(const DenseCode& dc, const DenseNoise& noise, const SyndromeTable& table) {
    ProcessMatrix total;
    for (const auto& c : oracle_conditionals(dc, noise, table)) total += c;
    return total;
}

}  // namespace qecopt
