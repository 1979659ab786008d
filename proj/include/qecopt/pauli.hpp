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

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qecopt {

/// Thrown when operands disagree on qubit count or shape.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxQubits = 64;

/// An n-qubit Pauli operator i^phase * Z(z) X(x) in symplectic form.
///
/// Bit i of `z` and `x` refers to qubit i (qubit 0 is the leftmost character
/// of the string form). The operator is Z^{z_0} X^{x_0} (x) ... with the
/// global factor i^phase, so a single Y is stored as z=x=1, phase=3
/// (Y = -i ZX).
class PauliOp {
   public:
    PauliOp() = default;
    explicit PauliOp(std::size_t n, std::uint64_t z = 0, std::uint64_t x = 0, unsigned phase = 0)
        : n_(n), z_(z), x_(x), phase_(phase & 3u) {
        if (n > kMaxQubits) {
            throw DimensionError("PauliOp supports at most 64 qubits");
        }
        std::uint64_t mask = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
        if ((z & ~mask) != 0 || (x & ~mask) != 0) {
            throw DimensionError("PauliOp bits set beyond qubit count");
        }
    }

    static PauliOp identity(std::size_t n) { return PauliOp(n); }

    /// Hermitian Pauli from a string such as "XZZXI" or "-YY" or "+iXZ".
    /// Characters are I, X, Y, Z (also '_' for identity). The optional sign
    /// prefix multiplies the tensor product of the letters.
    static PauliOp from_string(std::string_view text) {
        unsigned sign_phase = 0;
        std::size_t pos = 0;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            sign_phase = text[pos] == '-' ? 2 : 0;
            ++pos;
        }
        if (pos < text.size() && text[pos] == 'i') {
            sign_phase += 1;
            ++pos;
        }
        std::string_view body = text.substr(pos);
        if (body.size() > kMaxQubits) {
            throw DimensionError("Pauli string longer than 64 qubits");
        }
        std::uint64_t z = 0;
        std::uint64_t x = 0;
        unsigned y_count = 0;
        for (std::size_t q = 0; q < body.size(); ++q) {
            switch (body[q]) {
                case 'I':
                case '_':
                    break;
                case 'X':
                    x |= std::uint64_t{1} << q;
                    break;
                case 'Z':
                    z |= std::uint64_t{1} << q;
                    break;
                case 'Y':
                    x |= std::uint64_t{1} << q;
                    z |= std::uint64_t{1} << q;
                    ++y_count;
                    break;
                default:
                    throw std::invalid_argument("invalid Pauli character '" + std::string(1, body[q]) +
                                                "' in \"" + std::string(text) + "\"");
            }
        }
        // Each Y contributes -i relative to ZX.
        return PauliOp(body.size(), z, x, (sign_phase + 3u * y_count) & 3u);
    }

    std::size_t n() const { return n_; }
    std::uint64_t z_bits() const { return z_; }
    std::uint64_t x_bits() const { return x_; }
    unsigned phase_exp() const { return phase_; }

    bool z_at(std::size_t q) const { return (z_ >> q) & 1u; }
    bool x_at(std::size_t q) const { return (x_ >> q) & 1u; }

    /// Letter index at qubit q: 0=I, 1=X, 2=Y, 3=Z.
    unsigned letter(std::size_t q) const {
        unsigned zb = z_at(q);
        unsigned xb = x_at(q);
        return xb ? (zb ? 2u : 1u) : (zb ? 3u : 0u);
    }

    /// Phase of this operator relative to the tensor product of letters,
    /// i.e. P = i^k * (mu_0 (x) ... (x) mu_{n-1}); returns k mod 4.
    unsigned tensor_phase() const {
        return (phase_ + static_cast<unsigned>(std::popcount(z_ & x_))) & 3u;
    }

    bool is_hermitian() const { return (tensor_phase() & 1u) == 0; }

    /// +1 or -1 for Hermitian operators. Undefined for non-Hermitian ones.
    int sign() const { return tensor_phase() == 0 ? 1 : -1; }

    /// The same Pauli with the tensor-product phase removed (phi(U)).
    PauliOp unsigned_part() const {
        return PauliOp(n_, z_, x_, (4u - static_cast<unsigned>(std::popcount(z_ & x_)) % 4u) & 3u);
    }

    PauliOp times_phase(unsigned k) const { return PauliOp(n_, z_, x_, phase_ + k); }

    std::string str() const {
        static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
        static constexpr const char* kPrefix[] = {"+", "+i", "-", "-i"};
        std::string out = kPrefix[tensor_phase()];
        for (std::size_t q = 0; q < n_; ++q) {
            out.push_back(kLetters[letter(q)]);
        }
        return out;
    }

    /// Letters only, without any sign prefix.
    std::string letters() const { return str().substr(tensor_phase() == 0 || tensor_phase() == 2 ? 1 : 2); }

    bool operator==(const PauliOp&) const = default;

   private:
    std::size_t n_ = 0;
    std::uint64_t z_ = 0;
    std::uint64_t x_ = 0;
    unsigned phase_ = 0;
};

inline void require_same_size(const PauliOp& p, const PauliOp& q) {
    if (p.n() != q.n()) {
        throw DimensionError("Pauli operators act on " + std::to_string(p.n()) + " and " + std::to_string(q.n()) +
                             " qubits");
    }
}

/// Exact product p*q including phase.
inline PauliOp pauli_mul(const PauliOp& p, const PauliOp& q) {
    require_same_size(p, q);
    // Z(a)X(b) Z(c)X(d) = (-1)^{b.c} Z(a+c) X(b+d)
    unsigned swap = static_cast<unsigned>(std::popcount(p.x_bits() & q.z_bits())) & 1u;
    return PauliOp(p.n(), p.z_bits() ^ q.z_bits(), p.x_bits() ^ q.x_bits(),
                   p.phase_exp() + q.phase_exp() + 2u * swap);
}

inline PauliOp operator*(const PauliOp& p, const PauliOp& q) { return pauli_mul(p, q); }

/// +1 if p and q commute, -1 if they anticommute.
inline int commutes(const PauliOp& p, const PauliOp& q) {
    require_same_size(p, q);
    auto parity = std::popcount((p.z_bits() & q.x_bits()) ^ (p.x_bits() & q.z_bits())) & 1;
    return parity ? -1 : 1;
}

inline std::size_t weight(const PauliOp& p) {
    return static_cast<std::size_t>(std::popcount(p.z_bits() | p.x_bits()));
}

}  // namespace qecopt
