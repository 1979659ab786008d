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
#include <deque>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qecopt/channel.hpp"
#include "qecopt/pauli.hpp"

namespace qecopt {

/// Stabilizer code encoding one logical qubit.
struct StabilizerCode {
    std::string name;
    std::size_t n = 0;
    std::vector<PauliOp> generators;
    PauliOp logical_x;
    PauliOp logical_z;
    std::vector<std::string> transversal_generators;
    bool concatenable = true;

    std::size_t num_generators() const { return generators.size(); }
    std::size_t num_syndromes() const { return std::size_t{1} << generators.size(); }

    /// Logical Pauli for label 0..3 (I, X, Y, Z), Hermitian. Y takes the
    /// letters of X Z with sign sign(X) * sign(Z), so for transversal
    /// logicals it is the letterwise product (Y^n for the Steane code, which
    /// is -i X Z there).
    PauliOp logical(int label) const {
        switch (label) {
            case 0:
                return PauliOp::identity(n);
            case 1:
                return logical_x;
            case 2:
            {
                PauliOp y = pauli_mul(logical_x, logical_z).unsigned_part();
                return logical_x.sign() * logical_z.sign() > 0 ? y : y.times_phase(2);
            }
            case 3:
                return logical_z;
        }
        throw std::out_of_range("logical label must be 0..3");
    }
};

/// Syndrome as an integer; bit j is the outcome of generator j.
inline std::uint64_t syndrome(const PauliOp& e, const StabilizerCode& code) {
    if (e.n() != code.n) {
        throw DimensionError("error acts on " + std::to_string(e.n()) + " qubits, code has " +
                             std::to_string(code.n));
    }
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < code.generators.size(); ++j) {
        if (commutes(e, code.generators[j]) < 0) {
            s |= std::uint64_t{1} << j;
        }
    }
    return s;
}

/// Syndrome bits written with generator 0 first, e.g. "10".
inline std::string syndrome_string(std::uint64_t s, std::size_t num_generators) {
    std::string out;
    for (std::size_t j = 0; j < num_generators; ++j) {
        out.push_back(((s >> j) & 1u) ? '1' : '0');
    }
    return out;
}

/// GF(2) rank of a set of Paulis viewed as 2n-bit vectors.
inline std::size_t symplectic_rank(const std::vector<PauliOp>& ops) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rows;
    for (const auto& p : ops) {
        rows.emplace_back(p.z_bits(), p.x_bits());
    }
    std::size_t rank = 0;
    std::size_t n = ops.empty() ? 0 : ops.front().n();
    for (std::size_t col = 0; col < 2 * n && rank < rows.size(); ++col) {
        auto bit = [&](const auto& r) {
            return col < n ? ((r.first >> col) & 1u) : ((r.second >> (col - n)) & 1u);
        };
        std::size_t pivot = rank;
        while (pivot < rows.size() && !bit(rows[pivot])) {
            ++pivot;
        }
        if (pivot == rows.size()) {
            continue;
        }
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && bit(rows[r])) {
                rows[r].first ^= rows[rank].first;
                rows[r].second ^= rows[rank].second;
            }
        }
        ++rank;
    }
    return rank;
}

/// Checks all structural invariants; throws std::invalid_argument on failure.
inline void validate_code(const StabilizerCode& code) {
    if (code.generators.empty() || code.generators.size() >= code.n + 1) {
        throw std::invalid_argument(code.name + ": need between 1 and n-1 generators");
    }
    if (code.generators.size() != code.n - 1) {
        throw std::invalid_argument(code.name + ": only codes with one logical qubit are supported");
    }
    for (const auto& g : code.generators) {
        if (g.n() != code.n) {
            throw DimensionError(code.name + ": generator " + g.str() + " has wrong length");
        }
        if (!g.is_hermitian()) {
            throw std::invalid_argument(code.name + ": generator " + g.str() + " is not Hermitian");
        }
    }
    for (std::size_t i = 0; i < code.generators.size(); ++i) {
        for (std::size_t j = i + 1; j < code.generators.size(); ++j) {
            if (commutes(code.generators[i], code.generators[j]) < 0) {
                throw std::invalid_argument(code.name + ": generators " + code.generators[i].str() + " and " +
                                            code.generators[j].str() + " anticommute");
            }
        }
    }
    if (symplectic_rank(code.generators) != code.generators.size()) {
        throw std::invalid_argument(code.name + ": generators are not independent");
    }
    for (const auto* l : {&code.logical_x, &code.logical_z}) {
        if (l->n() != code.n || !l->is_hermitian()) {
            throw std::invalid_argument(code.name + ": bad logical operator " + l->str());
        }
        for (const auto& g : code.generators) {
            if (commutes(*l, g) < 0) {
                throw std::invalid_argument(code.name + ": logical " + l->str() + " anticommutes with " + g.str());
            }
        }
    }
    if (commutes(code.logical_x, code.logical_z) > 0) {
        throw std::invalid_argument(code.name + ": logical X and Z must anticommute");
    }
    auto with_x = code.generators;
    with_x.push_back(code.logical_x);
    auto with_z = code.generators;
    with_z.push_back(code.logical_z);
    if (symplectic_rank(with_x) != code.n || symplectic_rank(with_z) != code.n) {
        throw std::invalid_argument(code.name + ": logical operator lies in the stabilizer group");
    }
}

/// A stabilizer group element with the mask of generators that produced it.
struct SignedStabilizerElement {
    PauliOp element;
    std::uint64_t generator_mask = 0;
};

/// All 2^{n-1} stabilizer group elements, ordered by generator mask.
inline std::vector<SignedStabilizerElement> stabilizer_group(const StabilizerCode& code) {
    std::size_t r = code.generators.size();
    std::vector<SignedStabilizerElement> out;
    out.reserve(std::size_t{1} << r);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
        PauliOp s = PauliOp::identity(code.n);
        for (std::size_t j = 0; j < r; ++j) {
            if ((mask >> j) & 1u) {
                s = pauli_mul(s, code.generators[j]);
            }
        }
        if (!s.is_hermitian()) {
            throw std::invalid_argument(code.name + ": generators do not commute");
        }
        if (mask != 0 && s.z_bits() == 0 && s.x_bits() == 0) {
            throw std::invalid_argument(code.name + ": stabilizer group contains -I or is dependent");
        }
        out.push_back({s, mask});
    }
    return out;
}

/// Sign exponent of a masked generator product obtained by moving all Z
/// factors to the left: sum_{l<t} b_{j_l} . a_{j_t} (mod 2), plus the
/// generators' own i-phases. Returns the i-exponent of the product relative
/// to Z(a_bar)X(b_bar).
inline unsigned reordering_phase(const StabilizerCode& code, std::uint64_t mask) {
    unsigned f = 0;
    unsigned own = 0;
    std::uint64_t x_so_far = 0;
    for (std::size_t j = 0; j < code.generators.size(); ++j) {
        if (!((mask >> j) & 1u)) {
            continue;
        }
        const auto& g = code.generators[j];
        f += static_cast<unsigned>(std::popcount(x_so_far & g.z_bits()));
        x_so_far ^= g.x_bits();
        own += g.phase_exp();
    }
    return (2u * (f & 1u) + own) & 3u;
}

/// Per-syndrome recovery Paulis.
struct SyndromeTable {
    std::size_t num_generators = 0;
    std::vector<PauliOp> recovery;  // indexed by syndrome integer

    const PauliOp& operator[](std::uint64_t s) const { return recovery.at(s); }
    std::size_t size() const { return recovery.size(); }
};

/// All Paulis of a given weight whose letters are drawn from `letters`
/// (subset of {1,2,3} for X, Y, Z), sorted by (z_bits, x_bits).
inline std::vector<PauliOp> paulis_of_weight(std::size_t n, std::size_t w, const std::vector<unsigned>& letters) {
    std::vector<PauliOp> out;
    std::vector<std::size_t> support(w);
    auto emit = [&](auto&& self, std::size_t idx, std::size_t start, std::uint64_t z, std::uint64_t x) -> void {
        if (idx == w) {
            out.push_back(PauliOp(n, z, x).times_phase(static_cast<unsigned>(std::popcount(z & x)) * 3u));
            return;
        }
        for (std::size_t q = start; q < n; ++q) {
            for (unsigned l : letters) {
                std::uint64_t bit = std::uint64_t{1} << q;
                std::uint64_t zz = z | ((l == 2 || l == 3) ? bit : 0);
                std::uint64_t xx = x | ((l == 1 || l == 2) ? bit : 0);
                self(self, idx + 1, q + 1, zz, xx);
            }
        }
    };
    emit(emit, 0, 0, 0, 0);
    std::sort(out.begin(), out.end(), [](const PauliOp& a, const PauliOp& b) {
        return a.z_bits() != b.z_bits() ? a.z_bits() < b.z_bits() : a.x_bits() < b.x_bits();
    });
    return out;
}

namespace detail {

inline std::vector<std::optional<PauliOp>> fill_by_weight(const StabilizerCode& code,
                                                          const std::vector<unsigned>& letters,
                                                          std::optional<std::uint64_t> tiebreak_seed) {
    std::size_t count = code.num_syndromes();
    std::vector<std::optional<PauliOp>> found(count);
    std::size_t filled = 0;
    std::mt19937_64 rng(tiebreak_seed.value_or(0));
    for (std::size_t w = 0; w <= code.n && filled < count; ++w) {
        auto candidates = paulis_of_weight(code.n, w, letters);
        if (tiebreak_seed) {
            std::shuffle(candidates.begin(), candidates.end(), rng);
        }
        for (const auto& p : candidates) {
            auto s = syndrome(p, code);
            if (!found[s]) {
                found[s] = p;
                ++filled;
            }
        }
    }
    return found;
}

}  // namespace detail

/// Minimum-weight decoder. Ties among equal-weight Paulis go to the smallest
/// (z_bits, x_bits) pair, with qubit 0 as the least significant bit. A
/// tiebreak seed shuffles equal-weight candidates instead.
inline SyndromeTable symmetric_decoder(const StabilizerCode& code,
                                       std::optional<std::uint64_t> tiebreak_seed = std::nullopt) {
    auto found = detail::fill_by_weight(code, {1, 2, 3}, tiebreak_seed);
    SyndromeTable table;
    table.num_generators = code.generators.size();
    for (auto& f : found) {
        if (!f) {
            throw std::logic_error(code.name + ": some syndromes are unreachable");
        }
        table.recovery.push_back(*f);
    }
    return table;
}

/// Minimum-weight decoder restricted to errors built from `error_subset`
/// (letters 'X', 'Y', 'Z'); syndromes with no such coset member fall back to
/// the symmetric choice.
inline SyndromeTable biased_decoder(const StabilizerCode& code, const std::string& error_subset) {
    std::vector<unsigned> letters;
    for (char c : std::string("XYZ")) {
        if (error_subset.find(c) != std::string::npos) {
            letters.push_back(c == 'X' ? 1u : c == 'Y' ? 2u : 3u);
        }
    }
    for (char c : error_subset) {
        if (c != 'X' && c != 'Y' && c != 'Z') {
            throw std::invalid_argument("biased decoder subset may only contain X, Y, Z");
        }
    }
    if (letters.empty()) {
        throw std::invalid_argument("biased decoder needs a nonempty error subset");
    }
    auto found = detail::fill_by_weight(code, letters, std::nullopt);
    auto table = symmetric_decoder(code);
    for (std::size_t s = 0; s < found.size(); ++s) {
        if (found[s]) {
            table.recovery[s] = *found[s];
        }
    }
    return table;
}

/// Enumerates every Pauli (unsigned) in the coset of syndrome s. Only for
/// small codes: cost 4^n.
inline std::vector<PauliOp> coset_members(const StabilizerCode& code, std::uint64_t s) {
    if (code.n > 12) {
        throw std::invalid_argument("coset enumeration is limited to 12 qubits");
    }
    std::vector<PauliOp> out;
    std::uint64_t full = std::uint64_t{1} << code.n;
    for (std::uint64_t z = 0; z < full; ++z) {
        for (std::uint64_t x = 0; x < full; ++x) {
            PauliOp p(code.n, z, x, static_cast<unsigned>(std::popcount(z & x)) * 3u);
            if (syndrome(p, code) == s) {
                out.push_back(p);
            }
        }
    }
    return out;
}

/// Single-qubit gate by name: I, X, Y, Z, H, S, C3.
inline Mat2 named_gate(const std::string& name) {
    const auto& s = pauli_matrices();
    const cplx i{0, 1};
    if (name == "I") return s[0];
    if (name == "X") return s[1];
    if (name == "Y") return s[2];
    if (name == "Z") return s[3];
    if (name == "H") return (s[1] + s[3]) / std::sqrt(2.0);
    if (name == "S") {
        Mat2 m;
        m << 1, 0, 0, i;
        return m;
    }
    if (name == "C3") {
        // exp[i pi (X+Y+Z) / (3 sqrt 3)]: rotation by pi/3 about (1,1,1)/sqrt(3).
        Mat2 axis = (s[1] + s[2] + s[3]) / std::sqrt(3.0);
        return std::cos(std::numbers::pi / 3) * s[0] + i * std::sin(std::numbers::pi / 3) * axis;
    }
    throw std::invalid_argument("unknown transversal gate '" + name + "'");
}

/// Logical single-qubit gates available as transversal corrections.
struct TransversalGroup {
    struct Element {
        std::string name;
        ProcessMatrix matrix;
        bool is_pauli = false;
    };
    std::vector<Element> elements;

    std::size_t size() const { return elements.size(); }

    /// Index of the element with this name, if present.
    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t k = 0; k < elements.size(); ++k) {
            if (elements[k].name == name) return k;
        }
        return std::nullopt;
    }

    /// Indices usable in the given mode, preserving enumeration order.
    std::vector<std::size_t> indices(bool pauli_only) const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < elements.size(); ++k) {
            if (!pauli_only || elements[k].is_pauli) out.push_back(k);
        }
        return out;
    }
};

inline constexpr std::size_t kMaxTransversalGroupSize = 48;

/// Closure of the code's transversal generators under multiplication.
/// Order: identity, then X, Y, Z when present, then the remaining elements
/// in breadth-first order.
inline TransversalGroup transversal_group(const StabilizerCode& code) {
    struct Node {
        std::string word;
        ProcessMatrix m;
    };
    std::vector<Node> gens;
    for (const auto& name : code.transversal_generators) {
        gens.push_back({name, unitary_process(named_gate(name))});
    }
    auto same = [](const ProcessMatrix& a, const ProcessMatrix& b) { return a.max_abs_diff(b) < 1e-10; };
    std::vector<Node> found{{"I", ProcessMatrix::identity()}};
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (const auto& g : gens) {
            ProcessMatrix cand = g.m * found[cur].m;
            bool known = std::any_of(found.begin(), found.end(), [&](const Node& f) { return same(f.m, cand); });
            if (known) continue;
            std::string word = found[cur].word == "I" ? g.word : g.word + "." + found[cur].word;
            found.push_back({word, cand});
            queue.push_back(found.size() - 1);
            if (found.size() > kMaxTransversalGroupSize) {
                throw std::invalid_argument(code.name + ": transversal group exceeds " +
                                            std::to_string(kMaxTransversalGroupSize) + " elements");
            }
        }
    }
    TransversalGroup group;
    group.elements.push_back({"I", ProcessMatrix::identity(), true});
    std::vector<bool> used(found.size(), false);
    used[0] = true;
    for (int p = 1; p < 4; ++p) {
        ProcessMatrix pm = pauli_conjugation(p);
        for (std::size_t k = 1; k < found.size(); ++k) {
            if (!used[k] && same(found[k].m, pm)) {
                used[k] = true;
                group.elements.push_back({std::string(1, "IXYZ"[p]), pm, true});
            }
        }
    }
    for (std::size_t k = 1; k < found.size(); ++k) {
        if (!used[k]) {
            group.elements.push_back({found[k].word, found[k].m, false});
        }
    }
    return group;
}

namespace detail {

inline StabilizerCode make_code(std::string name, const std::vector<std::string>& gens,
                                std::vector<std::string> transversal, bool concatenable) {
    StabilizerCode code;
    code.name = std::move(name);
    code.n = gens.front().size();
    for (const auto& g : gens) {
        code.generators.push_back(PauliOp::from_string(g));
    }
    code.logical_x = PauliOp::from_string(std::string(code.n, 'X'));
    code.logical_z = PauliOp::from_string(std::string(code.n, 'Z'));
    code.transversal_generators = std::move(transversal);
    code.concatenable = concatenable;
    validate_code(code);
    return code;
}

inline std::string swap_xz(std::string s) {
    for (char& c : s) {
        if (c == 'X') {
            c = 'Z';
        } else if (c == 'Z') {
            c = 'X';
        }
    }
    return s;
}

}  // namespace detail

inline const std::vector<std::string>& builtin_code_names() {
    static const std::vector<std::string> kNames = {"five-qubit", "steane",     "shor-z",
                                                    "shor-x",     "surface-17", "bitflip-3"};
    return kNames;
}

inline StabilizerCode builtin_code(const std::string& name) {
    if (name == "five-qubit") {
        return detail::make_code(name, {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"}, {"C3", "X", "Z"}, true);
    }
    if (name == "steane") {
        return detail::make_code(name, {"IIIZZZZ", "IZZIIZZ", "ZIZIZIZ", "IIIXXXX", "IXXIIXX", "XIXIXIX"},
                                 {"H", "S"}, true);
    }
    static const std::vector<std::string> kShorZ = {"ZZIIIIIII", "ZIZIIIIII", "IIIZZIIII", "IIIZIZIII",
                                                    "IIIIIIZZI", "IIIIIIZIZ", "XXXXXXIII", "IIIXXXXXX"};
    if (name == "shor-z") {
        return detail::make_code(name, kShorZ, {"X", "Z"}, true);
    }
    if (name == "shor-x") {
        std::vector<std::string> gens;
        for (const auto& g : kShorZ) gens.push_back(detail::swap_xz(g));
        return detail::make_code(name, gens, {"X", "Z"}, true);
    }
    if (name == "surface-17") {
        return detail::make_code(name,
                                 {"ZIIZIIIII", "IZZIZZIII", "IIIZZIZZI", "IIIIIZIIZ", "XXIXXIIII", "IXXIIIIII",
                                  "IIIIXXIXX", "IIIIIIXXI"},
                                 {"X", "Z"}, false);
    }
    if (name == "bitflip-3") {
        // Only used as a small worked example; it is not a distance-3 code.
        return detail::make_code(name, {"ZZI", "IZZ"}, {"X", "Z"}, true);
    }
    throw std::invalid_argument("unknown code '" + name + "'");
}

/// Parses the custom code text format:
///
///     # comment
///     name: my-code
///     XZZXI            (one generator per line)
///     X_L: XXXXX
///     Z_L: ZZZZZ
///     transversal: C3 X Z
///     concatenable: yes
inline StabilizerCode parse_code(std::istream& in) {
    StabilizerCode code;
    code.name = "custom";
    std::optional<PauliOp> lx;
    std::optional<PauliOp> lz;
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) {
            code.generators.push_back(PauliOp::from_string(line));
            continue;
        }
        std::string key = trim(line.substr(0, colon));
        std::string value = trim(line.substr(colon + 1));
        if (key == "name") {
            code.name = value;
        } else if (key == "X_L") {
            lx = PauliOp::from_string(value);
        } else if (key == "Z_L") {
            lz = PauliOp::from_string(value);
        } else if (key == "transversal") {
            std::istringstream words(value);
            std::string w;
            while (words >> w) {
                named_gate(w);
                code.transversal_generators.push_back(w);
            }
        } else if (key == "concatenable") {
            code.concatenable = value == "yes" || value == "true" || value == "1";
        } else {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (code.generators.empty()) {
        throw std::invalid_argument("code file has no generators");
    }
    code.n = code.generators.front().n();
    code.logical_x = lx.value_or(PauliOp::from_string(std::string(code.n, 'X')));
    code.logical_z = lz.value_or(PauliOp::from_string(std::string(code.n, 'Z')));
    if (code.transversal_generators.empty()) {
        code.transversal_generators = {"X", "Z"};
    }
    validate_code(code);
    return code;
}

}  // namespace qecopt
