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

#include <sstream>

#include "qecopt/code.hpp"

namespace qecopt {
namespace {

class BuiltinCode : public ::testing::TestWithParam<std::string> {};

TEST_P(BuiltinCode, StabilizerAndLogicalAlgebra) {
    StabilizerCode code = builtin_code(GetParam());
    EXPECT_NO_THROW(validate_code(code));
    auto group = stabilizer_group(code);
    EXPECT_EQ(group.size(), code.num_syndromes());
    for (const auto& s : group) {
        EXPECT_EQ(syndrome(s.element, code), 0u);
        EXPECT_TRUE(s.element.is_hermitian());
    }
    for (int t = 0; t < 4; ++t) {
        PauliOp l = code.logical(t);
        EXPECT_TRUE(l.is_hermitian()) << t;
        EXPECT_EQ(syndrome(l, code), 0u);
    }
    EXPECT_EQ(commutes(code.logical(1), code.logical(3)), -1);
    EXPECT_EQ(commutes(code.logical(1), code.logical(2)), -1);
    // Y is +-i X Z.
    PauliOp xz = code.logical(1) * code.logical(3);
    EXPECT_TRUE(code.logical(2) == xz.times_phase(1) || code.logical(2) == xz.times_phase(3));
}

TEST_P(BuiltinCode, SymmetricDecoderIsMinimumWeight) {
    StabilizerCode code = builtin_code(GetParam());
    SyndromeTable table = symmetric_decoder(code);
    ASSERT_EQ(table.size(), code.num_syndromes());
    EXPECT_EQ(weight(table[0]), 0u);
    // Brute force minimum weight per syndrome for small codes.
    if (code.n > 9) return;
    std::vector<std::size_t> best(code.num_syndromes(), code.n + 1);
    std::uint64_t full = std::uint64_t{1} << code.n;
    for (std::uint64_t z = 0; z < full; ++z) {
        for (std::uint64_t x = 0; x < full; ++x) {
            PauliOp p(code.n, z, x);
            auto s = syndrome(p, code);
            best[s] = std::min(best[s], weight(p));
        }
    }
    for (std::uint64_t s = 0; s < table.size(); ++s) {
        EXPECT_EQ(syndrome(table[s], code), s);
        EXPECT_EQ(weight(table[s]), best[s]) << syndrome_string(s, code.num_generators());
    }
}

TEST_P(BuiltinCode, TiebreakSeedKeepsWeights) {
    StabilizerCode code = builtin_code(GetParam());
    SyndromeTable a = symmetric_decoder(code);
    SyndromeTable b = symmetric_decoder(code, 42);
    for (std::uint64_t s = 0; s < a.size(); ++s) {
        EXPECT_EQ(weight(a[s]), weight(b[s]));
        EXPECT_EQ(syndrome(b[s], code), s);
    }
    SyndromeTable c = symmetric_decoder(code, 42);
    EXPECT_EQ(b.recovery, c.recovery);
}

INSTANTIATE_TEST_SUITE_P(All, BuiltinCode, ::testing::ValuesIn(builtin_code_names()));

TEST(Code, DistanceThreeCodesCorrectSingleErrors) {
    for (const char* name : {"five-qubit", "steane", "shor-z", "surface-17"}) {
        StabilizerCode code = builtin_code(name);
        SyndromeTable table = symmetric_decoder(code);
        for (std::size_t q = 0; q < code.n; ++q) {
            for (unsigned letter = 1; letter < 4; ++letter) {
                std::uint64_t bit = std::uint64_t{1} << q;
                PauliOp e(code.n, letter >= 2 ? bit : 0, letter <= 2 ? bit : 0);
                PauliOp residual = table[syndrome(e, code)] * e;
                // Residual must be a stabilizer: trivial syndrome and commutes with both logicals.
                EXPECT_EQ(syndrome(residual, code), 0u);
                EXPECT_EQ(commutes(residual, code.logical_x), 1) << name << " q" << q;
                EXPECT_EQ(commutes(residual, code.logical_z), 1) << name << " q" << q;
            }
        }
    }
}

TEST(Code, TransversalGroups) {
    EXPECT_EQ(transversal_group(builtin_code("five-qubit")).size(), 12u);
    EXPECT_EQ(transversal_group(builtin_code("steane")).size(), 24u);
    EXPECT_EQ(transversal_group(builtin_code("shor-z")).size(), 4u);
    auto g = transversal_group(builtin_code("steane"));
    EXPECT_EQ(g.elements[0].name, "I");
    EXPECT_EQ(g.indices(true).size(), 4u);
    EXPECT_TRUE(g.find("X").has_value());
    for (const auto& e : g.elements) EXPECT_NEAR(e.matrix.trace() - e.matrix(0, 0), e.matrix.trace() - 1, 1e-12);
}

TEST(Code, SteaneLogicalYIsLetterwise) {
    StabilizerCode code = builtin_code("steane");
    EXPECT_EQ(code.logical(2), PauliOp::from_string("YYYYYYY"));
    EXPECT_EQ(code.logical(2), (code.logical(1) * code.logical(3)).times_phase(3));
}

TEST(Code, CosetsPartitionThePauliGroup) {
    StabilizerCode code = builtin_code("bitflip-3");
    std::size_t total = 0;
    for (std::uint64_t s = 0; s < code.num_syndromes(); ++s) {
        auto members = coset_members(code, s);
        EXPECT_EQ(members.size(), 64u / code.num_syndromes());
        total += members.size();
    }
    EXPECT_EQ(total, 64u);
}

TEST(Code, BiasedDecoderPrefersSubset) {
    StabilizerCode code = builtin_code("steane");
    SyndromeTable z_only = biased_decoder(code, "Z");
    for (std::uint64_t s = 0; s < z_only.size(); ++s) {
        EXPECT_EQ(syndrome(z_only[s], code), s);
        if ((s & 7u) == 0) EXPECT_EQ(z_only[s].x_bits(), 0u);  // only X-type checks fire
    }
    EXPECT_THROW(biased_decoder(code, "Q"), std::invalid_argument);
    EXPECT_THROW(biased_decoder(code, ""), std::invalid_argument);
}

TEST(Code, ParsesCustomCodes) {
    std::istringstream in(
        "# five qubit code\n"
        "name: mine\n"
        "XZZXI\nIXZZX\nXIXZZ\nZXIXZ\n"
        "X_L: XXXXX\nZ_L: ZZZZZ\n"
        "transversal: C3 X Z\n"
        "concatenable: yes\n");
    StabilizerCode code = parse_code(in);
    EXPECT_EQ(code.name, "mine");
    EXPECT_EQ(code.n, 5u);
    EXPECT_EQ(transversal_group(code).size(), 12u);

    std::istringstream bad("ZZI\nZZI\nX_L: XXX\nZ_L: ZZZ\n");
    EXPECT_THROW(parse_code(bad), std::invalid_argument);
    std::istringstream anti("ZZI\nIXX\nX_L: XXX\nZ_L: ZZZ\n");
    EXPECT_THROW(parse_code(anti), std::invalid_argument);
    EXPECT_THROW(builtin_code("nope"), std::invalid_argument);
}

}  // namespace
}  // namespace qecopt
