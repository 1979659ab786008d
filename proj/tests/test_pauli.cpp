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

#include <random>

#include "qecopt/dense_oracle.hpp"
#include "qecopt/pauli.hpp"

namespace qecopt {
namespace {

PauliOp random_pauli(std::mt19937_64& rng, std::size_t n) {
    std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    return PauliOp(n, rng() & mask, rng() & mask, static_cast<unsigned>(rng() & 3u));
}

TEST(Pauli, ParsesLettersAndSigns) {
    PauliOp p = PauliOp::from_string("XZY_");
    EXPECT_EQ(p.n(), 4u);
    EXPECT_EQ(p.letters(), "XZYI");
    EXPECT_EQ(p.sign(), 1);
    EXPECT_TRUE(p.is_hermitian());
    EXPECT_EQ(PauliOp::from_string("-YY").sign(), -1);
    EXPECT_FALSE(PauliOp::from_string("+iXZ").is_hermitian());
    EXPECT_EQ(weight(p), 3u);
}

TEST(Pauli, RejectsBadInput) {
    EXPECT_THROW(PauliOp::from_string("XQ"), std::invalid_argument);
    EXPECT_THROW(PauliOp(3, 8, 0), DimensionError);
    EXPECT_THROW(pauli_mul(PauliOp(2), PauliOp(3)), DimensionError);
}

TEST(Pauli, SingleQubitTable) {
    auto p = [](const char* s) { return PauliOp::from_string(s); };
    EXPECT_EQ((p("X") * p("Y")).str(), "+iZ");
    EXPECT_EQ((p("Y") * p("X")).str(), "-iZ");
    EXPECT_EQ((p("Z") * p("X")).str(), "+iY");
    EXPECT_EQ((p("Y") * p("Y")).str(), "+I");
    EXPECT_EQ(commutes(p("X"), p("Z")), -1);
    EXPECT_EQ(commutes(p("XX"), p("ZZ")), 1);
}

// Products and commutation against explicit Kronecker matrices.
TEST(Pauli, ProductMatchesDenseMatrices) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + trial % 4;
        PauliOp a = random_pauli(rng, n);
        PauliOp b = random_pauli(rng, n);
        DenseMatrix prod = dense_matrix(a) * dense_matrix(b);
        EXPECT_LT((prod - dense_matrix(a * b)).cwiseAbs().maxCoeff(), 1e-12);
        DenseMatrix comm = dense_matrix(a) * dense_matrix(b) - commutes(a, b) * dense_matrix(b) * dense_matrix(a);
        EXPECT_LT(comm.cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Pauli, GroupProperties) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        PauliOp a = random_pauli(rng, 5), b = random_pauli(rng, 5), c = random_pauli(rng, 5);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * PauliOp::identity(5), a);
        PauliOp sq = a.unsigned_part() * a.unsigned_part();
        EXPECT_EQ(sq, PauliOp::identity(5));
        EXPECT_EQ(a * b, (b * a).times_phase(commutes(a, b) == 1 ? 0 : 2));
    }
}

TEST(Pauli, StringRoundTrip) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        PauliOp a = random_pauli(rng, 6);
        EXPECT_EQ(PauliOp::from_string(a.str()), a) << a.str();
    }
}

}  // namespace
}  // namespace qecopt
