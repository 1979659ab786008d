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

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qecopt {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

/// Single-qubit Pauli matrices in the order I, X, Y, Z.
inline const std::array<Mat2, 4>& pauli_matrices() {
    static const std::array<Mat2, 4> kPaulis = [] {
        std::array<Mat2, 4> p;
        const cplx i{0, 1};
        p[0] << 1, 0, 0, 1;
        p[1] << 0, 1, 1, 0;
        p[2] << 0, -i, i, 0;
        p[3] << 1, 0, 0, -1;
        return p;
    }();
    return kPaulis;
}

/// Real 4x4 matrix of a single-qubit channel in the normalized Pauli basis
/// (I, X, Y, Z)/sqrt(2). Entry (s, t) is Tr[s N(t)].
class ProcessMatrix {
   public:
    ProcessMatrix() : m_(Eigen::Matrix4d::Zero()) {}
    explicit ProcessMatrix(const Eigen::Matrix4d& m) : m_(m) {}

    static ProcessMatrix identity() { return ProcessMatrix(Eigen::Matrix4d::Identity()); }
    static ProcessMatrix zero() { return ProcessMatrix(); }
    static ProcessMatrix diagonal(double i, double x, double y, double z) {
        Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
        m.diagonal() << i, x, y, z;
        return ProcessMatrix(m);
    }

    double operator()(int row, int col) const { return m_(row, col); }
    double& operator()(int row, int col) { return m_(row, col); }

    const Eigen::Matrix4d& mat() const { return m_; }
    Eigen::Matrix4d& mat() { return m_; }

    double trace() const { return m_.trace(); }

    /// Largest absolute entry of the difference.
    double max_abs_diff(const ProcessMatrix& other) const { return (m_ - other.m_).cwiseAbs().maxCoeff(); }

    /// First row equals (1,0,0,0) within tol.
    bool is_trace_preserving(double tol = 1e-12) const {
        return std::abs(m_(0, 0) - 1) <= tol && std::abs(m_(0, 1)) <= tol && std::abs(m_(0, 2)) <= tol &&
               std::abs(m_(0, 3)) <= tol;
    }

    ProcessMatrix operator*(const ProcessMatrix& rhs) const { return ProcessMatrix(m_ * rhs.m_); }
    ProcessMatrix operator+(const ProcessMatrix& rhs) const { return ProcessMatrix(m_ + rhs.m_); }
    ProcessMatrix operator-(const ProcessMatrix& rhs) const { return ProcessMatrix(m_ - rhs.m_); }
    ProcessMatrix operator*(double s) const { return ProcessMatrix(m_ * s); }
    ProcessMatrix& operator+=(const ProcessMatrix& rhs) {
        m_ += rhs.m_;
        return *this;
    }
    friend ProcessMatrix operator*(double s, const ProcessMatrix& m) { return m * s; }

   private:
    Eigen::Matrix4d m_;
};

/// A channel given by Kraus operators. Construction checks trace preservation.
class KrausChannel {
   public:
    explicit KrausChannel(std::vector<Mat2> ops, double tol = 1e-12) : ops_(std::move(ops)) {
        if (ops_.empty()) {
            throw std::invalid_argument("Kraus channel needs at least one operator");
        }
        Mat2 sum = Mat2::Zero();
        for (const auto& a : ops_) {
            sum += a.adjoint() * a;
        }
        if ((sum - Mat2::Identity()).cwiseAbs().maxCoeff() > tol) {
            throw std::invalid_argument("Kraus operators are not trace preserving");
        }
    }

    const std::vector<Mat2>& ops() const { return ops_; }

    /// Apply to a 2x2 operator.
    Mat2 apply(const Mat2& rho) const {
        Mat2 out = Mat2::Zero();
        for (const auto& a : ops_) {
            out += a * rho * a.adjoint();
        }
        return out;
    }

    /// Kraus set of this after `first` (this o first).
    KrausChannel after(const KrausChannel& first) const {
        std::vector<Mat2> out;
        for (const auto& b : ops_) {
            for (const auto& a : first.ops_) {
                out.push_back(b * a);
            }
        }
        return KrausChannel(std::move(out), 1e-10);
    }

    /// Convex mixture (1-w) * this + w * other.
    KrausChannel mixed_with(const KrausChannel& other, double w) const {
        std::vector<Mat2> out;
        for (const auto& a : ops_) {
            out.push_back(std::sqrt(1 - w) * a);
        }
        for (const auto& a : other.ops_) {
            out.push_back(std::sqrt(w) * a);
        }
        return KrausChannel(std::move(out), 1e-10);
    }

   private:
    std::vector<Mat2> ops_;
};

inline void require_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
    }
}

inline ProcessMatrix kraus_to_process(const KrausChannel& k) {
    const auto& paulis = pauli_matrices();
    Eigen::Matrix4d out;
    for (int t = 0; t < 4; ++t) {
        Mat2 image = k.apply(paulis[t]);
        for (int s = 0; s < 4; ++s) {
            cplx v = 0.5 * (paulis[s] * image).trace();
            if (std::abs(v.imag()) > 1e-12) {
                throw std::logic_error("process matrix entry has imaginary part " + std::to_string(v.imag()));
            }
            out(s, t) = v.real();
        }
    }
    return ProcessMatrix(out);
}

inline ProcessMatrix unitary_process(const Mat2& u) { return kraus_to_process(KrausChannel({u}, 1e-10)); }

inline KrausChannel amplitude_damping_kraus(double p) {
    require_unit_interval(p, "amplitude damping p");
    Mat2 a0;
    Mat2 a1;
    a0 << 1, 0, 0, std::sqrt(1 - p);
    a1 << 0, std::sqrt(p), 0, 0;
    return KrausChannel({a0, a1});
}

inline KrausChannel phase_damping_kraus(double lambda) {
    require_unit_interval(lambda, "phase damping lambda");
    Mat2 a0;
    Mat2 a1;
    a0 << 1, 0, 0, std::sqrt(1 - lambda);
    a1 << 0, 0, 0, std::sqrt(lambda);
    return KrausChannel({a0, a1});
}

/// Phase damping followed by amplitude damping; the two orders agree.
inline KrausChannel amplitude_phase_damping_kraus(double p, double lambda) {
    return phase_damping_kraus(lambda).after(amplitude_damping_kraus(p));
}

inline ProcessMatrix amplitude_phase_damping(double p, double lambda) {
    require_unit_interval(p, "amplitude damping p");
    require_unit_interval(lambda, "phase damping lambda");
    // Closed form of the composed Kraus set.
    double ad = std::sqrt(1 - p);
    double pd = std::sqrt(1 - lambda);
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = 1;
    m(1, 1) = ad * pd;
    m(2, 2) = ad * pd;
    m(3, 3) = 1 - p;
    m(3, 0) = p;
    return ProcessMatrix(m);
}

/// exp(i theta n.sigma) with n = (sin phi cos gamma, sin phi sin gamma, cos phi).
inline Mat2 rotation_unitary(double theta, double phi, double gamma) {
    const auto& s = pauli_matrices();
    Mat2 axis = std::sin(phi) * std::cos(gamma) * s[1] + std::sin(phi) * std::sin(gamma) * s[2] +
                std::cos(phi) * s[3];
    return std::cos(theta) * s[0] + cplx(0, std::sin(theta)) * axis;
}

inline ProcessMatrix coherent_rotation(double theta, double phi, double gamma) {
    return unitary_process(rotation_unitary(theta, phi, gamma));
}

inline KrausChannel depolarizing_kraus(double p) {
    if (!(p >= 0 && p <= 0.75)) {
        throw std::invalid_argument("depolarizing p must lie in [0, 3/4], got " + std::to_string(p));
    }
    const auto& s = pauli_matrices();
    double w = std::sqrt(p / 3);
    return KrausChannel({std::sqrt(1 - p) * s[0], w * s[1], w * s[2], w * s[3]});
}

inline ProcessMatrix depolarizing(double p) {
    if (!(p >= 0 && p <= 0.75)) {
        throw std::invalid_argument("depolarizing p must lie in [0, 3/4], got " + std::to_string(p));
    }
    double c = 1 - 4 * p / 3;
    return ProcessMatrix::diagonal(1, c, c, c);
}

/// Conjugation by a single Pauli (0..3).
inline ProcessMatrix pauli_conjugation(int which) {
    double sx = (which == 0 || which == 1) ? 1 : -1;
    double sy = (which == 0 || which == 2) ? 1 : -1;
    double sz = (which == 0 || which == 3) ? 1 : -1;
    return ProcessMatrix::diagonal(1, sx, sy, sz);
}

/// Average over conjugation by I, X, Y, Z: keeps the diagonal only.
inline ProcessMatrix pauli_twirl(const ProcessMatrix& m) {
    return ProcessMatrix(Eigen::Matrix4d(m.mat().diagonal().asDiagonal()));
}

/// Average gate infidelity to the identity, (4 - Tr)/6.
inline double infidelity(const ProcessMatrix& m) { return (4.0 - m.trace()) / 6.0; }

/// Sets the first row to exactly (1, 0, 0, 0) when it differs from it by
/// rounding only. Iterated coding maps multiply an error in G_00 by about n
/// per level, so without this a trace-preserving channel drifts after ~20
/// levels.
inline ProcessMatrix settle_trace_row(ProcessMatrix m, double tol = 1e-9) {
    double dev = std::abs(m(0, 0) - 1.0);
    for (int j = 1; j < 4; ++j) dev = std::max(dev, std::abs(m(0, j)));
    if (dev < tol) {
        m(0, 0) = 1.0;
        for (int j = 1; j < 4; ++j) m(0, j) = 0.0;
    }
    return m;
}

/// (1 - weight) * base + weight * (rho -> u rho u^dagger).
inline ProcessMatrix perturb(const ProcessMatrix& base, const Mat2& u, double weight) {
    require_unit_interval(weight, "perturbation weight");
    return (1 - weight) * base + weight * unitary_process(u);
}

/// SplitMix64 finalizer; used to key independent random streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Haar-random 2x2 unitary from Gram-Schmidt on a complex Gaussian matrix.
inline Mat2 haar_random_unitary(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat2 g;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            double re = gauss(rng);
            double im = gauss(rng);
            g(r, c) = cplx(re, im);
        }
    }
    Eigen::Vector2cd c0 = g.col(0).normalized();
    Eigen::Vector2cd c1 = g.col(1) - c0.dot(g.col(1)) * c0;
    c1.normalize();
    Mat2 u;
    u.col(0) = c0;
    u.col(1) = c1;
    return u;
}

/// Random CPTP channel with `rank` Kraus operators, from a Haar-like isometry.
inline KrausChannel random_kraus_channel(std::uint64_t seed, int rank = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(2 * rank, 2);
    for (int r = 0; r < 2 * rank; ++r) {
        for (int c = 0; c < 2; ++c) {
            double re = gauss(rng);
            double im = gauss(rng);
            g(r, c) = cplx(re, im);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(2 * rank, 2);
    std::vector<Mat2> ops;
    for (int k = 0; k < rank; ++k) {
        ops.push_back(q.block(2 * k, 0, 2, 2));
    }
    return KrausChannel(std::move(ops), 1e-10);
}

}  // namespace qecopt
