// Copyright 2026 The Prepsim Authors
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

// Seeded sampling of the random objects the library and its sweeps need:
// Haar-distributed unitaries, Ginibre-based density operators, uniform-rank
// projectors and random state vectors. Every sampler is deterministic given
// its Rng, and Rng construction is deterministic given the seed.

#ifndef PREPSIM_RANDOM_HPP
#define PREPSIM_RANDOM_HPP

#include <cstdint>
#include <random>

#include "prepsim/tensor.hpp"

namespace prepsim {

// Fixed 64-bit mixer for seed derivation (splitmix64). Used to scramble raw
// seeds before they reach the engine and to derive role-specific sub-seeds
// from a trial seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic random source: a mersenne engine seeded through splitmix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    // Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(engine_);
    }

    Complex complex_normal() { return Complex(normal(), normal()); }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Matrix with independent standard complex Gaussian entries.
inline Matrix ginibre_matrix(int rows, int cols, Rng& rng) {
    Matrix g(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            g(r, c) = rng.complex_normal();
        }
    }
    return g;
}

// Haar-distributed unitary: QR of a Ginibre matrix with the R diagonal's
// phases folded back into Q.
inline Matrix haar_unitary(int dim, Rng& rng) {
    Matrix g = ginibre_matrix(dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < dim; ++k) {
        Complex d = r(k, k);
        double a = std::abs(d);
        Complex phase = (a > 0.0) ? d / a : Complex(1.0, 0.0);
        q.col(k) *= phase;
    }
    return q;
}

// Haar-distributed unit vector.
inline Vector random_state_vector(int dim, Rng& rng) {
    Vector v(dim);
    for (int k = 0; k < dim; ++k) v(k) = rng.complex_normal();
    double n = v.norm();
    if (n == 0.0) v(0) = Complex(1.0, 0.0); else v /= n;
    return v;
}

// Full-rank random density matrix: GG^dag / tr(GG^dag) with Ginibre G.
inline Matrix random_density_matrix(int dim, Rng& rng) {
    Matrix g = ginibre_matrix(dim, dim, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return hermitize(rho);
}

// Rank-r projector onto the span of the first r columns of a Haar unitary.
inline Matrix random_projector_matrix(int dim, int rank, Rng& rng) {
    if (rank < 0 || rank > dim) {
        throw ValidationError("random_projector_matrix: rank " + std::to_string(rank) +
                              " out of range for dim " + std::to_string(dim));
    }
    if (rank == 0) return Matrix::Zero(dim, dim);
    Matrix u = haar_unitary(dim, rng);
    Matrix v = u.leftCols(rank);
    return hermitize(v * v.adjoint());
}

inline Operator random_density(const DimensionSignature& sig, Rng& rng, const Tolerances& tol = {}) {
    return Operator(random_density_matrix(sig.total_dim(), rng), sig, OperatorKind::Density, tol);
}

inline Operator random_projector(const DimensionSignature& sig, int rank, Rng& rng,
                                 const Tolerances& tol = {}) {
    return Operator(random_projector_matrix(sig.total_dim(), rank, rng), sig, OperatorKind::Projector, tol);
}

inline Operator random_unitary(const DimensionSignature& sig, Rng& rng, const Tolerances& tol = {}) {
    return Operator(haar_unitary(sig.total_dim(), rng), sig, OperatorKind::Unitary, tol);
}

inline Operator random_pure_density(const DimensionSignature& sig, Rng& rng, const Tolerances& tol = {}) {
    return pure_density(random_state_vector(sig.total_dim(), rng), sig, tol);
}

}  // namespace prepsim

#endif  // PREPSIM_RANDOM_HPP
