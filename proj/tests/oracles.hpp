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

// Naive reference implementations used as independent oracles. Everything
// here is written as plain index loops on purpose: the library must agree
// with these, not the other way around.

#ifndef PREPSIM_TESTS_ORACLES_HPP
#define PREPSIM_TESTS_ORACLES_HPP

#include <cmath>

#include "prepsim/tensor.hpp"

namespace prepsim {
namespace oracles {

// Kronecker product by explicit quadruple loop.
inline Matrix naive_kron(const Matrix& a, const Matrix& b) {
    const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    Matrix out(ar * br, ac * bc);
    for (Eigen::Index i = 0; i < ar; ++i) {
        for (Eigen::Index j = 0; j < ac; ++j) {
            for (Eigen::Index k = 0; k < br; ++k) {
                for (Eigen::Index l = 0; l < bc; ++l) {
                    out(i * br + k, j * bc + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

// Partial trace over the second factor of a [d0, d1] composite, row-major
// with the first factor slowest.
inline Matrix naive_trace_out_second(const Matrix& m, int d0, int d1) {
    Matrix out = Matrix::Zero(d0, d0);
    for (int i = 0; i < d0; ++i) {
        for (int j = 0; j < d0; ++j) {
            for (int k = 0; k < d1; ++k) {
                out(i, j) += m(i * d1 + k, j * d1 + k);
            }
        }
    }
    return out;
}

// Partial trace over the first factor of a [d0, d1] composite.
inline Matrix naive_trace_out_first(const Matrix& m, int d0, int d1) {
    Matrix out = Matrix::Zero(d1, d1);
    for (int i = 0; i < d1; ++i) {
        for (int j = 0; j < d1; ++j) {
            for (int k = 0; k < d0; ++k) {
                out(i, j) += m(k * d1 + i, k * d1 + j);
            }
        }
    }
    return out;
}

// trace(A B) as an explicit double sum.
inline Complex naive_trace_product(const Matrix& a, const Matrix& b) {
    Complex sum(0.0, 0.0);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            sum += a(i, j) * b(j, i);
        }
    }
    return sum;
}

// Conditioning route for a pure [d0, d1] composite state: project the state
// vector with the second-factor event, renormalize, and reduce to the first
// factor by an explicit loop.
inline Matrix pure_conditional_route(const Vector& phi, const Matrix& q_second, int d0, int d1) {
    Vector projected = Vector::Zero(d0 * d1);
    for (int i = 0; i < d0; ++i) {
        for (int k = 0; k < d1; ++k) {
            Complex acc(0.0, 0.0);
            for (int l = 0; l < d1; ++l) {
                acc += q_second(k, l) * phi(i * d1 + l);
            }
            projected(i * d1 + k) = acc;
        }
    }
    double n2 = projected.squaredNorm();
    projected /= std::sqrt(n2);
    Matrix out = Matrix::Zero(d0, d0);
    for (int i = 0; i < d0; ++i) {
        for (int j = 0; j < d0; ++j) {
            for (int k = 0; k < d1; ++k) {
                out(i, j) += projected(i * d1 + k) * std::conj(projected(j * d1 + k));
            }
        }
    }
    return out;
}

// Trace norm of a Hermitian matrix as the absolute eigenvalue sum.
inline double hermitian_trace_norm(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace oracles
}  // namespace prepsim

#endif  // PREPSIM_TESTS_ORACLES_HPP
