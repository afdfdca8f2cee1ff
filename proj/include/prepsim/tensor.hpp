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

// Dense complex operators over finite tensor-product spaces: kind-tagged
// construction with validation, tensor products, subsystem embedding,
// partial traces and operator distances.
//
// Composite basis ordering is row-major: the first factor varies slowest,
// so for dims [d0, d1] the composite index is i0 * d1 + i1. This matches
// the ordering of the Kronecker product with the first factor on the left.

#ifndef PREPSIM_TENSOR_HPP
#define PREPSIM_TENSOR_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace prepsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Thrown when a kind-tagged operator (or any other validated value) fails
// its invariants. The message names the failed invariant.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical thresholds used throughout. validation_eps gates operator-kind
// checks, identity_eps gates equality-of-operators checks, certainty_eps
// gates probability-one and impossible-event cutoffs.
struct Tolerances {
    double validation_eps = 1e-9;
    double identity_eps = 1e-9;
    double certainty_eps = 1e-9;

    void validate() const {
        auto check = [](const char* name, double v) {
            if (!(v > 0.0 && v < 1.0)) {
                throw ValidationError(std::string("Tolerances: ") + name +
                                      " must lie strictly inside (0, 1), got " + std::to_string(v));
            }
        };
        check("validation_eps", validation_eps);
        check("identity_eps", identity_eps);
        check("certainty_eps", certainty_eps);
    }
};

// Ordered list of subsystem dimensions defining a tensor-product structure.
class DimensionSignature {
  public:
    DimensionSignature(std::initializer_list<int> dims) : DimensionSignature(std::vector<int>(dims)) {}

    explicit DimensionSignature(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) {
            throw ValidationError("DimensionSignature: at least one subsystem dimension is required");
        }
        for (int d : dims_) {
            if (d < 1) {
                throw ValidationError("DimensionSignature: every dimension must be >= 1, got " +
                                      std::to_string(d));
            }
        }
        long long total = 1;
        for (int d : dims_) {
            total *= d;
            if (total > (1LL << 20)) {
                throw ValidationError("DimensionSignature: total dimension exceeds the dense-storage cap");
            }
        }
        total_ = static_cast<int>(total);
    }

    int total_dim() const { return total_; }
    std::size_t factor_count() const { return dims_.size(); }

    int factor_dim(std::size_t k) const {
        if (k >= dims_.size()) {
            throw std::out_of_range("DimensionSignature: factor index " + std::to_string(k) +
                                    " out of range for " + std::to_string(dims_.size()) + " factors");
        }
        return dims_[k];
    }

    const std::vector<int>& dims() const { return dims_; }

    bool operator==(const DimensionSignature& other) const { return dims_ == other.dims_; }
    bool operator!=(const DimensionSignature& other) const { return !(*this == other); }

  private:
    std::vector<int> dims_;
    int total_ = 1;
};

enum class OperatorKind { General, Density, Projector, Unitary };

inline const char* to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::General: return "general";
        case OperatorKind::Density: return "density";
        case OperatorKind::Projector: return "projector";
        case OperatorKind::Unitary: return "unitary";
    }
    return "general";
}

inline OperatorKind operator_kind_from_string(const std::string& s) {
    if (s == "general") return OperatorKind::General;
    if (s == "density") return OperatorKind::Density;
    if (s == "projector") return OperatorKind::Projector;
    if (s == "unitary") return OperatorKind::Unitary;
    throw ValidationError("OperatorKind: unknown kind tag \"" + s + "\"");
}

// ----------------------------- matrix defects ------------------------------
// Each defect is a max-entry deviation from the property in question; the
// validators compare them against validation_eps.

inline double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double idempotency_defect(const Matrix& m) {
    return (m * m - m).cwiseAbs().maxCoeff();
}

inline double unitarity_defect(const Matrix& m) {
    return (m * m.adjoint() - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

inline double min_hermitian_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline Matrix hermitize(const Matrix& m) {
    return 0.5 * (m + m.adjoint());
}

// Sum of singular values (Schatten 1-norm).
inline double trace_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

// Dense complex square matrix tagged with its tensor-product signature and a
// kind. Construction validates the kind invariants; instances are immutable.
class Operator {
  public:
    Operator(Matrix matrix, DimensionSignature signature, OperatorKind kind, const Tolerances& tol = {})
        : mat_(std::move(matrix)), sig_(std::move(signature)), kind_(kind) {
        if (mat_.rows() != mat_.cols()) {
            throw ValidationError("Operator: matrix must be square, got " + std::to_string(mat_.rows()) +
                                  "x" + std::to_string(mat_.cols()));
        }
        if (mat_.rows() != sig_.total_dim()) {
            throw ValidationError("Operator: matrix side " + std::to_string(mat_.rows()) +
                                  " does not match the signature's total dimension " +
                                  std::to_string(sig_.total_dim()));
        }
        validate_kind(tol);
    }

    const Matrix& mat() const { return mat_; }
    const DimensionSignature& signature() const { return sig_; }
    OperatorKind kind() const { return kind_; }
    int dim() const { return sig_.total_dim(); }

    // Identity on the given signature. Valid as general, projector or
    // unitary; as density only when the total dimension is 1.
    static Operator identity(const DimensionSignature& sig, OperatorKind kind = OperatorKind::General,
                             const Tolerances& tol = {}) {
        return Operator(Matrix::Identity(sig.total_dim(), sig.total_dim()), sig, kind, tol);
    }

  private:
    void validate_kind(const Tolerances& tol) {
        const double eps = tol.validation_eps;
        switch (kind_) {
            case OperatorKind::General:
                break;
            case OperatorKind::Density: {
                double h = hermiticity_defect(mat_);
                if (h > eps) {
                    throw ValidationError("Operator[density]: hermiticity defect " + std::to_string(h) +
                                          " exceeds validation_eps");
                }
                double tr_err = std::abs(mat_.trace() - Complex(1.0, 0.0));
                if (tr_err > eps) {
                    throw ValidationError("Operator[density]: trace deviates from 1 by " +
                                          std::to_string(tr_err));
                }
                double lo = min_hermitian_eigenvalue(hermitize(mat_));
                if (lo < -eps) {
                    throw ValidationError("Operator[density]: minimum eigenvalue " + std::to_string(lo) +
                                          " is below the positive-semidefinite floor");
                }
                break;
            }
            case OperatorKind::Projector: {
                double h = hermiticity_defect(mat_);
                if (h > eps) {
                    throw ValidationError("Operator[projector]: hermiticity defect " + std::to_string(h) +
                                          " exceeds validation_eps");
                }
                double idem = idempotency_defect(mat_);
                if (idem > eps) {
                    throw ValidationError("Operator[projector]: idempotency defect " + std::to_string(idem) +
                                          " exceeds validation_eps");
                }
                break;
            }
            case OperatorKind::Unitary: {
                double u = unitarity_defect(mat_);
                if (u > eps) {
                    throw ValidationError("Operator[unitary]: unitarity defect " + std::to_string(u) +
                                          " exceeds validation_eps");
                }
                break;
            }
        }
    }

    Matrix mat_;
    DimensionSignature sig_;
    OperatorKind kind_;
};

// |k> in a dim-dimensional space.
inline Vector basis_state(int dim, int k) {
    if (k < 0 || k >= dim) {
        throw std::out_of_range("basis_state: index " + std::to_string(k) + " out of range for dim " +
                                std::to_string(dim));
    }
    Vector v = Vector::Zero(dim);
    v(k) = Complex(1.0, 0.0);
    return v;
}

// |v><v| / <v|v> as a kind-density operator.
inline Operator pure_density(const Vector& v, const DimensionSignature& sig, const Tolerances& tol = {}) {
    double n2 = v.squaredNorm();
    if (n2 <= 0.0) {
        throw ValidationError("pure_density: zero state vector");
    }
    Matrix m = (v * v.adjoint()) / n2;
    return Operator(std::move(m), sig, OperatorKind::Density, tol);
}

// ------------------------------- operations --------------------------------

// Kronecker product with the first operand's factors placed before the
// second's. The kind survives when both operands share a kind that is closed
// under tensoring (projector, unitary, density); otherwise the result is
// general.
inline Operator tensor_product(const Operator& a, const Operator& b, const Tolerances& tol = {}) {
    std::vector<int> dims = a.signature().dims();
    const auto& bd = b.signature().dims();
    dims.insert(dims.end(), bd.begin(), bd.end());

    Matrix m = Eigen::kroneckerProduct(a.mat(), b.mat());

    OperatorKind kind = OperatorKind::General;
    if (a.kind() == b.kind() &&
        (a.kind() == OperatorKind::Projector || a.kind() == OperatorKind::Unitary ||
         a.kind() == OperatorKind::Density)) {
        kind = a.kind();
    }
    return Operator(std::move(m), DimensionSignature(std::move(dims)), kind, tol);
}

// Places q on factor `factor` of `sig` with identities on every other
// factor. Projector and unitary kinds are preserved; anything else embeds as
// general (an embedded density is no longer trace one).
inline Operator embed(const Operator& q, std::size_t factor, const DimensionSignature& sig,
                      const Tolerances& tol = {}) {
    if (factor >= sig.factor_count()) {
        throw std::out_of_range("embed: factor index " + std::to_string(factor) +
                                " out of range for " + std::to_string(sig.factor_count()) + " factors");
    }
    if (q.dim() != sig.factor_dim(factor)) {
        throw ValidationError("embed: operator dimension " + std::to_string(q.dim()) +
                              " does not match factor dimension " +
                              std::to_string(sig.factor_dim(factor)));
    }
    Matrix m = Matrix::Identity(1, 1);
    for (std::size_t k = 0; k < sig.factor_count(); ++k) {
        if (k == factor) {
            m = Eigen::kroneckerProduct(m, q.mat()).eval();
        } else {
            int d = sig.factor_dim(k);
            m = Eigen::kroneckerProduct(m, Matrix::Identity(d, d)).eval();
        }
    }
    OperatorKind kind = OperatorKind::General;
    if (q.kind() == OperatorKind::Projector || q.kind() == OperatorKind::Unitary) {
        kind = q.kind();
    }
    return Operator(std::move(m), sig, kind, tol);
}

// Standard partial trace over the factors not listed in `keep`. The result's
// signature is the kept factors in their original order; the total trace is
// preserved. A density input reduces to a density.
inline Operator partial_trace(const Operator& m, std::vector<std::size_t> keep, const Tolerances& tol = {}) {
    const auto& dims = m.signature().dims();
    const std::size_t n = dims.size();

    if (keep.empty()) {
        throw ValidationError("partial_trace: the keep set must not be empty");
    }
    std::sort(keep.begin(), keep.end());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] >= n) {
            throw std::out_of_range("partial_trace: keep index " + std::to_string(keep[i]) +
                                    " out of range for " + std::to_string(n) + " factors");
        }
        if (i > 0 && keep[i] == keep[i - 1]) {
            throw ValidationError("partial_trace: duplicate keep index " + std::to_string(keep[i]));
        }
    }

    std::vector<bool> kept(n, false);
    for (std::size_t k : keep) kept[k] = true;

    // Row-major strides: the first factor varies slowest.
    std::vector<int> stride(n, 1);
    for (std::size_t k = n; k-- > 1;) {
        stride[k - 1] = stride[k] * dims[k];
    }

    std::vector<int> out_dims;
    out_dims.reserve(keep.size());
    for (std::size_t k : keep) out_dims.push_back(dims[k]);
    DimensionSignature out_sig(out_dims);

    std::vector<int> out_stride(keep.size(), 1);
    for (std::size_t i = keep.size(); i-- > 1;) {
        out_stride[i - 1] = out_stride[i] * out_dims[i];
    }

    const int dim = m.dim();
    Matrix out = Matrix::Zero(out_sig.total_dim(), out_sig.total_dim());
    std::vector<int> ri(n), ci(n);
    for (int r = 0; r < dim; ++r) {
        int rr = r;
        for (std::size_t k = 0; k < n; ++k) {
            ri[k] = rr / stride[k];
            rr %= stride[k];
        }
        for (int c = 0; c < dim; ++c) {
            int cc = c;
            bool diag = true;
            for (std::size_t k = 0; k < n; ++k) {
                ci[k] = cc / stride[k];
                cc %= stride[k];
                if (!kept[k] && ci[k] != ri[k]) {
                    diag = false;
                    break;
                }
            }
            if (!diag) continue;
            int ro = 0, co = 0;
            for (std::size_t i = 0; i < keep.size(); ++i) {
                ro += ri[keep[i]] * out_stride[i];
                co += ci[keep[i]] * out_stride[i];
            }
            out(ro, co) += m.mat()(r, c);
        }
    }

    OperatorKind kind = (m.kind() == OperatorKind::Density) ? OperatorKind::Density : OperatorKind::General;
    return Operator(std::move(out), std::move(out_sig), kind, tol);
}

// Both distances between equal-signature operators. Acceptance-style checks
// use the trace norm (the physically meaningful distance between states);
// fast-fail checks use the max-entry norm.
struct OperatorDistance {
    double max_entry;
    double trace_norm;
};

inline OperatorDistance operator_distance(const Operator& a, const Operator& b) {
    if (a.signature() != b.signature()) {
        throw ValidationError("operator_distance: signature mismatch");
    }
    Matrix diff = a.mat() - b.mat();
    return {diff.cwiseAbs().maxCoeff(), trace_norm(diff)};
}

// I - p as a projector.
inline Operator complement(const Operator& p, const Tolerances& tol = {}) {
    if (p.kind() != OperatorKind::Projector) {
        throw ValidationError("complement: operand must be a projector");
    }
    Matrix m = Matrix::Identity(p.dim(), p.dim()) - p.mat();
    return Operator(std::move(m), p.signature(), OperatorKind::Projector, tol);
}

}  // namespace prepsim

#endif  // PREPSIM_TENSOR_HPP
