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

// Event probabilities, the selective projective (Luders) state change, and
// conditional subsystem states for bipartite object-plus-apparatus systems.

#ifndef PREPSIM_COLLAPSE_HPP
#define PREPSIM_COLLAPSE_HPP

#include <optional>

#include "prepsim/tensor.hpp"

namespace prepsim {

// Thrown when a conditioning event has probability at or below
// certainty_eps, so no conditional state exists.
class ImpossibleEventError : public std::runtime_error {
  public:
    explicit ImpossibleEventError(const std::string& what) : std::runtime_error(what) {}
};

// A probability with its unclamped value kept for drift diagnostics.
struct EventProbability {
    double value;  // clamped to [0, 1]
    double raw;    // exactly tr(rho F)
};

// Probability of the projective event f in the state rho. When `subsystem`
// is given, f lives on that factor and is embedded first; otherwise f must
// share rho's full signature. Values outside [-validation_eps,
// 1 + validation_eps] indicate inconsistent operands and are rejected.
inline EventProbability event_probability(const Operator& rho, const Operator& f,
                                          std::optional<std::size_t> subsystem = {},
                                          const Tolerances& tol = {}) {
    const Matrix* fm = &f.mat();
    Matrix embedded;
    if (subsystem.has_value()) {
        embedded = embed(f, *subsystem, rho.signature(), tol).mat();
        fm = &embedded;
    } else if (f.signature() != rho.signature()) {
        throw ValidationError("event_probability: event and state signatures differ");
    }
    double raw = (rho.mat() * (*fm)).trace().real();
    if (raw < -tol.validation_eps || raw > 1.0 + tol.validation_eps) {
        throw ValidationError("event_probability: value " + std::to_string(raw) +
                              " lies outside [0, 1] beyond validation_eps");
    }
    double value = std::min(1.0, std::max(0.0, raw));
    return {value, raw};
}

// Conditional-state result: the probability of the condition and the state
// the conditioning leaves behind.
struct ConditionalStateResult {
    double probability;      // clamped
    double probability_raw;  // unclamped diagnostic
    Operator state;
};

// Selective projective state change rho -> F rho F / tr(rho F) on the full
// space. Events with probability at or below certainty_eps are rejected
// rather than divided by.
inline ConditionalStateResult luders_collapse(const Operator& rho, const Operator& f,
                                              const Tolerances& tol = {}) {
    EventProbability p = event_probability(rho, f, {}, tol);
    if (p.raw <= tol.certainty_eps) {
        throw ImpossibleEventError("luders_collapse: event probability " + std::to_string(p.raw) +
                                   " is at or below certainty_eps");
    }
    Matrix m = hermitize(f.mat() * rho.mat() * f.mat()) / p.raw;
    return {p.value, p.raw, Operator(std::move(m), rho.signature(), OperatorKind::Density, tol)};
}

// Conditional state of the first factor given that the second-factor event q
// occurred, in whatever way: tr_2(rho q_embedded) / tr(rho q_embedded). The
// partial trace is symmetrized before validation; the exact expression is
// Hermitian analytically, so this removes round-off only.
inline ConditionalStateResult conditional_state(const Operator& rho_composite, const Operator& q,
                                                const Tolerances& tol = {}) {
    if (rho_composite.signature().factor_count() != 2) {
        throw ValidationError("conditional_state: composite state must have exactly two factors");
    }
    Operator q_emb = embed(q, 1, rho_composite.signature(), tol);
    EventProbability p = event_probability(rho_composite, q_emb, {}, tol);
    if (p.raw <= tol.certainty_eps) {
        throw ImpossibleEventError("conditional_state: condition probability " + std::to_string(p.raw) +
                                   " is at or below certainty_eps");
    }
    Operator product(rho_composite.mat() * q_emb.mat(), rho_composite.signature(), OperatorKind::General, tol);
    Matrix reduced = hermitize(partial_trace(product, {0}, tol).mat()) / p.raw;
    DimensionSignature out_sig({rho_composite.signature().factor_dim(0)});
    return {p.value, p.raw, Operator(std::move(reduced), out_sig, OperatorKind::Density, tol)};
}

// Residual of the coincidence factorization: the coincidence probability of
// (p on factor one, q on factor two) against the product of q's probability
// and p's probability in the conditional state.
inline double verify_coincidence_factorization(const Operator& rho_composite, const Operator& p,
                                               const Operator& q, const Tolerances& tol = {}) {
    if (rho_composite.signature().factor_count() != 2) {
        throw ValidationError("verify_coincidence_factorization: composite state must have two factors");
    }
    Operator joint = tensor_product(p, q, tol);
    double lhs = (rho_composite.mat() * joint.mat()).trace().real();

    ConditionalStateResult cond = conditional_state(rho_composite, q, tol);
    double rhs = cond.probability_raw * (cond.state.mat() * p.mat()).trace().real();
    return std::abs(lhs - rhs);
}

}  // namespace prepsim

#endif  // PREPSIM_COLLAPSE_HPP
