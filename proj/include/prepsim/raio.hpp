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

// Retroactive apparent ideal occurrence: condition checks and the equality
// between collapsing on the final localization event and fictitiously
// collapsing on the trigger first, plus the localization-lemma residual and
// the two equivalent routes for evolving a prepared subsystem state.

#ifndef PREPSIM_RAIO_HPP
#define PREPSIM_RAIO_HPP

#include <cmath>
#include <limits>
#include <utility>

#include "prepsim/collapse.hpp"
#include "prepsim/random.hpp"
#include "prepsim/tensor.hpp"

namespace prepsim {

// One verification problem: initial state, triggering event, final-moment
// event, and the full unitary evolution between the two moments. All four
// operators share one signature.
struct RaioInstance {
    Operator rho_initial;
    Operator q;
    Operator p;
    Operator u;

    RaioInstance(Operator rho_initial_, Operator q_, Operator p_, Operator u_)
        : rho_initial(std::move(rho_initial_)), q(std::move(q_)), p(std::move(p_)), u(std::move(u_)) {
        if (rho_initial.kind() != OperatorKind::Density) {
            throw ValidationError("RaioInstance: rho_initial must be kind density");
        }
        if (q.kind() != OperatorKind::Projector || p.kind() != OperatorKind::Projector) {
            throw ValidationError("RaioInstance: q and p must be kind projector");
        }
        if (u.kind() != OperatorKind::Unitary) {
            throw ValidationError("RaioInstance: u must be kind unitary");
        }
        if (q.signature() != rho_initial.signature() || p.signature() != rho_initial.signature() ||
            u.signature() != rho_initial.signature()) {
            throw ValidationError("RaioInstance: all four operators must share one signature");
        }
    }
};

enum class RaioVerdict { Verified, ConditionsViolated, EqualityViolated, ConditionsOk };

inline const char* to_string(RaioVerdict v) {
    switch (v) {
        case RaioVerdict::Verified: return "verified";
        case RaioVerdict::ConditionsViolated: return "conditions-violated";
        case RaioVerdict::EqualityViolated: return "equality-violated";
        case RaioVerdict::ConditionsOk: return "conditions-ok";
    }
    return "conditions-violated";
}

// Outcome of the condition checks and (optionally) the equality check.
// Margins are signed: nonnegative means the condition holds with that much
// room, negative by how much it fails, NaN when the quantity cannot be
// evaluated (the conditioning event is impossible). equality_residual is NaN
// until the equality has been evaluated.
struct RaioReport {
    double p_q = 0.0;
    bool cond_i_ok = false;
    bool cond_ii_ok = false;
    bool cond_iii_ok = false;
    double margin_i = std::numeric_limits<double>::quiet_NaN();
    double margin_ii = std::numeric_limits<double>::quiet_NaN();
    double margin_iii = std::numeric_limits<double>::quiet_NaN();
    double equality_residual = std::numeric_limits<double>::quiet_NaN();
    RaioVerdict verdict = RaioVerdict::ConditionsViolated;

    bool conditions_ok() const { return cond_i_ok && cond_ii_ok && cond_iii_ok; }
};

// Residual of the localization factorization tr(F rho) =
// tr(P_R rho) * tr(F rho') with rho' = P_R rho P_R / tr(P_R rho). Requires
// F below P_R (F P_R = F) and a localization probability above
// certainty_eps.
inline double check_localization_lemma(const Operator& f, const Operator& p_region, const Operator& rho,
                                       const Tolerances& tol = {}) {
    if (f.kind() != OperatorKind::Projector || p_region.kind() != OperatorKind::Projector) {
        throw ValidationError("check_localization_lemma: f and p_region must be kind projector");
    }
    if (rho.kind() != OperatorKind::Density) {
        throw ValidationError("check_localization_lemma: rho must be kind density");
    }
    if (f.signature() != rho.signature() || p_region.signature() != rho.signature()) {
        throw ValidationError("check_localization_lemma: operands must share one signature");
    }
    double sub = (f.mat() * p_region.mat() - f.mat()).cwiseAbs().maxCoeff();
    if (sub > tol.identity_eps) {
        throw ValidationError("check_localization_lemma: f is not below p_region (defect " +
                              std::to_string(sub) + ")");
    }
    double p_loc = (rho.mat() * p_region.mat()).trace().real();
    if (p_loc <= tol.certainty_eps) {
        throw ImpossibleEventError("check_localization_lemma: localization probability " +
                                   std::to_string(p_loc) + " is at or below certainty_eps");
    }
    Matrix rho_prime = hermitize(p_region.mat() * rho.mat() * p_region.mat()) / p_loc;
    double lhs = (f.mat() * rho.mat()).trace().real();
    double rhs = p_loc * (f.mat() * rho_prime).trace().real();
    return std::abs(lhs - rhs);
}

// Checks the three applicability conditions: (i) the trigger and its
// opposite both have probability above certainty_eps; (ii) ideal occurrence
// of the trigger followed by the evolution makes the final event certain;
// (iii) the same with both events complemented. Failures are encoded in the
// verdict, never thrown.
inline RaioReport check_raio_conditions(const RaioInstance& inst, const Tolerances& tol = {}) {
    RaioReport rep;
    const Matrix& rho = inst.rho_initial.mat();
    const Matrix& u = inst.u.mat();

    EventProbability pq = event_probability(inst.rho_initial, inst.q, {}, tol);
    rep.p_q = pq.value;
    rep.margin_i = std::min(pq.raw, 1.0 - pq.raw) - tol.certainty_eps;
    rep.cond_i_ok = rep.margin_i > 0.0;

    auto certainty_margin = [&](const Matrix& trigger, const Matrix& target) {
        double p_trig = (rho * trigger).trace().real();
        if (p_trig <= tol.certainty_eps) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        Matrix collapsed = hermitize(trigger * rho * trigger) / p_trig;
        double p_after = (u * collapsed * u.adjoint() * target).trace().real();
        return p_after - (1.0 - tol.certainty_eps);
    };

    rep.margin_ii = certainty_margin(inst.q.mat(), inst.p.mat());
    rep.cond_ii_ok = rep.margin_ii >= 0.0;

    Matrix q_perp = Matrix::Identity(inst.q.dim(), inst.q.dim()) - inst.q.mat();
    Matrix p_perp = Matrix::Identity(inst.p.dim(), inst.p.dim()) - inst.p.mat();
    rep.margin_iii = certainty_margin(q_perp, p_perp);
    rep.cond_iii_ok = rep.margin_iii >= 0.0;

    rep.verdict = rep.conditions_ok() ? RaioVerdict::ConditionsOk : RaioVerdict::ConditionsViolated;
    return rep;
}

// Evaluates the retroactive-occurrence equality: collapsing the evolved
// state on the final event must equal evolving the state collapsed on the
// trigger. The residual is a trace-norm distance and is reported even when
// the conditions fail (NaN when either collapse is impossible); the verdict
// is verified only when the conditions hold and the residual is within
// identity_eps.
inline RaioReport check_raio_equality(const RaioInstance& inst, const Tolerances& tol = {}) {
    RaioReport rep = check_raio_conditions(inst, tol);
    const Matrix& rho = inst.rho_initial.mat();
    const Matrix& u = inst.u.mat();

    Matrix rho_final = hermitize(u * rho * u.adjoint());
    double p_final = (rho_final * inst.p.mat()).trace().real();
    if (p_final <= tol.certainty_eps) {
        if (rep.conditions_ok()) {
            throw ImpossibleEventError("check_raio_equality: final event probability " +
                                       std::to_string(p_final) +
                                       " is at or below certainty_eps despite verified conditions");
        }
        rep.verdict = RaioVerdict::ConditionsViolated;
        return rep;
    }
    double p_trigger = (rho * inst.q.mat()).trace().real();
    if (p_trigger <= tol.certainty_eps) {
        rep.verdict = RaioVerdict::ConditionsViolated;
        return rep;
    }

    Matrix lhs = hermitize(inst.p.mat() * rho_final * inst.p.mat()) / p_final;
    Matrix fictitious = hermitize(inst.q.mat() * rho * inst.q.mat()) / p_trigger;
    Matrix rhs = hermitize(u * fictitious * u.adjoint());
    rep.equality_residual = trace_norm(lhs - rhs);

    if (!rep.conditions_ok()) {
        rep.verdict = RaioVerdict::ConditionsViolated;
    } else {
        rep.verdict = (rep.equality_residual <= tol.identity_eps) ? RaioVerdict::Verified
                                                                  : RaioVerdict::EqualityViolated;
    }
    return rep;
}

// Seeded bipartite instance realizing the twin-observable structure: a
// qubit entangled with a d_second-level system through
// alpha |0>|phi+> + beta |1>|phi->, the trigger projecting onto a
// region_size-dimensional span containing phi+ and orthogonal to phi-, an
// evolution whose second factor carries that span exactly onto the first
// region_size coordinate directions (region R), and the final event
// localizing the second factor in R. Satisfies all three conditions by
// construction.
inline RaioInstance build_twin_instance(Complex alpha, Complex beta, int d_second, int region_size,
                                        std::uint64_t seed, const Tolerances& tol = {}) {
    double weight = std::norm(alpha) + std::norm(beta);
    if (std::abs(weight - 1.0) > tol.validation_eps) {
        throw ValidationError("build_twin_instance: |alpha|^2 + |beta|^2 deviates from 1 by " +
                              std::to_string(std::abs(weight - 1.0)));
    }
    if (d_second < 2 || region_size < 1 || region_size >= d_second) {
        throw ValidationError("build_twin_instance: region_size must lie strictly between 0 and d_second");
    }
    double p_plus = std::norm(alpha);
    if (p_plus <= tol.certainty_eps || p_plus >= 1.0 - tol.certainty_eps) {
        throw ValidationError("build_twin_instance: |alpha|^2 = " + std::to_string(p_plus) +
                              " leaves the trigger certain or impossible");
    }

    Rng rng(seed);
    const int r = region_size;

    // Orthonormal frame: column 0 is phi+, column 1 is phi-, the rest pad
    // the trigger range and its complement.
    Matrix frame = haar_unitary(d_second, rng);
    Matrix w_plus(d_second, r);
    w_plus.col(0) = frame.col(0);
    for (int j = 1; j < r; ++j) w_plus.col(j) = frame.col(j + 1);
    Matrix w_minus(d_second, d_second - r);
    w_minus.col(0) = frame.col(1);
    for (int j = 1; j < d_second - r; ++j) w_minus.col(j) = frame.col(r + j);

    DimensionSignature sig_second({d_second});
    Operator q_second(hermitize(w_plus * w_plus.adjoint()), sig_second, OperatorKind::Projector, tol);

    // Second-factor evolution: the trigger range goes onto the first r
    // coordinate directions, its complement onto the rest.
    Matrix u_second = Matrix::Zero(d_second, d_second);
    u_second.topLeftCorner(r, r) = haar_unitary(r, rng);
    u_second.bottomRightCorner(d_second - r, d_second - r) = haar_unitary(d_second - r, rng);
    Matrix w_full(d_second, d_second);
    w_full.leftCols(r) = w_plus;
    w_full.rightCols(d_second - r) = w_minus;
    u_second = u_second * w_full.adjoint();
    Matrix u_first = haar_unitary(2, rng);

    Matrix region = Matrix::Zero(d_second, d_second);
    for (int j = 0; j < r; ++j) region(j, j) = 1.0;
    Operator p_region(std::move(region), sig_second, OperatorKind::Projector, tol);

    DimensionSignature sig({2, d_second});
    Vector phi = Vector::Zero(2 * d_second);
    phi.segment(0, d_second) = alpha * frame.col(0);
    phi.segment(d_second, d_second) = beta * frame.col(1);

    Operator rho = pure_density(phi, sig, tol);
    Operator q = embed(q_second, 1, sig, tol);
    Operator p = embed(p_region, 1, sig, tol);
    Operator u = tensor_product(Operator(std::move(u_first), DimensionSignature({2}), OperatorKind::Unitary, tol),
                                Operator(std::move(u_second), sig_second, OperatorKind::Unitary, tol), tol);
    return RaioInstance(std::move(rho), std::move(q), std::move(p), std::move(u));
}

// The two routes of evolve_prepared_two_routes, plus their trace-norm
// distance.
struct TwoRouteResult {
    Operator route_a;
    Operator route_b;
    double residual;
};

// Evolves a prepared first-factor state along the two equivalent routes:
// (a) collapse the composite on the embedded trigger, evolve with
// u_object (x) u_preparator, then reduce to the first factor; (b) reduce
// first (the conditional prepared state) and evolve with u_object alone.
// Factorized evolution commutes with the trigger conditioning, so the
// routes agree.
inline TwoRouteResult evolve_prepared_two_routes(const Operator& rho_composite, const Operator& q,
                                                 const Operator& u_object, const Operator& u_preparator,
                                                 const Tolerances& tol = {}) {
    if (rho_composite.signature().factor_count() != 2) {
        throw ValidationError("evolve_prepared_two_routes: composite state must have exactly two factors");
    }
    if (rho_composite.kind() != OperatorKind::Density) {
        throw ValidationError("evolve_prepared_two_routes: rho_composite must be kind density");
    }
    const int d_object = rho_composite.signature().factor_dim(0);
    const int d_preparator = rho_composite.signature().factor_dim(1);
    if (u_object.dim() != d_object || u_preparator.dim() != d_preparator || q.dim() != d_preparator) {
        throw ValidationError("evolve_prepared_two_routes: factor dimensions do not match the operands");
    }
    if (u_object.kind() != OperatorKind::Unitary || u_preparator.kind() != OperatorKind::Unitary) {
        throw ValidationError("evolve_prepared_two_routes: evolutions must be kind unitary");
    }

    Operator q_emb = embed(q, 1, rho_composite.signature(), tol);
    ConditionalStateResult collapsed = luders_collapse(rho_composite, q_emb, tol);
    Operator u_full = tensor_product(u_object, u_preparator, tol);
    Matrix evolved = hermitize(u_full.mat() * collapsed.state.mat() * u_full.mat().adjoint());
    Operator route_a = partial_trace(
        Operator(std::move(evolved), rho_composite.signature(), OperatorKind::Density, tol), {0}, tol);

    ConditionalStateResult prepared = conditional_state(rho_composite, q, tol);
    Matrix moved = hermitize(u_object.mat() * prepared.state.mat() * u_object.mat().adjoint());
    Operator route_b(std::move(moved), prepared.state.signature(), OperatorKind::Density, tol);

    double residual = operator_distance(route_a, route_b).trace_norm;
    return {std::move(route_a), std::move(route_b), residual};
}

}  // namespace prepsim

#endif  // PREPSIM_RAIO_HPP
