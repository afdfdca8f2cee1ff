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

// The four-entity preparation framework (composite state, triggering event,
// conditional prepared state, factorized evolution) together with the two
// discretized physical models that instantiate it: a spin-1/2 beam-splitting
// magnet over a 1-D grid and a hole-in-the-screen passage with a
// two-dimensional momentum-transfer record.

#ifndef PREPSIM_PREPARATORS_HPP
#define PREPSIM_PREPARATORS_HPP

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "prepsim/collapse.hpp"
#include "prepsim/raio.hpp"
#include "prepsim/random.hpp"
#include "prepsim/tensor.hpp"

namespace prepsim {

// Grid amplitudes below this floor are zeroed when packets are built, so
// each packet's support stays strictly inside its own half-space.
inline constexpr double kAmplitudeFloor = 1e-12;

enum class PreparatorKind { Dynamical, Geometrical };

inline const char* to_string(PreparatorKind k) {
    return k == PreparatorKind::Dynamical ? "dynamical" : "geometrical";
}

inline PreparatorKind preparator_kind_from_string(const std::string& s) {
    if (s == "dynamical") return PreparatorKind::Dynamical;
    if (s == "geometrical") return PreparatorKind::Geometrical;
    throw ValidationError("PreparatorKind: unknown kind \"" + s + "\"");
}

enum class OccurrenceMode { Ideal, General, FictitiousRaio, None };

inline const char* to_string(OccurrenceMode m) {
    switch (m) {
        case OccurrenceMode::Ideal: return "ideal";
        case OccurrenceMode::General: return "general";
        case OccurrenceMode::FictitiousRaio: return "fictitious-RAIO";
        case OccurrenceMode::None: return "none";
    }
    return "general";
}

inline OccurrenceMode occurrence_mode_from_string(const std::string& s) {
    if (s == "ideal") return OccurrenceMode::Ideal;
    if (s == "general") return OccurrenceMode::General;
    if (s == "fictitious-RAIO") return OccurrenceMode::FictitiousRaio;
    if (s == "none") return OccurrenceMode::None;
    throw ValidationError("OccurrenceMode: unknown mode \"" + s + "\"");
}

enum class HalfSpace { Upper, Lower };

// 1-D spatial grid with a split into a lower half [0, split_index) and an
// upper half [split_index, n_sites), and Gaussian packet parameters for the
// two branch wavefunctions (first center: upper/hole-passing branch; second
// center: lower/screen-hitting branch).
struct GridGeometry {
    int n_sites = 64;
    int split_index = 32;
    double packet_width = 4.0;
    std::pair<double, double> packet_centers = {48.0, 16.0};

    void validate() const {
        if (n_sites < 2) {
            throw ValidationError("GridGeometry: n_sites must be at least 2, got " + std::to_string(n_sites));
        }
        if (split_index <= 0 || split_index >= n_sites) {
            throw ValidationError("GridGeometry: split_index must lie strictly between 0 and n_sites");
        }
        if (!(packet_width > 0.0)) {
            throw ValidationError("GridGeometry: packet_width must be positive");
        }
    }
};

// Diagonal 0/1 projector onto one half of the grid. The lower projector is
// the complement of the upper one, so the two sum to the identity exactly.
inline Operator make_half_space_projector(const GridGeometry& geom, HalfSpace side,
                                          const Tolerances& tol = {}) {
    geom.validate();
    Matrix upper = Matrix::Zero(geom.n_sites, geom.n_sites);
    for (int x = geom.split_index; x < geom.n_sites; ++x) upper(x, x) = 1.0;
    Operator up(std::move(upper), DimensionSignature({geom.n_sites}), OperatorKind::Projector, tol);
    if (side == HalfSpace::Upper) return up;
    return complement(up, tol);
}

// Normalized Gaussian amplitude profile confined to one half of the grid:
// sites on the other half are structurally zero and amplitudes below
// kAmplitudeFloor are truncated before normalization.
inline Vector gaussian_packet(const GridGeometry& geom, double center, HalfSpace side) {
    geom.validate();
    Vector v = Vector::Zero(geom.n_sites);
    int lo = (side == HalfSpace::Upper) ? geom.split_index : 0;
    int hi = (side == HalfSpace::Upper) ? geom.n_sites : geom.split_index;
    for (int x = lo; x < hi; ++x) {
        double d = (x - center) / geom.packet_width;
        double a = std::exp(-0.5 * d * d);
        if (a >= kAmplitudeFloor) v(x) = a;
    }
    double n = v.norm();
    if (n <= 0.0) {
        throw ValidationError("gaussian_packet: no amplitude survives on the packet's half-space");
    }
    return v / n;
}

// The four entities of one preparation, plus classification metadata. The
// trigger is absent exactly when the conditioning event is the certain
// event (occurrence none); time labels are tags only, dynamics enters
// through the unitaries.
struct PreparatorSpec {
    Operator rho_composite;
    std::optional<Operator> trigger;
    Operator u_object;
    Operator u_preparator;
    PreparatorKind kind;
    OccurrenceMode occurrence;
    std::string label;
    double t_initial = 0.0;
    double t_final = 1.0;

    PreparatorSpec(Operator rho, std::optional<Operator> trig, Operator u_obj, Operator u_prep,
                   PreparatorKind kind_, OccurrenceMode occurrence_, std::string label_)
        : rho_composite(std::move(rho)),
          trigger(std::move(trig)),
          u_object(std::move(u_obj)),
          u_preparator(std::move(u_prep)),
          kind(kind_),
          occurrence(occurrence_),
          label(std::move(label_)) {}

    void validate(const Tolerances& tol = {}) const {
        if (rho_composite.kind() != OperatorKind::Density) {
            throw ValidationError("PreparatorSpec: rho_composite must be kind density");
        }
        if (rho_composite.signature().factor_count() != 2) {
            throw ValidationError("PreparatorSpec: rho_composite must have exactly two factors");
        }
        if (u_object.kind() != OperatorKind::Unitary ||
            u_object.dim() != rho_composite.signature().factor_dim(0)) {
            throw ValidationError("PreparatorSpec: u_object must be a unitary on the first factor");
        }
        if (u_preparator.kind() != OperatorKind::Unitary ||
            u_preparator.dim() != rho_composite.signature().factor_dim(1)) {
            throw ValidationError("PreparatorSpec: u_preparator must be a unitary on the second factor");
        }
        if (occurrence == OccurrenceMode::None) {
            if (trigger.has_value()) {
                throw ValidationError("PreparatorSpec: occurrence none requires the certain-event marker");
            }
        } else {
            if (!trigger.has_value()) {
                throw ValidationError("PreparatorSpec: a trigger is required unless occurrence is none");
            }
            if (trigger->kind() != OperatorKind::Projector ||
                trigger->dim() != rho_composite.signature().factor_dim(1)) {
                throw ValidationError("PreparatorSpec: trigger must be a projector on the second factor");
            }
            EventProbability p = event_probability(rho_composite, *trigger, 1, tol);
            if (p.raw <= tol.certainty_eps) {
                throw ImpossibleEventError("PreparatorSpec: trigger probability " + std::to_string(p.raw) +
                                           " is at or below certainty_eps");
            }
        }
        if (kind == PreparatorKind::Geometrical && occurrence != OccurrenceMode::FictitiousRaio) {
            throw ValidationError("PreparatorSpec: a geometrical preparator requires fictitious-RAIO occurrence");
        }
    }
};

// Outcome of one preparation: the triggering probability, the conditional
// prepared state of the first factor, its evolved version, and the residual
// between the two equivalent evolution routes.
struct PreparationResult {
    double probability;
    Operator prepared_state;
    Operator evolved_state;
    double two_route_residual;
};

// Runs the preparation a PreparatorSpec describes: conditions the composite state
// on the trigger (or reduces it outright for the certain event), evolves
// the prepared first-factor state with u_object alone, and cross-checks
// against the composite-evolution route.
inline PreparationResult run_preparation(const PreparatorSpec& spec, const Tolerances& tol = {}) {
    tol.validate();
    spec.validate(tol);

    Operator trigger = spec.trigger.has_value()
                           ? *spec.trigger
                           : Operator::identity(DimensionSignature({spec.rho_composite.signature().factor_dim(1)}),
                                                OperatorKind::Projector, tol);

    double probability;
    std::optional<Operator> prepared;
    if (spec.occurrence == OccurrenceMode::None) {
        probability = 1.0;
        prepared = partial_trace(spec.rho_composite, {0}, tol);
    } else {
        ConditionalStateResult cond = conditional_state(spec.rho_composite, trigger, tol);
        probability = cond.probability;
        prepared = std::move(cond.state);
    }

    TwoRouteResult routes =
        evolve_prepared_two_routes(spec.rho_composite, trigger, spec.u_object, spec.u_preparator, tol);

    Matrix evolved = hermitize(spec.u_object.mat() * prepared->mat() * spec.u_object.mat().adjoint());
    Operator evolved_state(std::move(evolved), prepared->signature(), OperatorKind::Density, tol);

    return {probability, std::move(*prepared), std::move(evolved_state), routes.residual};
}

// ------------------------- beam-splitting model -----------------------------

enum class SgVariant { Measurement, DetectorPassthrough, Negative, Geometrical };

inline const char* to_string(SgVariant v) {
    switch (v) {
        case SgVariant::Measurement: return "measurement";
        case SgVariant::DetectorPassthrough: return "detector-passthrough";
        case SgVariant::Negative: return "negative";
        case SgVariant::Geometrical: return "geometrical";
    }
    return "measurement";
}

inline SgVariant sg_variant_from_string(const std::string& s) {
    if (s == "measurement") return SgVariant::Measurement;
    if (s == "detector-passthrough") return SgVariant::DetectorPassthrough;
    if (s == "negative") return SgVariant::Negative;
    if (s == "geometrical") return SgVariant::Geometrical;
    throw ValidationError("SgVariant: unknown variant \"" + s + "\"");
}

// Spin-1/2 particle after the beam-splitting magnet: spin component k is
// riding the packet on half-space k, and the trigger is arrival in the
// upper half. The detector-passthrough variant composes a seeded unitary
// acting on the upper-half sites into the spatial evolution; it scrambles
// the outgoing packet without touching the spin. The seed is used only by
// that variant.
inline PreparatorSpec build_sg(Complex alpha, Complex beta, const GridGeometry& geom, SgVariant variant,
                               std::uint64_t seed = 0, const Tolerances& tol = {}) {
    geom.validate();
    double weight = std::norm(alpha) + std::norm(beta);
    if (std::abs(weight - 1.0) > tol.validation_eps) {
        throw ValidationError("build_sg: |alpha|^2 + |beta|^2 deviates from 1 by " +
                              std::to_string(std::abs(weight - 1.0)));
    }

    Vector psi_up = gaussian_packet(geom, geom.packet_centers.first, HalfSpace::Upper);
    Vector psi_down = gaussian_packet(geom, geom.packet_centers.second, HalfSpace::Lower);

    DimensionSignature sig({2, geom.n_sites});
    Vector phi = Vector::Zero(2 * geom.n_sites);
    phi.segment(0, geom.n_sites) = alpha * psi_up;
    phi.segment(geom.n_sites, geom.n_sites) = beta * psi_down;
    Operator rho = pure_density(phi, sig, tol);

    Operator trigger = make_half_space_projector(geom, HalfSpace::Upper, tol);
    Operator u_object = Operator::identity(DimensionSignature({2}), OperatorKind::Unitary, tol);

    Matrix u_space = Matrix::Identity(geom.n_sites, geom.n_sites);
    if (variant == SgVariant::DetectorPassthrough) {
        Rng rng(seed);
        int n_upper = geom.n_sites - geom.split_index;
        u_space.block(geom.split_index, geom.split_index, n_upper, n_upper) = haar_unitary(n_upper, rng);
    }
    Operator u_preparator(std::move(u_space), DimensionSignature({geom.n_sites}), OperatorKind::Unitary, tol);

    PreparatorKind kind = (variant == SgVariant::Geometrical) ? PreparatorKind::Geometrical
                                                              : PreparatorKind::Dynamical;
    OccurrenceMode occurrence;
    switch (variant) {
        case SgVariant::Measurement:
        case SgVariant::DetectorPassthrough: occurrence = OccurrenceMode::General; break;
        case SgVariant::Negative: occurrence = OccurrenceMode::Ideal; break;
        case SgVariant::Geometrical: occurrence = OccurrenceMode::FictitiousRaio; break;
    }

    return PreparatorSpec(std::move(rho), std::move(trigger), std::move(u_object), std::move(u_preparator),
                          kind, occurrence, std::string("sg-") + to_string(variant));
}

// ------------------------- hole-in-screen model -----------------------------

enum class HoleVariant { Negative, Geometrical };

inline const char* to_string(HoleVariant v) {
    return v == HoleVariant::Negative ? "negative" : "geometrical";
}

inline HoleVariant hole_variant_from_string(const std::string& s) {
    if (s == "negative") return HoleVariant::Negative;
    if (s == "geometrical") return HoleVariant::Geometrical;
    throw ValidationError("HoleVariant: unknown variant \"" + s + "\"");
}

// Particle meeting a screen whose opening occupies the upper half of the
// grid. The passage correlates the particle with a two-dimensional record:
// component 0 (no momentum transferred to the screen) carries the
// hole-passing part of psi_in, component 1 the screen-hitting part. The
// trigger is the no-transfer record state, built as the complement of the
// transfer projector.
inline PreparatorSpec build_hole(const Vector& psi_in, const GridGeometry& geom, HoleVariant variant,
                                 const Tolerances& tol = {}) {
    geom.validate();
    if (psi_in.size() != geom.n_sites) {
        throw ValidationError("build_hole: psi_in length does not match n_sites");
    }
    if (std::abs(psi_in.squaredNorm() - 1.0) > tol.validation_eps) {
        throw ValidationError("build_hole: psi_in must be normalized");
    }

    Operator p_hole = make_half_space_projector(geom, HalfSpace::Upper, tol);
    Vector psi_pass = p_hole.mat() * psi_in;
    Vector psi_hit = psi_in - psi_pass;
    if (psi_pass.squaredNorm() <= tol.certainty_eps) {
        throw ImpossibleEventError("build_hole: hole-passage amplitude is numerically zero");
    }

    DimensionSignature sig({geom.n_sites, 2});
    Vector phi = Vector::Zero(2 * geom.n_sites);
    for (int x = 0; x < geom.n_sites; ++x) {
        phi(2 * x) = psi_pass(x);
        phi(2 * x + 1) = psi_hit(x);
    }
    Operator rho = pure_density(phi, sig, tol);

    Matrix transfer = Matrix::Zero(2, 2);
    transfer(1, 1) = 1.0;
    Operator q_transfer(std::move(transfer), DimensionSignature({2}), OperatorKind::Projector, tol);
    Operator trigger = complement(q_transfer, tol);

    Operator u_object = Operator::identity(DimensionSignature({geom.n_sites}), OperatorKind::Unitary, tol);
    Operator u_preparator = Operator::identity(DimensionSignature({2}), OperatorKind::Unitary, tol);

    PreparatorKind kind = (variant == HoleVariant::Geometrical) ? PreparatorKind::Geometrical
                                                                : PreparatorKind::Dynamical;
    OccurrenceMode occurrence = (variant == HoleVariant::Geometrical) ? OccurrenceMode::FictitiousRaio
                                                                      : OccurrenceMode::Ideal;

    return PreparatorSpec(std::move(rho), std::move(trigger), std::move(u_object), std::move(u_preparator),
                          kind, occurrence, std::string("hole-") + to_string(variant));
}

}  // namespace prepsim

#endif  // PREPSIM_PREPARATORS_HPP
