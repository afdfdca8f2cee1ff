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

#include "prepsim/preparators.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prepsim/random.hpp"

namespace prepsim {
namespace {

GridGeometry small_geometry() { return GridGeometry{32, 16, 3.0, {24.0, 8.0}}; }

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

TEST(HalfSpaceProjector, SplitsTheGridExactly) {
    GridGeometry geom{4, 2, 1.0, {3.0, 0.0}};
    Operator upper = make_half_space_projector(geom, HalfSpace::Upper);
    Operator lower = make_half_space_projector(geom, HalfSpace::Lower);
    Matrix expected = Matrix::Zero(4, 4);
    expected(2, 2) = 1.0;
    expected(3, 3) = 1.0;
    EXPECT_LT((upper.mat() - expected).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((upper.mat() + lower.mat() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(upper.mat().trace().real(), 2.0, 1e-15);
}

TEST(GaussianPacket, ConfinedToItsHalfAndNormalized) {
    GridGeometry geom = small_geometry();
    Vector up = gaussian_packet(geom, geom.packet_centers.first, HalfSpace::Upper);
    Vector down = gaussian_packet(geom, geom.packet_centers.second, HalfSpace::Lower);
    EXPECT_NEAR(up.squaredNorm(), 1.0, 1e-12);
    EXPECT_NEAR(down.squaredNorm(), 1.0, 1e-12);
    for (int x = 0; x < geom.split_index; ++x) {
        EXPECT_EQ(up(x), Complex(0.0, 0.0));
    }
    for (int x = geom.split_index; x < geom.n_sites; ++x) {
        EXPECT_EQ(down(x), Complex(0.0, 0.0));
    }
    EXPECT_GT(std::abs(up(24)), std::abs(up(30)));
}

TEST(SgModel, BalancedBeamPreparesUpperSpinHalfTheTime) {
    PreparatorSpec spec = build_sg(Complex(kInvSqrt2, 0.0), Complex(kInvSqrt2, 0.0),
                                   small_geometry(), SgVariant::Measurement);
    PreparationResult res = run_preparation(spec);
    EXPECT_NEAR(res.probability, 0.5, 1e-12);
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    EXPECT_LT((res.prepared_state.mat() - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((res.evolved_state.mat() - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(res.two_route_residual, 1e-10);
}

TEST(SgModel, PreparedSpinIsPureForAnyNonzeroAmplitude) {
    Rng rng(70);
    GridGeometry geom = small_geometry();
    for (int trial = 0; trial < 20; ++trial) {
        double a = rng.uniform();
        double phase = 6.28318 * rng.uniform();
        Complex alpha = std::sqrt(a) * Complex(std::cos(phase), std::sin(phase));
        Complex beta(std::sqrt(1.0 - a), 0.0);
        if (std::norm(alpha) < 1e-6) continue;
        PreparationResult res = run_preparation(build_sg(alpha, beta, geom, SgVariant::Negative));
        EXPECT_NEAR(res.probability, std::norm(alpha), 1e-10) << "trial " << trial;
        EXPECT_NEAR(res.prepared_state.mat()(0, 0).real(), 1.0, 1e-10) << "trial " << trial;
        EXPECT_LT(std::abs(res.prepared_state.mat()(0, 1)), 1e-10);
    }
}

TEST(SgModel, FullUpperAmplitudeTriggersSurely) {
    PreparationResult res = run_preparation(
        build_sg(Complex(1.0, 0.0), Complex(0.0, 0.0), small_geometry(), SgVariant::Measurement));
    EXPECT_NEAR(res.probability, 1.0, 1e-12);
}

TEST(SgModel, PassthroughScramblingNeverReachesTheSpin) {
    GridGeometry geom = small_geometry();
    Complex alpha(0.8, 0.0), beta(0.0, 0.6);
    PreparationResult baseline = run_preparation(build_sg(alpha, beta, geom, SgVariant::Negative));
    for (uint64_t seed = 0; seed < 20; ++seed) {
        PreparatorSpec spec = build_sg(alpha, beta, geom, SgVariant::DetectorPassthrough, seed);
        PreparationResult res = run_preparation(spec);
        EXPECT_LT(operator_distance(res.prepared_state, baseline.prepared_state).trace_norm, 1e-10)
            << "seed " << seed;
        EXPECT_NEAR(res.probability, baseline.probability, 1e-12);
        EXPECT_LT(res.two_route_residual, 1e-10) << "seed " << seed;
    }
}

TEST(SgModel, VariantsShareStateAndDifferInLabels) {
    GridGeometry geom = small_geometry();
    Complex alpha(0.6, 0.0), beta(0.8, 0.0);
    PreparatorSpec negative = build_sg(alpha, beta, geom, SgVariant::Negative);
    PreparatorSpec geometrical = build_sg(alpha, beta, geom, SgVariant::Geometrical);
    EXPECT_EQ(negative.kind, PreparatorKind::Dynamical);
    EXPECT_EQ(negative.occurrence, OccurrenceMode::Ideal);
    EXPECT_EQ(negative.label, "sg-negative");
    EXPECT_EQ(geometrical.kind, PreparatorKind::Geometrical);
    EXPECT_EQ(geometrical.occurrence, OccurrenceMode::FictitiousRaio);
    EXPECT_EQ(geometrical.label, "sg-geometrical");

    PreparationResult rn = run_preparation(negative);
    PreparationResult rg = run_preparation(geometrical);
    EXPECT_LT(operator_distance(rn.prepared_state, rg.prepared_state).trace_norm, 1e-12);
    EXPECT_LT(operator_distance(rn.evolved_state, rg.evolved_state).trace_norm, 1e-12);
    EXPECT_NEAR(rn.probability, rg.probability, 1e-12);
}

TEST(SgModel, RejectsUnnormalizedAmplitudes) {
    EXPECT_THROW(build_sg(Complex(0.8, 0.0), Complex(0.5, 0.0), small_geometry(), SgVariant::Negative),
                 ValidationError);
}

TEST(SgModel, CoincidenceStatisticsFactorize) {
    Rng rng(71);
    PreparatorSpec spec = build_sg(Complex(0.6, 0.0), Complex(0.0, 0.8), small_geometry(),
                                   SgVariant::Measurement);
    for (int trial = 0; trial < 10; ++trial) {
        Operator p = random_projector(DimensionSignature({2}), 1, rng);
        EXPECT_LT(verify_coincidence_factorization(spec.rho_composite, p, *spec.trigger), 1e-10);
    }
}

TEST(HoleModel, FullPassageIsCertain) {
    GridGeometry geom = small_geometry();
    Vector psi = Vector::Zero(geom.n_sites);
    Vector packet = gaussian_packet(geom, 24.0, HalfSpace::Upper);
    psi = packet;  // entirely inside the opening
    PreparationResult res = run_preparation(build_hole(psi, geom, HoleVariant::Negative));
    EXPECT_NEAR(res.probability, 1.0, 1e-12);
    Matrix expected = packet * packet.adjoint();
    EXPECT_LT((res.prepared_state.mat() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(HoleModel, PreparedStateIsTheRenormalizedPassingPacket) {
    GridGeometry geom = small_geometry();
    // Straddle the screen edge so that both passing and hitting parts exist.
    Vector psi = Vector::Zero(geom.n_sites);
    for (int x = 0; x < geom.n_sites; ++x) {
        double d = (x - 16.0) / 5.0;
        psi(x) = std::exp(-0.5 * d * d);
    }
    psi.normalize();
    PreparatorSpec spec = build_hole(psi, geom, HoleVariant::Negative);
    PreparationResult res = run_preparation(spec);

    Operator p_hole = make_half_space_projector(geom, HalfSpace::Upper);
    Vector psi_pass = p_hole.mat() * psi;
    double weight = psi_pass.squaredNorm();
    EXPECT_NEAR(res.probability, weight, 1e-12);
    Vector renorm = psi_pass / std::sqrt(weight);
    Matrix expected = renorm * renorm.adjoint();
    EXPECT_LT((res.prepared_state.mat() - expected).cwiseAbs().maxCoeff(), 1e-10);

    // Support stays inside the opening.
    for (int x = 0; x < geom.split_index; ++x) {
        EXPECT_LT(std::abs(res.prepared_state.mat()(x, x)), 1e-15);
    }
}

TEST(HoleModel, MatchesPureProjectionOracle) {
    GridGeometry geom{16, 8, 2.0, {12.0, 4.0}};
    Vector psi = Vector::Zero(16);
    for (int x = 0; x < 16; ++x) {
        double d = (x - 8.0) / 3.0;
        psi(x) = std::exp(-0.5 * d * d) * Complex(std::cos(0.3 * x), std::sin(0.3 * x));
    }
    psi.normalize();
    PreparatorSpec spec = build_hole(psi, geom, HoleVariant::Negative);
    PreparationResult res = run_preparation(spec);

    // Rebuild the conditional state from the composite vector by hand.
    Vector phi = Vector::Zero(32);
    Operator p_hole = make_half_space_projector(geom, HalfSpace::Upper);
    Vector psi_pass = p_hole.mat() * psi;
    Vector psi_hit = psi - psi_pass;
    for (int x = 0; x < 16; ++x) {
        phi(2 * x) = psi_pass(x);
        phi(2 * x + 1) = psi_hit(x);
    }
    Matrix expected = oracles::pure_conditional_route(phi, spec.trigger->mat(), 16, 2);
    EXPECT_LT((res.prepared_state.mat() - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(HoleModel, GeometricalVariantGivesIdenticalNumbers) {
    GridGeometry geom = small_geometry();
    Vector psi = Vector::Zero(geom.n_sites);
    for (int x = 0; x < geom.n_sites; ++x) {
        double d = (x - 17.0) / 4.0;
        psi(x) = std::exp(-0.5 * d * d);
    }
    psi.normalize();
    PreparationResult rn = run_preparation(build_hole(psi, geom, HoleVariant::Negative));
    PreparationResult rg = run_preparation(build_hole(psi, geom, HoleVariant::Geometrical));
    EXPECT_NEAR(rn.probability, rg.probability, 1e-15);
    EXPECT_LT(operator_distance(rn.prepared_state, rg.prepared_state).trace_norm, 1e-15);
}

TEST(HoleModel, ZeroPassageThrows) {
    GridGeometry geom = small_geometry();
    Vector psi = gaussian_packet(geom, geom.packet_centers.second, HalfSpace::Lower);
    EXPECT_THROW(build_hole(psi, geom, HoleVariant::Negative), ImpossibleEventError);
}

TEST(HoleModel, RejectsBadInputVectors) {
    GridGeometry geom = small_geometry();
    Vector wrong_length = Vector::Ones(geom.n_sites - 1);
    EXPECT_THROW(build_hole(wrong_length, geom, HoleVariant::Negative), ValidationError);
    Vector unnormalized = Vector::Ones(geom.n_sites);
    EXPECT_THROW(build_hole(unnormalized, geom, HoleVariant::Negative), ValidationError);
}

TEST(RunPreparation, CertainOccurrenceReducesTheState) {
    Rng rng(72);
    DimensionSignature sig({2, 3});
    Operator rho = random_density(sig, rng);
    Operator u1 = random_unitary(DimensionSignature({2}), rng);
    Operator u2 = random_unitary(DimensionSignature({3}), rng);
    PreparatorSpec spec(rho, std::nullopt, u1, u2, PreparatorKind::Dynamical, OccurrenceMode::None,
                        "certain");
    PreparationResult res = run_preparation(spec);
    EXPECT_NEAR(res.probability, 1.0, 1e-15);
    Operator reduced = partial_trace(rho, {0});
    EXPECT_LT(operator_distance(res.prepared_state, reduced).trace_norm, 1e-12);
    EXPECT_LT(res.two_route_residual, 1e-10);
}

TEST(RunPreparation, EvolvedStateMatchesCompositeRoute) {
    Rng rng(73);
    DimensionSignature sig({2, 3});
    for (int trial = 0; trial < 20; ++trial) {
        Operator rho = random_density(sig, rng);
        Operator q = random_projector(DimensionSignature({3}), 1 + trial % 2, rng);
        if (event_probability(rho, q, 1).raw <= 1e-6) continue;
        Operator u1 = random_unitary(DimensionSignature({2}), rng);
        Operator u2 = random_unitary(DimensionSignature({3}), rng);
        PreparatorSpec spec(rho, q, u1, u2, PreparatorKind::Dynamical, OccurrenceMode::General,
                            "random");
        PreparationResult res = run_preparation(spec);
        EXPECT_LT(res.two_route_residual, 1e-10) << "trial " << trial;

        TwoRouteResult routes = evolve_prepared_two_routes(rho, q, u1, u2);
        EXPECT_LT(operator_distance(res.evolved_state, routes.route_b).trace_norm, 1e-12);
        EXPECT_LT(operator_distance(res.evolved_state, routes.route_a).trace_norm, 1e-10);
    }
}

TEST(PreparatorSpecValidation, EnforcesStructure) {
    Rng rng(74);
    DimensionSignature sig({2, 3});
    Operator rho = random_density(sig, rng);
    Operator q = random_projector(DimensionSignature({3}), 1, rng);
    Operator u1 = Operator::identity(DimensionSignature({2}), OperatorKind::Unitary);
    Operator u2 = Operator::identity(DimensionSignature({3}), OperatorKind::Unitary);

    // A geometrical preparator must declare fictitious-RAIO occurrence.
    PreparatorSpec geo(rho, q, u1, u2, PreparatorKind::Geometrical, OccurrenceMode::Ideal, "bad");
    EXPECT_THROW(geo.validate(), ValidationError);

    // Trigger presence must match the occurrence mode.
    PreparatorSpec none_with_trigger(rho, q, u1, u2, PreparatorKind::Dynamical, OccurrenceMode::None,
                                     "bad");
    EXPECT_THROW(none_with_trigger.validate(), ValidationError);
    PreparatorSpec general_without(rho, std::nullopt, u1, u2, PreparatorKind::Dynamical,
                                   OccurrenceMode::General, "bad");
    EXPECT_THROW(general_without.validate(), ValidationError);

    // Unitaries must live on their own factors.
    PreparatorSpec swapped(rho, q, u2, u1, PreparatorKind::Dynamical, OccurrenceMode::General, "bad");
    EXPECT_THROW(swapped.validate(), ValidationError);

    // A trigger that can never fire is rejected.
    Vector phi = Vector::Zero(6);
    phi(0) = 1.0;  // support only on second-factor index 0
    Operator pure = pure_density(phi, sig);
    Matrix never = Matrix::Zero(3, 3);
    never(2, 2) = 1.0;
    Operator impossible(never, DimensionSignature({3}), OperatorKind::Projector);
    PreparatorSpec blocked(pure, impossible, u1, u2, PreparatorKind::Dynamical,
                           OccurrenceMode::General, "bad");
    EXPECT_THROW(blocked.validate(), ImpossibleEventError);
}

TEST(GridGeometryValidation, RejectsBadLayouts) {
    EXPECT_THROW((GridGeometry{1, 0, 1.0, {0.0, 0.0}}).validate(), ValidationError);
    EXPECT_THROW((GridGeometry{8, 0, 1.0, {6.0, 2.0}}).validate(), ValidationError);
    EXPECT_THROW((GridGeometry{8, 8, 1.0, {6.0, 2.0}}).validate(), ValidationError);
    EXPECT_THROW((GridGeometry{8, 4, -1.0, {6.0, 2.0}}).validate(), ValidationError);
}

TEST(EnumStrings, RoundTrip) {
    EXPECT_EQ(preparator_kind_from_string(to_string(PreparatorKind::Geometrical)),
              PreparatorKind::Geometrical);
    EXPECT_EQ(occurrence_mode_from_string(to_string(OccurrenceMode::FictitiousRaio)),
              OccurrenceMode::FictitiousRaio);
    EXPECT_EQ(sg_variant_from_string(to_string(SgVariant::DetectorPassthrough)),
              SgVariant::DetectorPassthrough);
    EXPECT_EQ(hole_variant_from_string(to_string(HoleVariant::Geometrical)),
              HoleVariant::Geometrical);
    EXPECT_THROW(occurrence_mode_from_string("sometimes"), ValidationError);
    EXPECT_THROW(sg_variant_from_string(""), ValidationError);
}

}  // namespace
}  // namespace prepsim
