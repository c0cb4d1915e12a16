// Copyright 2026 The wmchsh Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "wmchsh/error.hpp"
#include "wmchsh/weak_values.hpp"

using namespace wmchsh;
using namespace wmchsh::testing;

namespace {

const double kSqrt2 = std::sqrt(2.0);

DensityMatrix rotate_alice(const DensityMatrix &rho, const ComplexMatrix &u) {
    const ComplexMatrix full = tensor_product(u, pauli::identity());
    return DensityMatrix((full * rho.matrix() * full.adjoint()).hermitian_part());
}

ChshOutcome one_sided_outcome(const DensityMatrix &rho, const MeasurementFrame &frame) {
    return chsh_outcome_probs(weak_joint_one_sided(rho, frame, BobSetting::P),
                              weak_joint_one_sided(rho, frame, BobSetting::Q));
}

} // namespace

TEST_CASE("weak_value reference cases") {
    const Observable x(pauli::x());
    const PureState zero = PureState::basis(2, 0);
    const PureState plus = PureState::normalized({1.0, 1.0});
    const PureState x_plus = PureState::normalized({1.0, 1.0});

    CHECK(weak_value(zero, pauli::z(), x_plus) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(weak_value(plus, pauli::z(), x_plus)) < 1e-15);

    const double a = -30.0 * M_PI / 180.0;
    const PureState tilted({std::cos(a), std::sin(a)});
    const Observable z(pauli::z());
    const double anomalous = weak_value(tilted, z.projector(1), x_plus);
    CHECK(anomalous == doctest::Approx(std::cos(a) / (std::cos(a) + std::sin(a))).epsilon(1e-12));
    CHECK(anomalous == doctest::Approx(2.366).epsilon(1e-3));

    // Mixed-state form agrees with the pure form.
    const double mixed = weak_value(DensityMatrix::from_pure(tilted), z.projector(1), x.projector(1));
    CHECK(mixed == doctest::Approx(anomalous).epsilon(1e-12));
}

TEST_CASE("weak_value rejects degenerate postselection") {
    const Observable x(pauli::x());
    const DensityMatrix plus = DensityMatrix::from_pure(PureState::normalized({1.0, 1.0}));
    CHECK_THROWS_AS(weak_value(plus, pauli::z(), x.projector(-1)), NumericError);
    CHECK_THROWS_AS(weak_value(PureState::normalized({1.0, 1.0}), pauli::z(),
                               PureState::normalized({1.0, -1.0})),
                    NumericError);
    CHECK_THROWS_AS(weak_value(plus, pauli::z(), pauli::identity() * 2.0), ValidationError);
    CHECK_THROWS_AS(weak_value(plus, pauli::z(), pauli::z()), ValidationError);
    ComplexMatrix skew(2);
    skew(0, 1) = 1.0;
    CHECK_THROWS_AS(weak_value(plus, skew, x.projector(1)), ValidationError);
}

TEST_CASE("single-qubit weak joint probabilities") {
    const PureState zero = PureState::basis(2, 0);
    const PureState plus = PureState::normalized({1.0, 1.0});
    CHECK(weak_joint_1q(zero, 1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(weak_joint_1q(plus, 1, 1) == doctest::Approx(0.5).epsilon(1e-14));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const PureState psi = random_pure(rng, 2);
        double total = 0.0;
        for (int z : kOutcomes) {
            for (int x : kOutcomes) {
                total += weak_joint_1q(psi, z, x);
            }
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(weak_joint_1q(plus, 1, -1), NumericError);
    CHECK_THROWS_AS(weak_joint_1q(plus, 1, 0), ValidationError);
}

TEST_CASE("default frame is mutually unbiased on each side") {
    const auto frame = MeasurementFrame::standard();
    CHECK(mutually_unbiased(frame.alice_weak, frame.alice_strong));
    CHECK(mutually_unbiased(frame.bob_weak, frame.bob_strong));
    CHECK_FALSE(mutually_unbiased(frame.alice_weak, frame.alice_weak));
    for (int x : kOutcomes) {
        for (int z : kOutcomes) {
            for (int p : kOutcomes) {
                for (int q : kOutcomes) {
                    CHECK(std::abs(chsh_sign(x, z, p, q)) == 1);
                }
            }
        }
    }
}

TEST_CASE("singlet table takes four values") {
    const auto table = weak_joint_table(DensityMatrix::from_pure(singlet()), MeasurementFrame::standard());
    const std::array<double, 4> allowed{(2.0 + kSqrt2) / 16.0, kSqrt2 / 16.0, (2.0 - kSqrt2) / 16.0,
                                        -kSqrt2 / 16.0};
    std::array<int, 4> hits{};
    const auto rho = DensityMatrix::from_pure(singlet()).matrix();
    for (const auto &e : table.entries()) {
        REQUIRE(e.value.has_value());
        bool matched = false;
        for (std::size_t k = 0; k < allowed.size(); ++k) {
            if (std::abs(*e.value - allowed[k]) < 1e-12) {
                ++hits[k];
                matched = true;
            }
        }
        CHECK(matched);
        CHECK(*e.value == doctest::Approx(oracle_two_sided(rho, kAxisX, kAxisZ, kAxisP, kAxisQ, e.x,
                                                           e.z, e.p, e.q))
                              .epsilon(1e-12));
    }
    CHECK(hits == std::array<int, 4>{4, 4, 4, 4});
    CHECK(table.sum() == doctest::Approx(1.0).epsilon(1e-12));

    const auto outcome = chsh_outcome_probs(table);
    CHECK(std::abs(outcome.p_plus - (1.0 + kSqrt2) / 2.0) < 1e-12);
    CHECK(std::abs(outcome.p_minus - (1.0 - kSqrt2) / 2.0) < 1e-12);
    CHECK(std::abs(outcome.chsh_value - 2.0 * kSqrt2) < 1e-12);
}

TEST_CASE("maximally mixed state gives uniform tables") {
    const auto rho = DensityMatrix::maximally_mixed(4);
    const auto frame = MeasurementFrame::standard();
    const auto two = weak_joint_table(rho, frame);
    for (const auto &e : two.entries()) {
        CHECK(*e.value == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    }
    for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
        const auto one = weak_joint_one_sided(rho, frame, s);
        for (const auto &e : one.entries()) {
            CHECK(*e.value == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
        }
    }
    const auto outcome = chsh_outcome_probs(weak_joint_table(rho, frame));
    CHECK(outcome.p_plus == doctest::Approx(0.5));
    CHECK(outcome.p_minus == doctest::Approx(0.5));
    CHECK(std::abs(outcome.chsh_value) < 1e-14);
}

TEST_CASE("product state table factorizes") {
    const PureState h = PureState::basis(2, 0);
    const PureState v = PureState::basis(2, 1);
    const auto rho = DensityMatrix::from_pure(tensor_product(h, v));
    const auto table = weak_joint_table(rho, MeasurementFrame::standard());
    for (const auto &e : table.entries()) {
        // Alice: weak Z then strong X on |H>. Bob: weak Q then strong P on |V>.
        const auto a_post = axis_ket(kAxisX, e.x);
        const auto a_weak = axis_ket(kAxisZ, e.z);
        const auto b_post = axis_ket(kAxisP, e.p);
        const auto b_weak = axis_ket(kAxisQ, e.q);
        const auto overlap = [](const std::array<Complex, 2> &u, const std::array<Complex, 2> &w) {
            return std::conj(u[0]) * w[0] + std::conj(u[1]) * w[1];
        };
        const Complex alice = overlap(a_post, a_weak) * std::conj(a_weak[0]) * a_post[0];
        const Complex bob = overlap(b_post, b_weak) * std::conj(b_weak[1]) * b_post[1];
        const double alice_entry = alice.real();
        const double bob_entry = bob.real();
        CHECK(*e.value == doctest::Approx(alice_entry * bob_entry).epsilon(1e-12));
    }
}

TEST_CASE("werner tables scale the CHSH value") {
    const auto frame = MeasurementFrame::standard();
    for (double v : {0.0, 0.25, 0.5, 0.9447, 1.0}) {
        const auto c = chsh_outcome_probs(weak_joint_table(werner(v), frame));
        CHECK(c.chsh_value == doctest::Approx(2.0 * kSqrt2 * v).epsilon(1e-12));
    }
}

TEST_CASE("random states: table identities") {
    std::mt19937_64 rng(99);
    const auto frame = MeasurementFrame::standard();
    const auto s = chsh_operator(frame);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto rho = trial % 4 == 0 ? DensityMatrix::from_pure(random_pure(rng)) : random_density(rng);
        const auto table = weak_joint_table(rho, frame);
        CHECK(table.sum() == doctest::Approx(1.0).epsilon(1e-10));

        const auto two = chsh_outcome_probs(table);
        CHECK(std::abs(two.chsh_value - expectation(rho, s)) < 1e-10);
        CHECK(std::abs(two.p_plus + two.p_minus - 1.0) < 1e-10);
        CHECK(std::abs(two.chsh_value - 2.0 * (two.p_plus - two.p_minus)) < 1e-10);

        const auto one = one_sided_outcome(rho, frame);
        CHECK(std::abs(one.p_plus - two.p_plus) < 1e-12);
        CHECK(std::abs(one.chsh_value - two.chsh_value) < 1e-12);

        if (trial % 10 == 0) {
            for (const auto &e : table.entries()) {
                CHECK(std::abs(*e.value - oracle_two_sided(rho.matrix(), kAxisX, kAxisZ, kAxisP,
                                                           kAxisQ, e.x, e.z, e.p, e.q)) < 1e-12);
            }
        }
        for (BobSetting setting : {BobSetting::P, BobSetting::Q}) {
            const auto os = weak_joint_one_sided(rho, frame, setting);
            CHECK(os.sum() == doctest::Approx(1.0).epsilon(1e-10));
            const double bob_axis = setting == BobSetting::P ? kAxisP : kAxisQ;
            for (int x : kOutcomes) {
                for (int b : kOutcomes) {
                    const double born = expectation(
                        rho, tensor_product(frame.alice_strong.projector(x), frame.bob(setting).projector(b)));
                    CHECK(std::abs(os.value(x, 1, b) + os.value(x, -1, b) - born) < 1e-12);
                    if (trial % 10 == 0) {
                        for (int z : kOutcomes) {
                            CHECK(std::abs(os.value(x, z, b) -
                                           oracle_one_sided(rho.matrix(), kAxisX, kAxisZ, bob_axis, x, z,
                                                            b)) < 1e-12);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("zero-probability postselections stay undefined") {
    // Alice in the X = +1 eigenstate: every x = -1 postselection is impossible.
    const PureState plus = PureState::normalized({1.0, 1.0});
    const auto rho = DensityMatrix::from_pure(tensor_product(plus, PureState::basis(2, 0)));
    const auto table = weak_joint_table(rho, MeasurementFrame::standard());
    CHECK_FALSE(table.complete());
    CHECK_FALSE(table.get(-1, 1, 1, 1).has_value());
    CHECK(table.get(1, 1, 1, 1).has_value());
    CHECK_THROWS_AS((void)table.value(-1, 1, 1, 1), NumericError);
    CHECK_THROWS_AS(chsh_outcome_probs(table), NumericError);
    CHECK_THROWS_AS((void)table.sum(), NumericError);
}

TEST_CASE("table access is mode checked") {
    auto two = WeakJointTable::two_sided();
    auto one = WeakJointTable::one_sided(BobSetting::Q);
    CHECK(two.entries().size() == 16);
    CHECK(one.entries().size() == 8);
    CHECK_THROWS_AS(two.set(1, 1, 1, 0.5), ValidationError);
    CHECK_THROWS_AS(one.set(1, 1, 1, 1, 0.5), ValidationError);
    CHECK_THROWS_AS(two.set(1, 1, 2, 1, 0.5), ValidationError);
    CHECK_THROWS_AS(chsh_outcome_probs(one, one), ValidationError);
    CHECK_THROWS_AS(chsh_outcome_probs(one), ValidationError);
}

TEST_CASE("parsing of labels") {
    CHECK(parse_weak_basis("X") == WeakBasis::X);
    CHECK(parse_weak_basis("z") == WeakBasis::Z);
    CHECK(parse_bob_setting("Q") == BobSetting::Q);
    CHECK_THROWS_AS(parse_weak_basis("Y"), ValidationError);
    CHECK_THROWS_AS(parse_bob_setting(""), ValidationError);
    CHECK(to_string(WeakBasis::X) == "X");
    CHECK(to_string(BobSetting::P) == "P");
}

TEST_CASE("pure family curve matches the closed form") {
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) {
        grid.push_back(i / 100.0);
    }
    const auto curve = theory_curve(grid);
    for (const auto &pt : curve) {
        const auto closed = theory_closed_form(pt.tangle);
        CHECK(std::abs(pt.p_plus - closed.p_plus) < 1e-10);
        CHECK(std::abs(pt.p_minus - closed.p_minus) < 1e-10);
        CHECK(std::abs(pt.chsh_value - closed.chsh_value) < 1e-10);
    }
    CHECK(curve.back().p_minus == doctest::Approx((1.0 - kSqrt2) / 2.0).epsilon(1e-12));
    CHECK(curve.front().chsh_value == doctest::Approx(kSqrt2).epsilon(1e-12));
    for (std::size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve[i].chsh_value > curve[i - 1].chsh_value);
    }
    const double boundary = 3.0 - 2.0 * kSqrt2;
    CHECK(std::abs(theory_curve({boundary}).front().p_minus) < 1e-12);
    CHECK_THROWS_AS(theory_curve({1.5}), ValidationError);
    CHECK_THROWS_AS(theta_for_tangle(-0.1), ValidationError);
}

TEST_CASE("realism boundary of the pure family") {
    const double boundary = 3.0 - 2.0 * kSqrt2;
    auto p_minus = [](double t) { return theory_curve({t}).front().p_minus; };
    double lo = 0.0;
    double hi = 1.0;
    REQUIRE(p_minus(lo) > 0.0);
    REQUIRE(p_minus(hi) < 0.0);
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p_minus(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(0.5 * (lo + hi) - boundary) < 1e-9);
    CHECK(p_minus(boundary - 1e-6) > 0.0);
    CHECK(p_minus(boundary + 1e-6) < 0.0);
}

TEST_CASE("weak X variant leaves singlet accounting unchanged") {
    const auto rho = DensityMatrix::from_pure(singlet());
    const auto z_result = chsh_outcome_probs(weak_joint_table(rho, MeasurementFrame::standard()));

    const auto x_frame = chsh_outcome_probs(weak_joint_table(rho, MeasurementFrame::weak_x()));
    const auto rotated = rotate_alice(rho, half_wave_plate(22.5));
    const auto x_lab = chsh_outcome_probs(weak_joint_table(rotated, MeasurementFrame::lab(WeakBasis::X)));
    for (const auto &c : {x_frame, x_lab}) {
        CHECK(std::abs(c.p_plus - z_result.p_plus) < 1e-10);
        CHECK(std::abs(c.p_minus - z_result.p_minus) < 1e-10);
        CHECK(std::abs(c.chsh_value - z_result.chsh_value) < 1e-10);
    }
    const auto x_one = one_sided_outcome(rotated, MeasurementFrame::lab(WeakBasis::X));
    CHECK(std::abs(x_one.p_plus - z_result.p_plus) < 1e-10);
}

TEST_CASE("wave-plate and analytic X variants agree on any state") {
    std::mt19937_64 rng(321);
    const auto u = half_wave_plate(22.5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto rho = random_density(rng);
        const auto analytic = weak_joint_table(rho, MeasurementFrame::weak_x());
        const auto lab = weak_joint_table(rotate_alice(rho, u), MeasurementFrame::lab(WeakBasis::X));
        for (const auto &e : analytic.entries()) {
            CHECK(std::abs(*e.value - lab.value(e.x, e.z, e.p, e.q)) < 1e-12);
            CHECK(std::abs(*e.value - oracle_two_sided(rho.matrix(), kAxisZ, kAxisX, kAxisP, kAxisQ, e.z,
                                                       e.x, e.p, e.q)) < 1e-12);
        }
        for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
            const auto a = weak_joint_one_sided(rho, MeasurementFrame::standard(), s);
            const auto b = weak_joint_one_sided(rho, MeasurementFrame::weak_x(), s);
            // One-sided entries are symmetric under exchanging Alice's roles.
            for (const auto &e : a.entries()) {
                CHECK(std::abs(*e.value - b.value(e.x, e.z, e.p)) < 1e-12);
            }
        }
    }
}
