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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "test_support.hpp"
#include "wmchsh/error.hpp"
#include "wmchsh/linalg.hpp"
#include "wmchsh/weak_values.hpp"

using namespace wmchsh;

namespace {

const double kSqrt2 = std::sqrt(2.0);

/// Characteristic polynomial coefficients c_0..c_n (c_n = 1) by Faddeev-LeVerrier.
std::vector<double> characteristic_polynomial(const ComplexMatrix &a) {
    const std::size_t n = a.dim();
    std::vector<double> c(n + 1, 0.0);
    c[n] = 1.0;
    ComplexMatrix m(n);
    const ComplexMatrix id = ComplexMatrix::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        m = a * m + c[n - k + 1] * id;
        c[n - k] = -(a * m).trace().real() / static_cast<double>(k);
    }
    return c;
}

double eval_poly(const std::vector<double> &c, double x) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
        acc = acc * x + c[k];
    }
    return acc;
}

/// Real roots by sign-change scan plus bisection. Assumes simple roots.
std::vector<double> polynomial_roots(const std::vector<double> &c, double bound) {
    std::vector<double> roots;
    constexpr int kGrid = 200000;
    double prev_x = -bound;
    double prev_v = eval_poly(c, prev_x);
    for (int i = 1; i <= kGrid; ++i) {
        const double x = -bound + 2.0 * bound * i / kGrid;
        const double v = eval_poly(c, x);
        if ((prev_v < 0.0) != (v < 0.0)) {
            double lo = prev_x;
            double hi = x;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((eval_poly(c, lo) < 0.0) == (eval_poly(c, mid) < 0.0)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_v = v;
    }
    return roots;
}

DensityMatrix apply_local(const DensityMatrix &rho, const ComplexMatrix &ua, const ComplexMatrix &ub) {
    const ComplexMatrix u = tensor_product(ua, ub);
    return DensityMatrix((u * rho.matrix() * u.adjoint()).hermitian_part(), 1e-10);
}

} // namespace

TEST_CASE("tensor_product composes with Alice on the left") {
    const auto ket0 = PureState::basis(2, 0);
    const auto ket1 = PureState::basis(2, 1);
    const auto ket01 = tensor_product(ket0, ket1);
    CHECK(std::abs(ket01[1] - Complex(1.0)) < 1e-15);
    CHECK(std::abs(ket01[0]) + std::abs(ket01[2]) + std::abs(ket01[3]) < 1e-15);

    CHECK(max_abs_diff(tensor_product(pauli::identity(), pauli::identity()), ComplexMatrix::identity(4)) == 0.0);

    const auto zz = tensor_product(pauli::z(), pauli::z());
    const auto psi = singlet();
    const auto image = zz * psi.projector();
    CHECK(max_abs_diff(image, psi.projector() * -1.0) < 1e-15);

    CHECK_THROWS_AS(tensor_product(ComplexMatrix(4), ComplexMatrix(2)), ValidationError);
}

TEST_CASE("expectation of the CHSH operator") {
    const auto frame = MeasurementFrame::standard();
    const auto s = chsh_operator(frame);
    const auto rho = DensityMatrix::from_pure(singlet());
    CHECK(expectation(rho, s) == doctest::Approx(2.0 * kSqrt2).epsilon(1e-14));
    CHECK(std::abs(expectation(rho, tensor_product(pauli::z(), pauli::identity()))) < 1e-15);

    for (double v : {0.0, 0.3, 0.9447, 1.0}) {
        // Direct entrywise evaluation of Tr[S rho] as the reference.
        const auto w = werner(v);
        Complex direct = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                direct += s(i, j) * w.matrix()(j, i);
            }
        }
        CHECK(expectation(w, s) == doctest::Approx(direct.real()).epsilon(1e-14));
        CHECK(expectation(w, s) == doctest::Approx(2.0 * kSqrt2 * v).epsilon(1e-12));
    }

    ComplexMatrix not_hermitian(4);
    not_hermitian(0, 1) = 1.0;
    CHECK_THROWS_AS(expectation(rho, not_hermitian), ValidationError);
}

TEST_CASE("expectation is linear in the state") {
    std::mt19937_64 rng(11);
    const auto s = chsh_operator(MeasurementFrame::standard());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = testing::random_density(rng);
        const auto b = testing::random_density(rng);
        const double w = u(rng);
        const double mixed = expectation(a.mix(b, w), s);
        CHECK(mixed == doctest::Approx(w * expectation(a, s) + (1.0 - w) * expectation(b, s)).epsilon(1e-12));
    }
}

TEST_CASE("tangle of reference states") {
    CHECK(tangle(DensityMatrix::from_pure(singlet())) == doctest::Approx(1.0).epsilon(1e-12));
    const auto hh = tensor_product(PureState::basis(2, 0), PureState::basis(2, 0));
    CHECK(tangle(DensityMatrix::from_pure(hh)) == doctest::Approx(0.0));
    CHECK(tangle(DensityMatrix::from_pure(compensated_pair(22.5))) == doctest::Approx(0.5).epsilon(1e-12));
    for (double theta : {0.0, 10.0, 30.0, 45.0}) {
        const double expected = std::pow(std::sin(2.0 * theta * M_PI / 180.0), 2);
        CHECK(tangle(DensityMatrix::from_pure(compensated_pair(theta, 0.7))) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
    for (double v : {0.2, 1.0 / 3.0, 0.5, 0.9447, 1.0}) {
        const double c = std::max(0.0, (3.0 * v - 1.0) / 2.0);
        CHECK(tangle(werner(v)) == doctest::Approx(c * c).epsilon(1e-10));
    }
}

TEST_CASE("tangle rejects non-physical input") {
    ComplexMatrix m = ComplexMatrix::identity(4);
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    m(2, 2) = 0.0;
    m(3, 3) = 0.0;
    CHECK_THROWS_AS(tangle(DensityMatrix(m)), ValidationError);
}

TEST_CASE("tangle is invariant under local unitaries") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rho = trial % 2 == 0 ? testing::random_density(rng)
                                        : DensityMatrix::from_pure(testing::random_pure(rng));
        const auto moved = apply_local(rho, testing::random_unitary_2(rng), testing::random_unitary_2(rng));
        CHECK(std::abs(tangle(moved) - tangle(rho)) < 1e-9);
    }
}

TEST_CASE("fidelity with the singlet") {
    const auto psi = singlet();
    CHECK(fidelity(DensityMatrix::from_pure(psi), psi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(DensityMatrix::maximally_mixed(4), psi) == doctest::Approx(0.25).epsilon(1e-14));
    for (double v : {0.0, 0.5, 0.9447}) {
        CHECK(fidelity(werner(v), psi) == doctest::Approx((3.0 * v + 1.0) / 4.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(fidelity(DensityMatrix::maximally_mixed(2), psi), ValidationError);
}

TEST_CASE("hermitian_eigenvalues on fixed inputs") {
    const auto id = hermitian_eigenvalues(ComplexMatrix::identity(4));
    for (double v : id) {
        CHECK(v == doctest::Approx(1.0));
    }
    const auto zz = hermitian_eigenvalues(tensor_product(pauli::z(), pauli::z()));
    const std::vector<double> expected{-1.0, -1.0, 1.0, 1.0};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(zz[i] == doctest::Approx(expected[i]));
    }
    ComplexMatrix skew(2);
    skew(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eigenvalues(skew), ValidationError);
}

TEST_CASE("hermitian_eigenvalues match characteristic polynomial roots") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t dim = trial % 3 == 0 ? 2 : 4;
        const auto h = testing::random_hermitian(rng, dim);
        const auto eig = hermitian_eigen(h);
        const auto coeffs = characteristic_polynomial(h);
        const auto roots = polynomial_roots(coeffs, h.frobenius_norm() + 1.0);
        REQUIRE(roots.size() == dim);
        double trace = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            CHECK(std::abs(eig.values[i] - roots[i]) < 1e-9);
            trace += eig.values[i];
        }
        CHECK(std::abs(trace - h.trace().real()) < 1e-10);
        CHECK(std::is_sorted(eig.values.begin(), eig.values.end()));
        // Eigenvectors reconstruct the matrix.
        const auto rebuilt = eig.vectors * ComplexMatrix::diagonal(eig.values) * eig.vectors.adjoint();
        CHECK(max_abs_diff(rebuilt, h) < 1e-12);
    }
}

TEST_CASE("observables have exact spectral reconstruction") {
    const auto id = ComplexMatrix::identity(2);
    for (const auto &m : {pauli::x(), pauli::y(), pauli::z(), bob_p_matrix(), bob_q_matrix()}) {
        const Observable o(m);
        ComplexMatrix rebuilt(2);
        for (int k : kOutcomes) {
            rebuilt += o.eigenvalue(k) * o.projector(k);
            CHECK(max_abs_diff(o.projector(k) * o.projector(k), o.projector(k)) < 1e-12);
        }
        CHECK(max_abs_diff(rebuilt, m) < 1e-12);
        CHECK(max_abs_diff(o.projector(1) + o.projector(-1), id) < 1e-12);
        CHECK((o.projector(1) * o.projector(-1)).max_abs() < 1e-12);
    }

    const auto p = bob_p_matrix();
    const auto q = bob_q_matrix();
    CHECK(max_abs_diff(p * p, id) < 1e-12);
    CHECK(max_abs_diff(q * q, id) < 1e-12);
    CHECK(std::abs((p * q).trace()) < 1e-12);

    CHECK_THROWS_AS(Observable{id}, ValidationError);
    CHECK_THROWS_AS(Observable{ComplexMatrix(4)}, ValidationError);
    CHECK_THROWS_AS((void)Observable(pauli::x()).projector(0), ValidationError);
}

TEST_CASE("density matrix validation") {
    ComplexMatrix m = ComplexMatrix::identity(4);
    CHECK_THROWS_AS(DensityMatrix{m}, ValidationError);
    m *= 0.25;
    m(0, 1) = Complex(0.0, 0.1);
    CHECK_THROWS_AS(DensityMatrix{m}, ValidationError);
    CHECK_THROWS_AS(PureState({1.0, 1.0}), ValidationError);
    CHECK(DensityMatrix::maximally_mixed(4).is_physical());
}

TEST_CASE("half-wave plate at 22.5 degrees exchanges Z and X") {
    const auto u = half_wave_plate(22.5);
    CHECK(max_abs_diff(u.adjoint() * pauli::z() * u, pauli::x()) < 1e-15);
    CHECK(max_abs_diff(u.adjoint() * pauli::x() * u, pauli::z()) < 1e-15);
}
