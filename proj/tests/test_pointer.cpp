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
#include "wmchsh/pointer.hpp"

using namespace wmchsh;
using namespace wmchsh::testing;

namespace {

/// Plain trapezoid on a dense grid, independent of the library quadrature.
template <typename F> double trapezoid(F f, double lo, double hi, int n = 200000) {
    const double h = (hi - lo) / n;
    double acc = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < n; ++i) {
        acc += f(lo + h * i);
    }
    return acc * h;
}

double max_bias(const DensityMatrix &rho, const PointerConfig &cfg) {
    double worst = 0.0;
    for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
        const auto exact = exact_density_table(rho, s, cfg);
        const auto analytic = weak_joint_one_sided(rho, MeasurementFrame::standard(), s);
        for (const auto &e : analytic.entries()) {
            worst = std::max(worst, std::abs(exact.value(e.x, e.z, e.p) - *e.value));
        }
    }
    return worst;
}

} // namespace

TEST_CASE("pointer configuration") {
    const PointerConfig cfg;
    CHECK(cfg.delta_r() / cfg.sigma == doctest::Approx(0.05));
    CHECK(cfg.midpoint() == doctest::Approx(0.0));
    CHECK_THROWS_AS((PointerConfig{10.0, -10.0, 350.0}.validate()), ValidationError);
    CHECK_THROWS_AS((PointerConfig{-10.0, 10.0, 0.0}.validate()), ValidationError);
    CHECK_THROWS_AS(PointerConfig::from_ratio(-1.0), ValidationError);
    const auto r = PointerConfig::from_ratio(0.2, 100.0);
    CHECK(r.delta_r() == doctest::Approx(20.0));
}

TEST_CASE("Kraus operators") {
    const PointerConfig far{0.0, 100.0 * 350.0, 350.0};
    const auto k = kraus_at_position(far.r_H, far);
    CHECK(k(0, 0).real() == doctest::Approx(gaussian_amplitude(0.0, 350.0)));
    CHECK(std::abs(k(1, 1)) < 1e-300);
    CHECK(std::abs(k(0, 1)) == 0.0);

    for (double ratio : {0.05, 1.0, 4.0}) {
        const auto cfg = PointerConfig::from_ratio(ratio);
        const auto [lo, hi] = pointer_support(cfg);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                const double integral = trapezoid(
                    [&](double r) {
                        const auto kr = kraus_at_position(r, cfg);
                        return (kr.adjoint() * kr)(i, j).real();
                    },
                    lo, hi, 20000);
                CHECK(std::abs(integral - (i == j ? 1.0 : 0.0)) < 1e-9);
            }
        }
        const double overlap = trapezoid(
            [&](double r) {
                return gaussian_amplitude(r - cfg.r_H, cfg.sigma) * gaussian_amplitude(r - cfg.r_V, cfg.sigma);
            },
            lo, hi);
        CHECK(std::abs(overlap - decoherence_factor(cfg)) < 1e-9);
    }
}

TEST_CASE("decoherence factor") {
    CHECK(decoherence_factor(PointerConfig::from_ratio(1e-9)) == doctest::Approx(1.0));
    CHECK(decoherence_factor(PointerConfig::from_ratio(0.05)) == doctest::Approx(0.99969).epsilon(1e-5));
    CHECK(decoherence_factor(PointerConfig::from_ratio(60.0)) < 1e-100);
}

TEST_CASE("simpson quadrature") {
    CHECK(simpson([](double x) { return x * x * x; }, 0.0, 2.0, 2) == doctest::Approx(4.0));
    CHECK_THROWS_AS(simpson([](double) { return 1.0; }, 0.0, 1.0, 3), ValidationError);
    CHECK_THROWS_AS(simpson([](double) { return 1.0; }, 0.0, 1.0, 0), ValidationError);
}

TEST_CASE("joint density normalization and positivity") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rho = random_density(rng);
        const auto cfg = PointerConfig::from_ratio(trial % 2 == 0 ? 0.05 : 3.0);
        for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
            const auto density = joint_density(rho, s, cfg);
            double total = 0.0;
            for (int x : kOutcomes) {
                for (int b : kOutcomes) {
                    total += density.condition(x, b).total();
                    for (double r = -3000.0; r <= 3000.0; r += 50.0) {
                        CHECK(density(r, x, b) >= -1e-15);
                    }
                }
            }
            CHECK(std::abs(total - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("Alice marginal of an H photon is one Gaussian") {
    const auto rho = DensityMatrix::from_pure(tensor_product(PureState::basis(2, 0), PureState::normalized({1.0, 2.0})));
    const auto cfg = PointerConfig::from_ratio(0.5);
    const auto density = joint_density(rho, BobSetting::Q, cfg);
    for (double r = -1500.0; r <= 1500.0; r += 100.0) {
        double marginal = 0.0;
        for (int x : kOutcomes) {
            for (int b : kOutcomes) {
                marginal += density(r, x, b);
            }
        }
        const double g = gaussian_amplitude(r - cfg.r_H, cfg.sigma);
        CHECK(marginal == doctest::Approx(g * g).epsilon(1e-12));
    }
}

TEST_CASE("pointer expectation equals <Z> for any displacement") {
    std::mt19937_64 rng(43);
    for (double ratio : {0.01, 0.05, 0.4, 2.0, 10.0}) {
        const auto cfg = PointerConfig::from_ratio(ratio);
        for (int trial = 0; trial < 10; ++trial) {
            const auto rho = random_density(rng);
            const double z = expectation(rho, tensor_product(pauli::z(), pauli::identity()));
            for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
                const auto density = joint_density(rho, s, cfg);
                double acc = 0.0;
                for (int x : kOutcomes) {
                    for (int b : kOutcomes) {
                        acc += density.condition(x, b).moment([&](double r) {
                            return (cfg.r_H + cfg.r_V - 2.0 * r) / cfg.delta_r();
                        });
                    }
                }
                CHECK(std::abs(acc - z) < 1e-9);
            }
        }
    }
}

TEST_CASE("strong limit reproduces sequential Born probabilities") {
    std::mt19937_64 rng(47);
    const auto cfg = PointerConfig::from_ratio(20.0);
    const auto frame = MeasurementFrame::standard();
    const auto [lo, hi] = pointer_support(cfg);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = random_density(rng);
        for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
            const auto density = joint_density(rho, s, cfg);
            for (int x : kOutcomes) {
                for (int b : kOutcomes) {
                    for (int z : kOutcomes) {
                        const auto &part = density.condition(x, b);
                        const double half = z == 1 ? part.integrate(lo, cfg.midpoint(), 4000)
                                                   : part.integrate(cfg.midpoint(), hi, 4000);
                        const auto pz = tensor_product(frame.alice_weak.projector(z), pauli::identity());
                        const auto collapsed = pz * rho.matrix() * pz;
                        const double born =
                            (tensor_product(frame.alice_strong.projector(x), frame.bob(s).projector(b)) * collapsed)
                                .trace()
                                .real();
                        CHECK(std::abs(half - born) < 1e-6);
                    }
                }
            }
        }
    }
}

TEST_CASE("estimator sum rule on exact densities") {
    std::mt19937_64 rng(53);
    for (double ratio : {0.05, 1.0}) {
        const auto cfg = PointerConfig::from_ratio(ratio);
        for (int trial = 0; trial < 20; ++trial) {
            const auto rho = random_density(rng);
            for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
                const auto table = exact_density_table(rho, s, cfg);
                const auto density = joint_density(rho, s, cfg);
                for (int x : kOutcomes) {
                    for (int b : kOutcomes) {
                        CHECK(std::abs(table.value(x, 1, b) + table.value(x, -1, b) -
                                       density.condition(x, b).total()) < 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("weak-limit bias shrinks with the displacement") {
    const auto rho = DensityMatrix::from_pure(singlet());
    double previous = std::numeric_limits<double>::infinity();
    for (double ratio : {0.4, 0.2, 0.1, 0.05}) {
        const double bias = max_bias(rho, PointerConfig::from_ratio(ratio));
        CHECK(bias <= previous);
        previous = bias;
    }
    CHECK(previous < 1e-4);
    CHECK(max_bias(rho, PointerConfig::from_ratio(0.01)) < 0.01 * 0.01);
}

TEST_CASE("exact-density bias is the pointer back-action term") {
    // estimate - analytic = (D - 1)/2 * Tr[(offdiag(Pi_x) x Pi_b) rho], D the mode overlap.
    std::mt19937_64 rng(59);
    const auto frame = MeasurementFrame::standard();
    for (double ratio : {0.01, 0.05, 0.4, 2.0}) {
        const auto cfg = PointerConfig::from_ratio(ratio);
        const double overlap = std::exp(-ratio * ratio / 8.0);
        for (int trial = 0; trial < 10; ++trial) {
            const auto rho = trial == 0 ? DensityMatrix::from_pure(singlet()) : random_density(rng);
            for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
                const auto exact = exact_density_table(rho, s, cfg);
                const auto analytic = weak_joint_one_sided(rho, frame, s);
                for (const auto &e : analytic.entries()) {
                    ComplexMatrix off = frame.alice_strong.projector(e.x);
                    off(0, 0) = 0.0;
                    off(1, 1) = 0.0;
                    const double coherence =
                        (tensor_product(off, frame.bob(s).projector(e.p)) * rho.matrix()).trace().real();
                    const double backaction = 0.5 * (overlap - 1.0) * coherence;
                    CHECK(std::abs(exact.value(e.x, e.z, e.p) - *e.value - backaction) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("exact densities reproduce the X variant") {
    const auto rho = DensityMatrix::from_pure(singlet());
    const auto u = tensor_product(half_wave_plate(22.5), pauli::identity());
    const DensityMatrix rotated((u * rho.matrix() * u.adjoint()).hermitian_part());
    const auto cfg = PointerConfig::from_ratio(0.01);
    for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
        const auto exact = exact_density_table(rotated, s, cfg, MeasurementFrame::lab(WeakBasis::X));
        const auto analytic = weak_joint_one_sided(rho, MeasurementFrame::weak_x(), s);
        for (const auto &e : analytic.entries()) {
            CHECK(std::abs(exact.value(e.x, e.z, e.p) - *e.value) < 0.01 * 0.01);
        }
    }
    CHECK_THROWS_AS(joint_density(rho, BobSetting::P, cfg, MeasurementFrame::weak_x()), ValidationError);
}
