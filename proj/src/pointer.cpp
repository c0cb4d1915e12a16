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

#include "wmchsh/pointer.hpp"

#include <algorithm>
#include <cmath>

#include "wmchsh/error.hpp"

namespace wmchsh {

void PointerConfig::validate() const {
    if (!(sigma > 0.0)) {
        throw ValidationError("pointer sigma must be positive");
    }
    if (!(r_V > r_H)) {
        throw ValidationError("pointer requires r_V > r_H");
    }
}

PointerConfig PointerConfig::from_ratio(double ratio, double sigma) {
    const double half = 0.5 * ratio * sigma;
    PointerConfig cfg{-half, half, sigma};
    cfg.validate();
    return cfg;
}

double gaussian_amplitude(double offset, double sigma) {
    return std::pow(2.0 * M_PI * sigma * sigma, -0.25) * std::exp(-offset * offset / (4.0 * sigma * sigma));
}

double decoherence_factor(const PointerConfig &cfg) {
    cfg.validate();
    const double d = cfg.delta_r();
    return std::exp(-d * d / (8.0 * cfg.sigma * cfg.sigma));
}

ComplexMatrix kraus_at_position(double r, const PointerConfig &cfg) {
    cfg.validate();
    ComplexMatrix k(2);
    k(0, 0) = gaussian_amplitude(r - cfg.r_H, cfg.sigma);
    k(1, 1) = gaussian_amplitude(r - cfg.r_V, cfg.sigma);
    return k;
}

double simpson(const std::function<double(double)> &f, double lo, double hi,
               std::size_t intervals) {
    if (intervals < 2 || intervals % 2 != 0) {
        throw ValidationError("simpson: interval count must be even and >= 2");
    }
    const double h = (hi - lo) / static_cast<double>(intervals);
    double acc = f(lo) + f(hi);
    for (std::size_t i = 1; i < intervals; ++i) {
        acc += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + h * static_cast<double>(i));
    }
    return acc * h / 3.0;
}

std::array<double, 2> pointer_support(const PointerConfig &cfg) {
    return {std::min(cfg.r_H, cfg.r_V) - 8.0 * cfg.sigma, std::max(cfg.r_H, cfg.r_V) + 8.0 * cfg.sigma};
}

// ---------------------------------------------------------------------------
// ConditionDensity

namespace {

/// Tr[(|i><j| x F_B) rho]
Complex partial_element(const DensityMatrix &rho, const ComplexMatrix &bob_post, std::size_t i,
                        std::size_t j) {
    const auto &m = rho.matrix();
    Complex acc = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t l = 0; l < 2; ++l) {
            acc += bob_post(k, l) * m(2 * j + l, 2 * i + k);
        }
    }
    return acc;
}

} // namespace

ConditionDensity::ConditionDensity(const DensityMatrix &rho, const ComplexMatrix &alice_post,
                                   const ComplexMatrix &bob_post, const PointerConfig &cfg)
    : cfg_(cfg) {
    cfg.validate();
    if (rho.dim() != 4 || alice_post.dim() != 2 || bob_post.dim() != 2) {
        throw ValidationError("ConditionDensity: expected a two-qubit state and qubit postselections");
    }
    a_h_ = (alice_post(0, 0) * partial_element(rho, bob_post, 0, 0)).real();
    a_v_ = (alice_post(1, 1) * partial_element(rho, bob_post, 1, 1)).real();
    a_hv_ = (alice_post(0, 1) * partial_element(rho, bob_post, 0, 1) +
             alice_post(1, 0) * partial_element(rho, bob_post, 1, 0))
                .real();
}

double ConditionDensity::operator()(double r) const {
    const double gh = gaussian_amplitude(r - cfg_.r_H, cfg_.sigma);
    const double gv = gaussian_amplitude(r - cfg_.r_V, cfg_.sigma);
    return a_h_ * gh * gh + a_v_ * gv * gv + a_hv_ * gh * gv;
}

double ConditionDensity::integrate(double lo, double hi, std::size_t intervals) const {
    return simpson([this](double r) { return (*this)(r); }, lo, hi, intervals);
}

double ConditionDensity::moment(const std::function<double(double)> &f) const {
    const auto [lo, hi] = pointer_support(cfg_);
    // Step well below sigma; Simpson on a Gaussian is then accurate to ~1e-14.
    const auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / (0.02 * cfg_.sigma)));
    return simpson([&](double r) { return f(r) * (*this)(r); }, lo, hi, intervals + intervals % 2);
}

double ConditionDensity::total() const {
    return moment([](double) { return 1.0; });
}

double ConditionDensity::weak_estimate(int z) const {
    require_outcome(z);
    const double r_h = cfg_.r_H;
    const double r_v = cfg_.r_V;
    const double integral = z == 1 ? moment([r_v](double r) { return r_v - r; })
                                   : moment([r_h](double r) { return r - r_h; });
    return integral / cfg_.delta_r();
}

// ---------------------------------------------------------------------------
// SpatialDensity

namespace {

std::size_t part_index(int alice_outcome, int bob_outcome) {
    require_outcome(alice_outcome);
    require_outcome(bob_outcome);
    return (alice_outcome == 1 ? 0 : 2) + (bob_outcome == 1 ? 0 : 1);
}

void require_lab_pointer(const MeasurementFrame &frame) {
    if (max_abs_diff(frame.alice_weak.matrix(), pauli::z()) > kAnalyticTol) {
        throw ValidationError("the pointer couples to H/V: Alice's weak observable must be Z");
    }
}

} // namespace

SpatialDensity::SpatialDensity(const DensityMatrix &rho, BobSetting setting,
                               const PointerConfig &cfg, const MeasurementFrame &frame)
    : setting_(setting), cfg_(cfg),
      parts_{ConditionDensity(rho, frame.alice_strong.projector(1), frame.bob(setting).projector(1), cfg),
             ConditionDensity(rho, frame.alice_strong.projector(1), frame.bob(setting).projector(-1), cfg),
             ConditionDensity(rho, frame.alice_strong.projector(-1), frame.bob(setting).projector(1), cfg),
             ConditionDensity(rho, frame.alice_strong.projector(-1), frame.bob(setting).projector(-1), cfg)} {
    require_lab_pointer(frame);
}

double SpatialDensity::operator()(double r, int alice_outcome, int bob_outcome) const {
    return parts_[part_index(alice_outcome, bob_outcome)](r);
}

const ConditionDensity &SpatialDensity::condition(int alice_outcome, int bob_outcome) const {
    return parts_[part_index(alice_outcome, bob_outcome)];
}

SpatialDensity joint_density(const DensityMatrix &rho, BobSetting setting, const PointerConfig &cfg,
                             const MeasurementFrame &frame) {
    return SpatialDensity(rho, setting, cfg, frame);
}

WeakJointTable exact_density_table(const DensityMatrix &rho, BobSetting setting,
                                   const PointerConfig &cfg, const MeasurementFrame &frame) {
    const SpatialDensity density(rho, setting, cfg, frame);
    WeakJointTable table = WeakJointTable::one_sided(setting);
    for (int strong : kOutcomes) {
        for (int b : kOutcomes) {
            const ConditionDensity &part = density.condition(strong, b);
            for (int weak : kOutcomes) {
                const double v = part.weak_estimate(weak);
                if (frame.alice_weak_label == WeakBasis::Z) {
                    table.set(strong, weak, b, v);
                } else {
                    table.set(weak, strong, b, v);
                }
            }
        }
    }
    return table;
}

} // namespace wmchsh
