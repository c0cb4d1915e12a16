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

#pragma once

/**
 * @file pointer.hpp
 * Gaussian spatial pointer for the weak polarization measurement.
 *
 * A photon with polarization H leaves the interferometer in a Gaussian mode
 * centred at r_H, V in a mode centred at r_V. The transverse intensity profile
 * has standard deviation sigma, so the amplitude is
 *   g(u) = (2 pi sigma^2)^(-1/4) exp(-u^2 / (4 sigma^2)).
 * The Kraus operator at position r is K(r) = g(r - r_H) Pi_H + g(r - r_V) Pi_V.
 * All lengths are in micrometres.
 */

#include <array>
#include <functional>

#include "wmchsh/linalg.hpp"
#include "wmchsh/weak_values.hpp"

namespace wmchsh {

struct PointerConfig {
    double r_H = -8.75;
    double r_V = 8.75;
    double sigma = 350.0;

    [[nodiscard]] double delta_r() const noexcept { return r_V - r_H; }
    [[nodiscard]] double midpoint() const noexcept { return 0.5 * (r_H + r_V); }
    /// Throws ValidationError unless r_V > r_H and sigma > 0.
    void validate() const;

    /// Modes placed symmetrically about zero with the given displacement/width ratio.
    static PointerConfig from_ratio(double ratio, double sigma = 350.0);
};

double gaussian_amplitude(double offset, double sigma);

/// exp(-delta_r^2 / (8 sigma^2)): overlap of the two pointer modes, which is
/// the factor multiplying Alice's H/V coherences once the pointer is traced out.
double decoherence_factor(const PointerConfig &cfg);

ComplexMatrix kraus_at_position(double r, const PointerConfig &cfg);

/// Fixed-grid composite Simpson rule with `intervals` (even) subintervals.
double simpson(const std::function<double(double)> &f, double lo, double hi,
               std::size_t intervals);

/// Detection density for one condition: Alice postselects `alice_post` after
/// the pointer coupling, Bob postselects `bob_post`.
///   density(r) = Tr[(K(r)^dagger F_A K(r) x F_B) rho]
///              = a_H g_H(r)^2 + a_V g_V(r)^2 + a_HV g_H(r) g_V(r)
class ConditionDensity {
  public:
    ConditionDensity(const DensityMatrix &rho, const ComplexMatrix &alice_post,
                     const ComplexMatrix &bob_post, const PointerConfig &cfg);

    double operator()(double r) const;
    /// Integral over [lo, hi] by fixed-grid Simpson quadrature.
    [[nodiscard]] double integrate(double lo, double hi, std::size_t intervals = 64) const;
    /// Integral over the full support (both modes +- 8 sigma).
    [[nodiscard]] double total() const;
    /// (1/delta_r) * integral of (r_V - r) density (z = +1) or (r - r_H) density (z = -1).
    [[nodiscard]] double weak_estimate(int z) const;
    /// Integral over the full support of f(r) * density(r).
    [[nodiscard]] double moment(const std::function<double(double)> &f) const;

    [[nodiscard]] const PointerConfig &config() const noexcept { return cfg_; }
    [[nodiscard]] std::array<double, 3> coefficients() const noexcept { return {a_h_, a_v_, a_hv_}; }

  private:
    PointerConfig cfg_;
    double a_h_ = 0.0;
    double a_v_ = 0.0;
    double a_hv_ = 0.0;
};

/// Support [lo, hi] covering both modes to +- 8 sigma.
std::array<double, 2> pointer_support(const PointerConfig &cfg);

/// Evaluable map (r, alice strong outcome, bob outcome) -> density for one Bob
/// setting. Alice's strong observable is taken from `frame`.
class SpatialDensity {
  public:
    SpatialDensity(const DensityMatrix &rho, BobSetting setting, const PointerConfig &cfg,
                   const MeasurementFrame &frame = MeasurementFrame::standard());

    double operator()(double r, int alice_outcome, int bob_outcome) const;
    [[nodiscard]] const ConditionDensity &condition(int alice_outcome, int bob_outcome) const;
    [[nodiscard]] BobSetting setting() const noexcept { return setting_; }
    [[nodiscard]] const PointerConfig &config() const noexcept { return cfg_; }

  private:
    BobSetting setting_;
    PointerConfig cfg_;
    std::array<ConditionDensity, 4> parts_;
};

SpatialDensity joint_density(const DensityMatrix &rho, BobSetting setting, const PointerConfig &cfg,
                             const MeasurementFrame &frame = MeasurementFrame::standard());

/// One-sided weak-valued table recovered from exact (noise-free, untruncated)
/// densities through the centroid estimator. Differs from the analytic table
/// only by finite-strength back-action.
WeakJointTable exact_density_table(const DensityMatrix &rho, BobSetting setting,
                                   const PointerConfig &cfg,
                                   const MeasurementFrame &frame = MeasurementFrame::standard());

} // namespace wmchsh
