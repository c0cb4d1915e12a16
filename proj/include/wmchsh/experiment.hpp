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
 * @file experiment.hpp
 * Virtual photon-counting experiment: entangled pair source, slit scans of the
 * weak-measurement pointer under ten postselection conditions, accidental
 * coincidences and tomography counts.
 *
 * Every (condition, repeat, slit position) cell draws from its own generator
 * seeded by hashing (seed, condition, repeat, position), so output does not
 * depend on evaluation order or thread count.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "wmchsh/linalg.hpp"
#include "wmchsh/pointer.hpp"
#include "wmchsh/weak_values.hpp"

namespace wmchsh {

struct SourceConfig {
    /// Pump polarization angle, degrees.
    double theta = 45.0;
    /// Residual phase, radians.
    double phi = 0.0;
    /// Weight of the pure pair against white noise.
    double werner_v = 1.0;
    /// Detected coincidences per second.
    double pair_rate = 2000.0;

    void validate() const;
};

struct ScanConfig {
    double slit_width = 350.0;  ///< um
    double step = 87.5;         ///< um
    double range = 3500.0;      ///< um
    double dwell = 10.0;        ///< s per position
    int repeats = 70;
    double coincidence_window = 3.0; ///< ns, recorded only
    double pump_period = 12.5;       ///< ns, recorded only
    double accidental_rate = 10.0;   ///< coincidences/s through a fully open slit

    void validate() const;
    /// Slit centres, symmetric about zero and `step` apart.
    [[nodiscard]] std::vector<double> positions() const;
};

/// Werner weight whose state has the given tangle (tangle > 0).
double werner_visibility_for_tangle(double tangle);

/// v |psi_d><psi_d| + (1 - v) I/4 with psi_d the compensated pair.
DensityMatrix delivered_state(const SourceConfig &src);

enum class ConditionKind { Chsh, Horizontal, Vertical };

/// One of the ten measurement conditions. CHSH conditions postselect Alice's
/// strong outcome and Bob's outcome for one setting; H and V postselect
/// Alice's polarization with Bob unconditioned.
struct Condition {
    ConditionKind kind = ConditionKind::Chsh;
    WeakBasis weak_basis = WeakBasis::Z;
    BobSetting setting = BobSetting::P;
    int strong = 1;
    int bob = 1;

    /// "X+P-" style labels (Z in place of X when X is measured weakly), or "H"/"V".
    [[nodiscard]] std::string name() const;
};

/// The ten conditions in canonical order: X+P+, X+P-, X-P+, X-P-, the same
/// four for Q, then H and V.
std::vector<Condition> measurement_conditions(WeakBasis basis);
/// Inverse of Condition::name(); throws ValidationError.
Condition parse_condition(const std::string &name);

struct CountRecord {
    std::string condition;
    double slit_position = 0.0; ///< um
    int repeat = 0;
    std::int64_t coincidences = 0;
    std::int64_t accidentals = 0;
};

struct SimulationResult {
    std::vector<CountRecord> records;
    std::vector<std::string> warnings;
};

/// Density integrated over the slit at `centre` for one condition.
double slit_probability(const ConditionDensity &density, double centre, double slit_width);

/// Per-condition detection densities on the lab apparatus. For the X variant
/// Alice's state is first rotated by a 22.5 degree half-wave plate.
std::vector<ConditionDensity> condition_densities(const DensityMatrix &rho, const PointerConfig &pointer,
                                                  WeakBasis basis);

/// Records ordered by condition, repeat, then slit position. `threads` only
/// affects speed.
SimulationResult simulate_run(const SourceConfig &src, const ScanConfig &scan, const PointerConfig &pointer,
                              WeakBasis basis, std::uint64_t seed, unsigned threads = 1);

struct TomographyConfig {
    /// Expected detected pairs per setting (sum over a complete basis).
    double pairs_per_setting = 1e6;
    /// 36 settings over {H,V,D,A,R,L}^2 instead of 16 over {H,V,D,R}^2.
    bool overcomplete = false;

    void validate() const;
};

struct TomographyCount {
    /// Two letters: Alice's then Bob's projector, e.g. "HD".
    std::string setting;
    std::int64_t counts = 0;
};

/// Projector for a polarization letter H, V, D, A, R or L.
ComplexMatrix polarization_projector(char letter);
std::vector<std::string> tomography_settings(bool overcomplete);
std::vector<TomographyCount> simulate_tomography(const SourceConfig &src, const TomographyConfig &cfg,
                                                 std::uint64_t seed);

/// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

} // namespace wmchsh
