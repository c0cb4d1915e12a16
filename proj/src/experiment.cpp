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

#include "wmchsh/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "wmchsh/error.hpp"

namespace wmchsh {

void SourceConfig::validate() const {
    if (!(theta >= 0.0 && theta <= 90.0)) {
        throw ValidationError("source.theta must lie in [0, 90] degrees");
    }
    if (!std::isfinite(phi)) {
        throw ValidationError("source.phi must be finite");
    }
    if (!(werner_v >= 0.0 && werner_v <= 1.0)) {
        throw ValidationError("source.werner_v must lie in [0, 1]");
    }
    if (!(pair_rate >= 0.0) || !std::isfinite(pair_rate)) {
        throw ValidationError("source.pair_rate must be non-negative");
    }
}

void ScanConfig::validate() const {
    if (!(slit_width > 0.0)) {
        throw ValidationError("scan.slit_width must be positive");
    }
    if (!(step > 0.0)) {
        throw ValidationError("scan.step must be positive");
    }
    if (!(range >= step)) {
        throw ValidationError("scan.range must be at least one step");
    }
    if (!(dwell > 0.0)) {
        throw ValidationError("scan.dwell must be positive");
    }
    if (repeats < 1) {
        throw ValidationError("scan.repeats must be at least 1");
    }
    if (!(coincidence_window >= 0.0) || !(pump_period >= 0.0)) {
        throw ValidationError("scan timing parameters must be non-negative");
    }
    if (!(accidental_rate >= 0.0) || !std::isfinite(accidental_rate)) {
        throw ValidationError("scan.accidental_rate must be non-negative");
    }
}

std::vector<double> ScanConfig::positions() const {
    validate();
    const auto n = static_cast<std::size_t>(std::floor(range / step + 1e-9)) + 1;
    std::vector<double> out(n);
    const double start = -0.5 * step * static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = start + step * static_cast<double>(i);
    }
    return out;
}

double werner_visibility_for_tangle(double tangle) {
    if (!(tangle > 0.0 && tangle <= 1.0)) {
        throw ValidationError("werner tangle must lie in (0, 1]");
    }
    return (2.0 * std::sqrt(tangle) + 1.0) / 3.0;
}

DensityMatrix delivered_state(const SourceConfig &src) {
    src.validate();
    const DensityMatrix pure = DensityMatrix::from_pure(compensated_pair(src.theta, src.phi));
    return pure.mix(DensityMatrix::maximally_mixed(4), src.werner_v);
}

// ---------------------------------------------------------------------------
// Conditions

std::string Condition::name() const {
    switch (kind) {
    case ConditionKind::Horizontal:
        return "H";
    case ConditionKind::Vertical:
        return "V";
    case ConditionKind::Chsh:
        break;
    }
    std::string out;
    out += weak_basis == WeakBasis::Z ? 'X' : 'Z';
    out += strong > 0 ? '+' : '-';
    out += setting == BobSetting::P ? 'P' : 'Q';
    out += bob > 0 ? '+' : '-';
    return out;
}

std::vector<Condition> measurement_conditions(WeakBasis basis) {
    std::vector<Condition> out;
    for (BobSetting setting : {BobSetting::P, BobSetting::Q}) {
        for (int strong : kOutcomes) {
            for (int bob : kOutcomes) {
                out.push_back({ConditionKind::Chsh, basis, setting, strong, bob});
            }
        }
    }
    out.push_back({ConditionKind::Horizontal, basis, BobSetting::P, 1, 1});
    out.push_back({ConditionKind::Vertical, basis, BobSetting::P, -1, 1});
    return out;
}

Condition parse_condition(const std::string &name) {
    if (name == "H") {
        return {ConditionKind::Horizontal, WeakBasis::Z, BobSetting::P, 1, 1};
    }
    if (name == "V") {
        return {ConditionKind::Vertical, WeakBasis::Z, BobSetting::P, -1, 1};
    }
    auto sign = [&](char c) {
        if (c == '+') {
            return 1;
        }
        if (c == '-') {
            return -1;
        }
        throw ValidationError("unknown condition '" + name + "'");
    };
    if (name.size() != 4 || (name[0] != 'X' && name[0] != 'Z') || (name[2] != 'P' && name[2] != 'Q')) {
        throw ValidationError("unknown condition '" + name + "'");
    }
    Condition c;
    c.weak_basis = name[0] == 'X' ? WeakBasis::Z : WeakBasis::X;
    c.strong = sign(name[1]);
    c.setting = name[2] == 'P' ? BobSetting::P : BobSetting::Q;
    c.bob = sign(name[3]);
    return c;
}

// ---------------------------------------------------------------------------
// Densities

namespace {

constexpr std::size_t kSlitIntervals = 64;

DensityMatrix lab_state(const DensityMatrix &rho, WeakBasis basis) {
    if (basis == WeakBasis::Z) {
        return rho;
    }
    const ComplexMatrix u = tensor_product(half_wave_plate(22.5), pauli::identity());
    return DensityMatrix((u * rho.matrix() * u.adjoint()).hermitian_part(), kReconstructionTol);
}

/// Probability mass of a unit Gaussian mode outside [lo, hi].
double outside_mass(double centre, double sigma, double lo, double hi) {
    const double s = sigma * std::sqrt(2.0);
    return 0.5 * std::erfc((centre - lo) / s) + 0.5 * std::erfc((hi - centre) / s);
}

std::vector<std::string> geometry_warnings(const ScanConfig &scan, const PointerConfig &pointer) {
    std::vector<std::string> out;
    const auto positions = scan.positions();
    const double lo = positions.front() - 0.5 * scan.slit_width;
    const double hi = positions.back() + 0.5 * scan.slit_width;
    const auto support = pointer_support(pointer);
    if (lo < support[0] || hi > support[1]) {
        out.emplace_back("scan exceeds the modelled pointer support (+-8 sigma around both modes)");
    }
    const double missed = std::max(outside_mass(pointer.r_H, pointer.sigma, lo, hi),
                                   outside_mass(pointer.r_V, pointer.sigma, lo, hi));
    if (missed > 1e-3) {
        std::ostringstream msg;
        msg << "scan window misses " << missed << " of the pointer density; centroid estimates will be biased";
        out.push_back(msg.str());
    }
    return out;
}

} // namespace

double slit_probability(const ConditionDensity &density, double centre, double slit_width) {
    return density.integrate(centre - 0.5 * slit_width, centre + 0.5 * slit_width, kSlitIntervals);
}

std::vector<ConditionDensity> condition_densities(const DensityMatrix &rho, const PointerConfig &pointer,
                                                  WeakBasis basis) {
    if (rho.dim() != 4) {
        throw ValidationError("condition_densities requires a two-qubit state");
    }
    const DensityMatrix lab = lab_state(rho, basis);
    const MeasurementFrame frame = MeasurementFrame::lab(basis);
    const Observable z(pauli::z());
    std::vector<ConditionDensity> out;
    for (const auto &c : measurement_conditions(basis)) {
        switch (c.kind) {
        case ConditionKind::Chsh:
            out.emplace_back(lab, frame.alice_strong.projector(c.strong), frame.bob(c.setting).projector(c.bob),
                             pointer);
            break;
        case ConditionKind::Horizontal:
            out.emplace_back(lab, z.projector(1), pauli::identity(), pointer);
            break;
        case ConditionKind::Vertical:
            out.emplace_back(lab, z.projector(-1), pauli::identity(), pointer);
            break;
        }
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

std::int64_t draw_poisson(std::mt19937_64 &gen, double mean) {
    if (!(mean > 0.0)) {
        return 0;
    }
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(gen);
}

} // namespace

SimulationResult simulate_run(const SourceConfig &src, const ScanConfig &scan, const PointerConfig &pointer,
                              WeakBasis basis, std::uint64_t seed, unsigned threads) {
    src.validate();
    scan.validate();
    pointer.validate();

    const DensityMatrix rho = delivered_state(src);
    const auto conditions = measurement_conditions(basis);
    const auto densities = condition_densities(rho, pointer, basis);
    const ConditionDensity unconditioned(lab_state(rho, basis), pauli::identity(), pauli::identity(), pointer);
    const auto positions = scan.positions();
    const std::size_t n_pos = positions.size();
    const auto n_rep = static_cast<std::size_t>(scan.repeats);

    std::vector<double> signal_mean(conditions.size() * n_pos);
    std::vector<double> accidental_mean(n_pos);
    for (std::size_t i = 0; i < n_pos; ++i) {
        for (std::size_t c = 0; c < conditions.size(); ++c) {
            signal_mean[c * n_pos + i] =
                src.pair_rate * scan.dwell * slit_probability(densities[c], positions[i], scan.slit_width);
        }
        // Accidentals scale with the singles rates, which vanish without pairs.
        accidental_mean[i] = src.pair_rate > 0.0 ? scan.accidental_rate * scan.dwell *
                                                       slit_probability(unconditioned, positions[i], scan.slit_width)
                                                 : 0.0;
    }

    SimulationResult result;
    result.warnings = geometry_warnings(scan, pointer);
    result.records.resize(conditions.size() * n_rep * n_pos);

    auto fill = [&](std::size_t rep_begin, std::size_t rep_end) {
        for (std::size_t c = 0; c < conditions.size(); ++c) {
            const std::string name = conditions[c].name();
            for (std::size_t rep = rep_begin; rep < rep_end; ++rep) {
                for (std::size_t i = 0; i < n_pos; ++i) {
                    std::mt19937_64 gen(mix_seed(mix_seed(mix_seed(seed, c), rep), i));
                    const double acc = accidental_mean[i];
                    CountRecord &r = result.records[(c * n_rep + rep) * n_pos + i];
                    r.condition = name;
                    r.slit_position = positions[i];
                    r.repeat = static_cast<int>(rep);
                    r.coincidences = draw_poisson(gen, signal_mean[c * n_pos + i] + acc);
                    r.accidentals = draw_poisson(gen, acc);
                }
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, n_rep);
    if (workers == 1) {
        fill(0, n_rep);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_rep + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n_rep, begin + chunk);
            if (begin < end) {
                pool.emplace_back(fill, begin, end);
            }
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Tomography

void TomographyConfig::validate() const {
    if (!(pairs_per_setting > 0.0) || !std::isfinite(pairs_per_setting)) {
        throw ValidationError("tomography.pairs_per_setting must be positive");
    }
}

ComplexMatrix polarization_projector(char letter) {
    const double h = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    switch (letter) {
    case 'H':
        return PureState({1.0, 0.0}).projector();
    case 'V':
        return PureState({0.0, 1.0}).projector();
    case 'D':
        return PureState({h, h}).projector();
    case 'A':
        return PureState({h, -h}).projector();
    case 'R':
        return PureState({h, i * h}).projector();
    case 'L':
        return PureState({h, -i * h}).projector();
    default:
        throw ValidationError(std::string("unknown polarization '") + letter + "'");
    }
}

std::vector<std::string> tomography_settings(bool overcomplete) {
    const std::string letters = overcomplete ? "HVDARL" : "HVDR";
    std::vector<std::string> out;
    for (char a : letters) {
        for (char b : letters) {
            out.push_back(std::string{a, b});
        }
    }
    return out;
}

std::vector<TomographyCount> simulate_tomography(const SourceConfig &src, const TomographyConfig &cfg,
                                                 std::uint64_t seed) {
    cfg.validate();
    const DensityMatrix rho = delivered_state(src);
    const auto settings = tomography_settings(cfg.overcomplete);
    std::vector<TomographyCount> out;
    out.reserve(settings.size());
    constexpr std::uint64_t kTomographyStream = 0x746f6d6f67726170ULL;
    for (std::size_t k = 0; k < settings.size(); ++k) {
        const auto &s = settings[k];
        const double p = std::max(
            0.0, expectation(rho, tensor_product(polarization_projector(s[0]), polarization_projector(s[1]))));
        std::mt19937_64 gen(mix_seed(mix_seed(seed, kTomographyStream), k));
        out.push_back({s, draw_poisson(gen, cfg.pairs_per_setting * p)});
    }
    return out;
}

} // namespace wmchsh
