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

#include "wmchsh/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "wmchsh/error.hpp"
#include "wmchsh/transient.hpp"

namespace wmchsh {

std::vector<CorrectedRecord> subtract_accidentals(const std::vector<CountRecord> &records) {
    std::vector<CorrectedRecord> out;
    out.reserve(records.size());
    for (const auto &r : records) {
        if (r.coincidences < 0 || r.accidentals < 0) {
            throw ValidationError("negative count in record for condition " + r.condition);
        }
        out.push_back({r.condition, r.slit_position, r.repeat,
                       static_cast<double>(r.coincidences) - static_cast<double>(r.accidentals),
                       static_cast<double>(r.coincidences) + static_cast<double>(r.accidentals)});
    }
    return out;
}

std::vector<CorrectedRecord> noiseless_records(const SourceConfig &src, const ScanConfig &scan,
                                               const PointerConfig &pointer, WeakBasis basis) {
    const auto conditions = measurement_conditions(basis);
    const auto densities = condition_densities(delivered_state(src), pointer, basis);
    std::vector<CorrectedRecord> out;
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        for (double pos : scan.positions()) {
            const double mean = src.pair_rate * scan.dwell * slit_probability(densities[c], pos, scan.slit_width);
            out.push_back({conditions[c].name(), pos, 0, mean, mean});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian fit

CentroidFit fit_gaussian(const std::vector<double> &positions, const std::vector<double> &values,
                         const std::vector<double> &variance, const FitOptions &options) {
    const std::size_t n = positions.size();
    if (values.size() != n || (options.weighted && variance.size() != n)) {
        throw ValidationError("fit_gaussian: input lengths differ");
    }
    std::set<double> distinct;
    double mass = 0.0;
    double first = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i] > 0.0) {
            distinct.insert(positions[i]);
            mass += values[i];
            first += values[i] * positions[i];
        }
    }
    if (distinct.size() < 5) {
        throw ValidationError("fit_gaussian: need at least 5 distinct positions with nonzero counts");
    }
    const double mean = first / mass;
    double second = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i] > 0.0) {
            second += values[i] * (positions[i] - mean) * (positions[i] - mean);
        }
        peak = std::max(peak, values[i]);
    }

    Eigen::VectorXd weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    if (options.weighted) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!(variance[i] > 0.0)) {
                throw ValidationError("fit_gaussian: weighted fit needs positive variances");
            }
            weights[static_cast<Eigen::Index>(i)] = 1.0 / variance[i];
        }
    }

    Eigen::Vector3d p(peak, mean, std::sqrt(second / mass));
    auto evaluate = [&](const Eigen::Vector3d &q, Eigen::MatrixXd *jac, Eigen::VectorXd &resid) {
        resid.resize(static_cast<Eigen::Index>(n));
        if (jac != nullptr) {
            jac->resize(static_cast<Eigen::Index>(n), 3);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            const double d = positions[i] - q[1];
            const double e = std::exp(-d * d / (2.0 * q[2] * q[2]));
            resid[k] = values[i] - q[0] * e;
            if (jac != nullptr) {
                (*jac)(k, 0) = e;
                (*jac)(k, 1) = q[0] * e * d / (q[2] * q[2]);
                (*jac)(k, 2) = q[0] * e * d * d / (q[2] * q[2] * q[2]);
            }
        }
        return resid.dot(weights.asDiagonal() * resid);
    };

    Eigen::MatrixXd jac;
    Eigen::VectorXd resid;
    double cost = evaluate(p, &jac, resid);
    double lambda = 1e-3;
    int iter = 0;
    bool converged = false;
    for (; iter < options.max_iterations && !converged; ++iter) {
        const Eigen::Matrix3d h = jac.transpose() * weights.asDiagonal() * jac;
        const Eigen::Vector3d g = jac.transpose() * weights.asDiagonal() * resid;
        for (;;) {
            Eigen::Matrix3d damped = h;
            damped.diagonal() *= 1.0 + lambda;
            const Eigen::Vector3d step = damped.ldlt().solve(g);
            const Eigen::Vector3d trial = p + step;
            Eigen::VectorXd trial_resid;
            const double trial_cost = trial[2] > 0.0 ? evaluate(trial, nullptr, trial_resid)
                                                     : std::numeric_limits<double>::infinity();
            double rel_step = 0.0;
            for (int k = 0; k < 3; ++k) {
                rel_step = std::max(rel_step, std::abs(step[k]) / std::max(1.0, std::abs(p[k])));
            }
            if (trial_cost <= cost) {
                p = trial;
                cost = evaluate(p, &jac, resid);
                lambda = std::max(lambda / 10.0, 1e-12);
                converged = rel_step < options.step_tolerance;
                break;
            }
            lambda *= 10.0;
            if (rel_step < options.step_tolerance || lambda > 1e12) {
                // No downhill step left at this resolution: at the minimum.
                converged = true;
                break;
            }
        }
    }
    if (!converged) {
        throw NumericError("fit_gaussian: no convergence within the iteration limit");
    }

    const Eigen::Matrix3d h = jac.transpose() * weights.asDiagonal() * jac;
    Eigen::Matrix3d cov = h.inverse();
    if (!options.weighted && variance.size() == n) {
        Eigen::Matrix3d meat = Eigen::Matrix3d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::Vector3d row = jac.row(static_cast<Eigen::Index>(i)).transpose();
            meat += std::max(variance[i], 0.0) * row * row.transpose();
        }
        cov = cov * meat * cov;
    } else if (!options.weighted) {
        const double dof = static_cast<double>(n) - 3.0;
        cov *= dof > 0.0 ? cost / dof : 0.0;
    }
    if (!cov.allFinite()) {
        throw NumericError("fit_gaussian: singular fit covariance");
    }
    CentroidFit out;
    out.amplitude = p[0];
    out.center = p[1];
    out.width = std::abs(p[2]);
    out.residual = cost;
    out.uncertainty = std::sqrt(std::max(cov(1, 1), 0.0));
    out.iterations = iter;
    return out;
}

namespace {

CentroidFit fit_condition(const std::vector<CorrectedRecord> &records, const std::string &name,
                          const FitOptions &options) {
    std::map<double, std::pair<double, double>> by_position;
    std::set<int> repeats;
    for (const auto &r : records) {
        if (r.condition == name) {
            auto &slot = by_position[r.slit_position];
            slot.first += r.signal;
            slot.second += r.variance;
            repeats.insert(r.repeat);
        }
    }
    if (by_position.empty()) {
        throw ValidationError("missing characterization condition " + name);
    }
    const auto n_rep = static_cast<double>(repeats.size());
    std::vector<double> pos;
    std::vector<double> mean;
    std::vector<double> var;
    for (const auto &[x, s] : by_position) {
        pos.push_back(x);
        mean.push_back(s.first / n_rep);
        var.push_back(s.second / (n_rep * n_rep));
    }
    return fit_gaussian(pos, mean, var, options);
}

} // namespace

CentroidPair fit_centroids(const std::vector<CorrectedRecord> &records, const FitOptions &options) {
    return {fit_condition(records, "H", options), fit_condition(records, "V", options)};
}

// ---------------------------------------------------------------------------
// Estimator

namespace {

struct Cell {
    Condition condition;
    double r = 0.0;
    double signal = 0.0;
    double variance = 0.0;
};

/// CHSH cells of a record set with the weak basis they were taken in.
struct ChshCells {
    WeakBasis basis = WeakBasis::Z;
    std::vector<Cell> cells;
};

ChshCells chsh_cells(const std::vector<CorrectedRecord> &records) {
    ChshCells out;
    std::set<std::string> seen;
    std::optional<WeakBasis> basis;
    std::map<std::string, Condition> parsed;
    for (const auto &r : records) {
        auto it = parsed.find(r.condition);
        if (it == parsed.end()) {
            it = parsed.emplace(r.condition, parse_condition(r.condition)).first;
        }
        const Condition &c = it->second;
        if (c.kind != ConditionKind::Chsh) {
            continue;
        }
        if (basis && *basis != c.weak_basis) {
            throw ValidationError("records mix weak-basis variants");
        }
        basis = c.weak_basis;
        seen.insert(r.condition);
        out.cells.push_back({c, r.slit_position, r.signal, r.variance});
    }
    out.basis = basis.value_or(WeakBasis::Z);
    for (const auto &c : measurement_conditions(out.basis)) {
        if (c.kind == ConditionKind::Chsh && seen.count(c.name()) == 0) {
            throw ValidationError("missing measurement condition " + c.name());
        }
    }
    return out;
}

/// CHSH labels (x, z) for a cell whose pointer read weak outcome `w`.
std::pair<int, int> labels(const Condition &c, int w) {
    return c.weak_basis == WeakBasis::Z ? std::pair{c.strong, w} : std::pair{w, c.strong};
}

/// Weight of table entry (setting, x, z, b) in a linear functional of the tables.
using EntryWeight = std::function<double(BobSetting, int, int, int)>;

struct Functional {
    double value = 0.0;
    double poisson_variance = 0.0;
};

/// Q = sum_B sum_{i in B} G_i C_i / T_B and its first-order Poisson variance.
Functional evaluate_functional(const ChshCells &data, double r_H, double r_V, const EntryWeight &weight) {
    const double dr = r_V - r_H;
    Functional out;
    for (BobSetting block : {BobSetting::P, BobSetting::Q}) {
        double total = 0.0;
        double numerator = 0.0;
        std::vector<std::pair<double, double>> g_and_var;
        for (const auto &cell : data.cells) {
            if (cell.condition.setting != block) {
                continue;
            }
            double g = 0.0;
            for (int w : kOutcomes) {
                const auto [x, z] = labels(cell.condition, w);
                const double lever = w == 1 ? r_V - cell.r : cell.r - r_H;
                g += weight(block, x, z, cell.condition.bob) * lever / dr;
            }
            total += cell.signal;
            numerator += g * cell.signal;
            g_and_var.emplace_back(g, cell.variance);
        }
        if (!(std::abs(total) > 0.0)) {
            throw NumericError("zero total counts for Bob setting " + to_string(block));
        }
        const double q_block = numerator / total;
        out.value += q_block;
        for (const auto &[g, var] : g_and_var) {
            const double d = (g - q_block) / total;
            out.poisson_variance += d * d * var;
        }
    }
    return out;
}

bool counts_plus(BobSetting s, int x, int z, int b) { return (s == BobSetting::P ? x == z : x != z) && x * b > 0; }
bool counts_minus(BobSetting s, int x, int z, int b) { return (s == BobSetting::P ? x == z : x != z) && x * b < 0; }

double weight_plus(BobSetting s, int x, int z, int b) { return counts_plus(s, x, z, b) ? 1.0 : 0.0; }
double weight_minus(BobSetting s, int x, int z, int b) { return counts_minus(s, x, z, b) ? 1.0 : 0.0; }
double weight_chsh(BobSetting s, int x, int z, int b) {
    return 2.0 * (weight_plus(s, x, z, b) - weight_minus(s, x, z, b));
}

EntryWeight entry_indicator(BobSetting setting, int x, int z, int b) {
    return [=](BobSetting s, int xx, int zz, int bb) {
        return s == setting && xx == x && zz == z && bb == b ? 1.0 : 0.0;
    };
}

TableEstimate estimate_from_cells(const ChshCells &data, double r_H, double r_V) {
    if (!(r_V > r_H)) {
        throw NumericError("centroids must satisfy r_V > r_H");
    }
    const double dr = r_V - r_H;
    TableEstimate out;
    out.basis = data.basis;
    std::map<std::tuple<int, int, int, int>, double> acc;
    for (const auto &cell : data.cells) {
        const int block = cell.condition.setting == BobSetting::P ? 0 : 1;
        (block == 0 ? out.total_p : out.total_q) += cell.signal;
        for (int w : kOutcomes) {
            const auto [x, z] = labels(cell.condition, w);
            const double lever = w == 1 ? r_V - cell.r : cell.r - r_H;
            acc[{block, x, z, cell.condition.bob}] += lever * cell.signal;
        }
    }
    if (!(std::abs(out.total_p) > 0.0) || !(std::abs(out.total_q) > 0.0)) {
        throw NumericError("zero total counts for a Bob setting");
    }
    for (const auto &[key, sum] : acc) {
        const auto [block, x, z, b] = key;
        if (block == 0) {
            out.p_table.set(x, z, b, sum / (dr * out.total_p));
        } else {
            out.q_table.set(x, z, b, sum / (dr * out.total_q));
        }
    }
    out.chsh = chsh_outcome_probs(out.p_table, out.q_table);
    return out;
}

double sample_se(const std::vector<double> &v) {
    const auto n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) {
        mean += x;
    }
    mean /= n;
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / (n - 1.0) / n);
}

template <typename F> void for_each_entry(F &&f) {
    for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
        for (int x : kOutcomes) {
            for (int z : kOutcomes) {
                for (int b : kOutcomes) {
                    f(s, x, z, b);
                }
            }
        }
    }
}

WeakJointTable &table_for(Uncertainty &u, BobSetting s) { return s == BobSetting::P ? u.p_table : u.q_table; }
const WeakJointTable &table_for(const TableEstimate &e, BobSetting s) {
    return s == BobSetting::P ? e.p_table : e.q_table;
}

} // namespace

TableEstimate estimate_joint(const std::vector<CorrectedRecord> &records, double r_H, double r_V) {
    return estimate_from_cells(chsh_cells(records), r_H, r_V);
}

std::vector<TableEstimate> per_repeat_estimates(const std::vector<CorrectedRecord> &records, double r_H,
                                                double r_V) {
    std::map<int, std::vector<CorrectedRecord>> by_repeat;
    for (const auto &r : records) {
        by_repeat[r.repeat].push_back(r);
    }
    std::vector<TableEstimate> out;
    for (const auto &[rep, subset] : by_repeat) {
        out.push_back(estimate_joint(subset, r_H, r_V));
    }
    return out;
}

Uncertainty error_bars(const std::vector<TableEstimate> &per_repeat) {
    if (per_repeat.size() < 2) {
        throw ValidationError("error_bars needs at least two repeats");
    }
    Uncertainty out;
    auto collect = [&](auto getter) {
        std::vector<double> v;
        v.reserve(per_repeat.size());
        for (const auto &e : per_repeat) {
            v.push_back(getter(e));
        }
        return sample_se(v);
    };
    for_each_entry([&](BobSetting s, int x, int z, int b) {
        table_for(out, s).set(x, z, b, collect([&](const TableEstimate &e) { return table_for(e, s).value(x, z, b); }));
    });
    out.p_plus = collect([](const TableEstimate &e) { return e.chsh.p_plus; });
    out.p_minus = collect([](const TableEstimate &e) { return e.chsh.p_minus; });
    out.chsh = collect([](const TableEstimate &e) { return e.chsh.chsh_value; });
    return out;
}

Uncertainty poisson_errors(const std::vector<CorrectedRecord> &records, double r_H, double r_V) {
    const ChshCells data = chsh_cells(records);
    Uncertainty out;
    for_each_entry([&](BobSetting s, int x, int z, int b) {
        table_for(out, s).set(
            x, z, b, std::sqrt(evaluate_functional(data, r_H, r_V, entry_indicator(s, x, z, b)).poisson_variance));
    });
    out.p_plus = std::sqrt(evaluate_functional(data, r_H, r_V, weight_plus).poisson_variance);
    out.p_minus = std::sqrt(evaluate_functional(data, r_H, r_V, weight_minus).poisson_variance);
    out.chsh = std::sqrt(evaluate_functional(data, r_H, r_V, weight_chsh).poisson_variance);
    return out;
}

Uncertainty centroid_errors(const std::vector<CorrectedRecord> &records, const CentroidPair &centroids) {
    const ChshCells data = chsh_cells(records);
    const double rh = centroids.h.center;
    const double rv = centroids.v.center;
    constexpr double kStep = 1e-3;
    const TableEstimate h_hi = estimate_from_cells(data, rh + kStep, rv);
    const TableEstimate h_lo = estimate_from_cells(data, rh - kStep, rv);
    const TableEstimate v_hi = estimate_from_cells(data, rh, rv + kStep);
    const TableEstimate v_lo = estimate_from_cells(data, rh, rv - kStep);
    auto propagate = [&](auto getter) {
        const double dh = (getter(h_hi) - getter(h_lo)) / (2.0 * kStep);
        const double dv = (getter(v_hi) - getter(v_lo)) / (2.0 * kStep);
        return std::hypot(dh * centroids.h.uncertainty, dv * centroids.v.uncertainty);
    };
    Uncertainty out;
    for_each_entry([&](BobSetting s, int x, int z, int b) {
        table_for(out, s).set(x, z, b, propagate([&](const TableEstimate &e) { return table_for(e, s).value(x, z, b); }));
    });
    out.p_plus = propagate([](const TableEstimate &e) { return e.chsh.p_plus; });
    out.p_minus = propagate([](const TableEstimate &e) { return e.chsh.p_minus; });
    out.chsh = propagate([](const TableEstimate &e) { return e.chsh.chsh_value; });
    return out;
}

Uncertainty combine(const Uncertainty &a, const Uncertainty &b) {
    Uncertainty out;
    for_each_entry([&](BobSetting s, int x, int z, int bb) {
        const auto &ta = s == BobSetting::P ? a.p_table : a.q_table;
        const auto &tb = s == BobSetting::P ? b.p_table : b.q_table;
        table_for(out, s).set(x, z, bb, std::hypot(ta.value(x, z, bb), tb.value(x, z, bb)));
    });
    out.p_plus = std::hypot(a.p_plus, b.p_plus);
    out.p_minus = std::hypot(a.p_minus, b.p_minus);
    out.chsh = std::hypot(a.chsh, b.chsh);
    return out;
}

AnalysisResult analyze_records(const std::vector<CountRecord> &records, const FitOptions &options) {
    const auto corrected = subtract_accidentals(records);
    AnalysisResult out;
    out.centroids = fit_centroids(corrected, options);
    const double rh = out.centroids.h.center;
    const double rv = out.centroids.v.center;
    out.estimate = estimate_joint(corrected, rh, rv);
    out.poisson_se = poisson_errors(corrected, rh, rv);
    out.centroid_se = centroid_errors(corrected, out.centroids);

    const auto repeats = per_repeat_estimates(corrected, rh, rv);
    out.repeats = static_cast<int>(repeats.size());
    if (repeats.size() >= 2) {
        out.repeat_se = error_bars(repeats);
        out.total_se = combine(out.repeat_se, out.centroid_se);
    } else {
        out.warnings.emplace_back("single repeat: repeat-spread errors unavailable, using Poisson propagation");
        out.total_se = combine(out.poisson_se, out.centroid_se);
    }
    for (const auto &[label, value] : {std::pair{"p_plus", out.estimate.chsh.p_plus},
                                       std::pair{"p_minus", out.estimate.chsh.p_minus}}) {
        if (value < 0.0 || value > 1.0) {
            std::ostringstream msg;
            msg << label << " = " << value << " lies outside [0, 1]";
            out.warnings.push_back(msg.str());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tomography

namespace {

/// (Tr P, Tr P X, Tr P Y, Tr P Z)
std::array<double, 4> bloch(const ComplexMatrix &p) {
    return {p.trace().real(), (p * pauli::x()).trace().real(), (p * pauli::y()).trace().real(),
            (p * pauli::z()).trace().real()};
}

const std::array<ComplexMatrix, 4> &pauli_basis() {
    static const std::array<ComplexMatrix, 4> basis{pauli::identity(), pauli::x(), pauli::y(), pauli::z()};
    return basis;
}

} // namespace

DensityMatrix tomography_reconstruct(const std::vector<TomographyCount> &counts) {
    std::map<std::string, double> by_setting;
    for (const auto &c : counts) {
        if (!by_setting.emplace(c.setting, static_cast<double>(c.counts)).second) {
            throw ValidationError("duplicate tomography setting " + c.setting);
        }
    }
    const bool overcomplete = by_setting.size() == 36;
    const auto settings = tomography_settings(overcomplete);
    if (by_setting.size() != settings.size()) {
        throw ValidationError("tomography needs all 16 (or 36) settings");
    }
    for (const auto &s : settings) {
        if (by_setting.count(s) == 0) {
            throw ValidationError("missing tomography setting " + s);
        }
    }
    const double norm = by_setting["HH"] + by_setting["HV"] + by_setting["VH"] + by_setting["VV"];
    if (!(norm > 0.0)) {
        throw NumericError("tomography: zero counts in the H/V basis");
    }

    const auto m = static_cast<Eigen::Index>(settings.size());
    Eigen::MatrixXd design(m, 16);
    Eigen::VectorXd freq(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto &s = settings[static_cast<std::size_t>(k)];
        const auto a = bloch(polarization_projector(s[0]));
        const auto b = bloch(polarization_projector(s[1]));
        for (int mu = 0; mu < 4; ++mu) {
            for (int nu = 0; nu < 4; ++nu) {
                design(k, 4 * mu + nu) = a[mu] * b[nu] / 4.0;
            }
        }
        freq[k] = by_setting[s] / norm;
    }
    const Eigen::VectorXd coeff = design.colPivHouseholderQr().solve(freq);

    ComplexMatrix rho(4);
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            rho += tensor_product(pauli_basis()[mu], pauli_basis()[nu]) * (coeff[4 * mu + nu] / 4.0);
        }
    }
    const double tr = rho.trace().real();
    if (!(tr > 0.0)) {
        throw NumericError("tomography: reconstruction has non-positive trace");
    }
    rho *= 1.0 / tr;
    return DensityMatrix(rho.hermitian_part(), kReconstructionTol);
}

ChshOutcome transient_outcome(const DensityMatrix &rho, const MeasurementFrame &frame) {
    WeakJointTable table = predict_joint_from_transient(rho, frame);
    for (const auto &e : std::vector(table.entries())) {
        if (!e.value) {
            table.set(e.x, e.z, e.p, e.q, 0.0);
        }
    }
    return chsh_outcome_probs(table);
}

TomographyResult analyze_tomography(const std::vector<TomographyCount> &counts, const MeasurementFrame &frame,
                                    std::uint64_t seed, int bootstrap_samples) {
    TomographyResult out;
    out.rho = tomography_reconstruct(counts);
    out.min_eigenvalue = out.rho.min_eigenvalue();
    out.physical = out.rho.is_physical();
    if (out.physical) {
        out.tangle = tangle(out.rho);
    }
    out.fidelity = fidelity(out.rho, singlet());
    out.predicted = transient_outcome(out.rho, frame);

    std::vector<double> tangles;
    std::vector<double> fids;
    std::vector<double> pp;
    std::vector<double> pm;
    std::vector<double> ch;
    std::mt19937_64 gen(mix_seed(seed, 0x626f6f7473747270ULL));
    for (int b = 0; b < bootstrap_samples; ++b) {
        std::vector<TomographyCount> resampled = counts;
        for (auto &c : resampled) {
            const double mean = static_cast<double>(std::max<std::int64_t>(c.counts, 0));
            c.counts = mean > 0.0 ? std::poisson_distribution<std::int64_t>(mean)(gen) : 0;
        }
        try {
            const DensityMatrix rho = tomography_reconstruct(resampled);
            if (rho.is_physical()) {
                tangles.push_back(tangle(rho));
            }
            fids.push_back(fidelity(rho, singlet()));
            const ChshOutcome c = transient_outcome(rho, frame);
            pp.push_back(c.p_plus);
            pm.push_back(c.p_minus);
            ch.push_back(c.chsh_value);
        } catch (const NumericError &) {
            continue;
        }
    }
    auto spread = [](const std::vector<double> &v) {
        // Standard deviation of the replicates, not of their mean.
        return v.size() < 2 ? 0.0 : sample_se(v) * std::sqrt(static_cast<double>(v.size()));
    };
    out.bootstrap_samples = static_cast<int>(pp.size());
    out.tangle_se = spread(tangles);
    out.fidelity_se = spread(fids);
    out.p_plus_se = spread(pp);
    out.p_minus_se = spread(pm);
    out.chsh_se = spread(ch);
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<SweepRow> sweep_tangle(const std::vector<double> &thetas, const SourceConfig &source,
                                   const ScanConfig &scan, const PointerConfig &pointer, WeakBasis basis,
                                   std::uint64_t seed, unsigned threads) {
    const MeasurementFrame frame = basis == WeakBasis::Z ? MeasurementFrame::standard() : MeasurementFrame::weak_x();
    std::vector<SweepRow> out;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        SourceConfig src = source;
        src.theta = thetas[k];
        const DensityMatrix rho = delivered_state(src);
        const auto run = simulate_run(src, scan, pointer, basis, mix_seed(seed, k), threads);
        const AnalysisResult res = analyze_records(run.records);
        out.push_back({src.theta, tangle(rho), res.estimate.chsh, res.total_se, analytic_outcome(rho, frame)});
    }
    return out;
}

} // namespace wmchsh
