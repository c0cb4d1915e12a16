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
 * @file analysis.hpp
 * Estimation pipeline from coincidence counts: accidental subtraction,
 * Gaussian centroid fits, the centroid-weighted weak-valued probability
 * estimator, error bars and linear-inversion tomography.
 *
 * For a condition with Alice strong outcome x and Bob outcome b the estimator
 * is
 *   Pr^w[z = +1, x, b] = sum_r (r_V - r) C(r, x, b) / (delta_r C_T)
 *   Pr^w[z = -1, x, b] = sum_r (r - r_H) C(r, x, b) / (delta_r C_T)
 * with C_T the total over the four conditions of the same Bob setting.
 */

#include <optional>
#include <string>
#include <vector>

#include "wmchsh/experiment.hpp"
#include "wmchsh/weak_values.hpp"

namespace wmchsh {

struct CorrectedRecord {
    std::string condition;
    double slit_position = 0.0;
    int repeat = 0;
    /// coincidences - accidentals; may be negative.
    double signal = 0.0;
    /// coincidences + accidentals (Poisson variance of the difference).
    double variance = 0.0;
};

std::vector<CorrectedRecord> subtract_accidentals(const std::vector<CountRecord> &records);

/// Expected counts (no sampling noise, no accidentals) for a full scan.
std::vector<CorrectedRecord> noiseless_records(const SourceConfig &src, const ScanConfig &scan,
                                               const PointerConfig &pointer, WeakBasis basis);

struct FitOptions {
    /// Weight residuals by 1/variance instead of ordinary least squares.
    bool weighted = false;
    int max_iterations = 200;
    /// Convergence when every parameter step is below this (relative to
    /// max(1, |parameter|)).
    double step_tolerance = 1e-6;
};

struct CentroidFit {
    double center = 0.0;
    double width = 0.0;
    double amplitude = 0.0;
    /// Residual sum of squares (weighted when the fit is).
    double residual = 0.0;
    /// One standard deviation of `center` from the fit covariance.
    double uncertainty = 0.0;
    int iterations = 0;
};

/// Levenberg-Marquardt fit of amplitude * exp(-(r - center)^2 / (2 width^2)).
/// Starts from the signal-weighted mean and variance. Weighted fits use
/// 1/variance as weights. Unweighted fits use `variance`, when given, for the
/// sandwich covariance (J^T J)^-1 J^T diag(variance) J (J^T J)^-1, and the
/// residual scatter otherwise. Throws ValidationError on degenerate data and
/// NumericError if the iteration fails to converge.
CentroidFit fit_gaussian(const std::vector<double> &positions, const std::vector<double> &values,
                         const std::vector<double> &variance, const FitOptions &options = {});

struct CentroidPair {
    CentroidFit h;
    CentroidFit v;
};

/// Fits the repeat-averaged H and V characterization scans.
CentroidPair fit_centroids(const std::vector<CorrectedRecord> &records, const FitOptions &options = {});

struct TableEstimate {
    WeakBasis basis = WeakBasis::Z;
    WeakJointTable p_table = WeakJointTable::one_sided(BobSetting::P);
    WeakJointTable q_table = WeakJointTable::one_sided(BobSetting::Q);
    ChshOutcome chsh;
    /// C_T for the P and Q blocks.
    double total_p = 0.0;
    double total_q = 0.0;
};

/// Pools every record it is given. Throws ValidationError on a missing
/// condition and NumericError on a zero block total.
TableEstimate estimate_joint(const std::vector<CorrectedRecord> &records, double r_H, double r_V);

/// Standard errors in the same layout as an estimate.
struct Uncertainty {
    WeakJointTable p_table = WeakJointTable::one_sided(BobSetting::P);
    WeakJointTable q_table = WeakJointTable::one_sided(BobSetting::Q);
    double p_plus = 0.0;
    double p_minus = 0.0;
    double chsh = 0.0;
};

std::vector<TableEstimate> per_repeat_estimates(const std::vector<CorrectedRecord> &records, double r_H,
                                                double r_V);
/// Standard error of the mean across repeats. Needs at least two.
Uncertainty error_bars(const std::vector<TableEstimate> &per_repeat);
/// First-order propagation of Poisson count variances through the pooled estimator.
Uncertainty poisson_errors(const std::vector<CorrectedRecord> &records, double r_H, double r_V);
/// Propagation of the centroid fit uncertainties through the pooled estimator.
Uncertainty centroid_errors(const std::vector<CorrectedRecord> &records, const CentroidPair &centroids);
/// Quadrature sum of two uncertainty sets.
Uncertainty combine(const Uncertainty &a, const Uncertainty &b);

struct AnalysisResult {
    CentroidPair centroids;
    TableEstimate estimate;
    Uncertainty repeat_se;
    Uncertainty poisson_se;
    Uncertainty centroid_se;
    /// repeat_se and centroid_se in quadrature.
    Uncertainty total_se;
    int repeats = 0;
    std::vector<std::string> warnings;
};

AnalysisResult analyze_records(const std::vector<CountRecord> &records, const FitOptions &options = {});

// ---------------------------------------------------------------------------
// Tomography

/// Linear inversion over the Pauli basis. Frequencies are normalized by
/// n_HH + n_HV + n_VH + n_VV. With the overcomplete set the system is solved
/// in the least-squares sense and the result rescaled to unit trace.
DensityMatrix tomography_reconstruct(const std::vector<TomographyCount> &counts);

/// Outcome probabilities predicted by the transient matrices of `rho`.
/// Entries whose postselection has zero probability contribute 0.
ChshOutcome transient_outcome(const DensityMatrix &rho, const MeasurementFrame &frame);

struct TomographyResult {
    DensityMatrix rho = DensityMatrix::maximally_mixed(4);
    bool physical = true;
    double min_eigenvalue = 0.0;
    /// Empty when the reconstruction is not positive.
    std::optional<double> tangle;
    double fidelity = 0.0;
    ChshOutcome predicted;
    /// Parametric-bootstrap standard errors.
    double tangle_se = 0.0;
    double fidelity_se = 0.0;
    double p_plus_se = 0.0;
    double p_minus_se = 0.0;
    double chsh_se = 0.0;
    int bootstrap_samples = 0;
};

TomographyResult analyze_tomography(const std::vector<TomographyCount> &counts, const MeasurementFrame &frame,
                                    std::uint64_t seed, int bootstrap_samples = 200);

// ---------------------------------------------------------------------------
// Tangle sweep

struct SweepRow {
    double theta = 0.0;
    double tangle = 0.0;
    ChshOutcome estimate;
    Uncertainty error;
    ChshOutcome analytic;
};

/// One full simulate-and-analyze run per pump angle, seeded from `seed` and
/// the row index. The source template supplies phi, werner_v and pair_rate.
std::vector<SweepRow> sweep_tangle(const std::vector<double> &thetas, const SourceConfig &source,
                                   const ScanConfig &scan, const PointerConfig &pointer, WeakBasis basis,
                                   std::uint64_t seed, unsigned threads = 1);

} // namespace wmchsh
