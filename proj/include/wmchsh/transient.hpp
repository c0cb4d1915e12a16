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
 * @file transient.hpp
 * Transient density matrices R = (F rho + rho F) / (2 Tr[F rho]) assigned to a
 * preparation rho and a postselection element F. They are Hermitian with unit
 * trace but may have negative eigenvalues.
 */

#include <vector>

#include "wmchsh/linalg.hpp"
#include "wmchsh/weak_values.hpp"

namespace wmchsh {

/// Eigenvalues below -kNonRealisticThreshold mark a transient as non-positive.
inline constexpr double kNonRealisticThreshold = 1e-10;

struct TransientMatrix {
    ComplexMatrix matrix;
    DensityMatrix preparation;
    ComplexMatrix postselection;
    /// Tr[F rho]
    double selection_prob = 0.0;
};

/// Throws NumericError when Tr[F rho] <= 1e-12.
TransientMatrix transient_matrix(const DensityMatrix &rho, const ComplexMatrix &post);

/// Sum of |negative eigenvalues|, ignoring those above -1e-10.
double negativity(const TransientMatrix &r);
bool is_non_realistic(const TransientMatrix &r);

/// One transient per product strong outcome (x, b) for Bob's `setting`,
/// ordered as in the one-sided table.
std::vector<TransientMatrix> transient_set(const DensityMatrix &rho, const MeasurementFrame &frame,
                                           BobSetting setting);

/// sum_f Tr[F_f rho] R_f
ComplexMatrix statistical_sum(const std::vector<TransientMatrix> &transients);

/// entry(x,z,p,q) = Tr[(Pi_z x Pi_q) R_{x,p}] * Tr[F_{x,p} rho].
WeakJointTable predict_joint_from_transient(const DensityMatrix &rho,
                                            const MeasurementFrame &frame);
/// One-sided analogue using the (x, b) transients of `setting`.
WeakJointTable predict_one_sided_from_transient(const DensityMatrix &rho,
                                                const MeasurementFrame &frame, BobSetting setting);

/// Best Frobenius-norm approximation R ~ A x B via realignment. A is scaled to
/// unit trace when its trace is nonzero. Exploratory only: transients are not
/// guaranteed to factorize.
struct ProductFactorization {
    ComplexMatrix alice;
    ComplexMatrix bob;
    /// ||R - A x B||_F / ||R||_F
    double relative_residual = 0.0;
};
ProductFactorization nearest_product(const ComplexMatrix &two_qubit);

} // namespace wmchsh
