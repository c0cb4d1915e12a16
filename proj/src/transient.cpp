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

#include "wmchsh/transient.hpp"

#include <algorithm>
#include <cmath>

#include "wmchsh/error.hpp"

namespace wmchsh {

TransientMatrix transient_matrix(const DensityMatrix &rho, const ComplexMatrix &post) {
    if (post.dim() != rho.dim()) {
        throw ValidationError("transient_matrix: dimension mismatch");
    }
    if (!post.is_hermitian(kAnalyticTol) || hermitian_eigenvalues(post).front() < -kReconstructionTol) {
        throw ValidationError("transient_matrix: postselection must be positive semidefinite");
    }
    const ComplexMatrix f_rho = post * rho.matrix();
    const double selection = f_rho.trace().real();
    if (selection <= 1e-12) {
        throw NumericError("transient_matrix: postselection has zero probability");
    }
    ComplexMatrix r = f_rho + rho.matrix() * post;
    r *= 1.0 / (2.0 * selection);
    return TransientMatrix{r.hermitian_part(), rho, post, selection};
}

double negativity(const TransientMatrix &r) {
    double acc = 0.0;
    for (double lambda : hermitian_eigenvalues(r.matrix)) {
        if (lambda < -kNonRealisticThreshold) {
            acc -= lambda;
        }
    }
    return acc;
}

bool is_non_realistic(const TransientMatrix &r) {
    return hermitian_eigenvalues(r.matrix).front() < -kNonRealisticThreshold;
}

namespace {

const ComplexMatrix &alice_strong_projector(const MeasurementFrame &frame, int x, int z) {
    return frame.alice_weak_label == WeakBasis::Z ? frame.alice_strong.projector(x)
                                                  : frame.alice_strong.projector(z);
}

const ComplexMatrix &alice_weak_projector(const MeasurementFrame &frame, int x, int z) {
    return frame.alice_weak_label == WeakBasis::Z ? frame.alice_weak.projector(z)
                                                  : frame.alice_weak.projector(x);
}

std::optional<double> predicted_entry(const DensityMatrix &rho, const ComplexMatrix &post,
                                      const ComplexMatrix &weak_op) {
    const double selection = (post * rho.matrix()).trace().real();
    if (selection <= 1e-12) {
        return std::nullopt;
    }
    const TransientMatrix r = transient_matrix(rho, post);
    return (weak_op * r.matrix).trace().real() * r.selection_prob;
}

} // namespace

std::vector<TransientMatrix> transient_set(const DensityMatrix &rho, const MeasurementFrame &frame,
                                           BobSetting setting) {
    std::vector<TransientMatrix> out;
    for (int s : kOutcomes) {
        for (int b : kOutcomes) {
            out.push_back(transient_matrix(
                rho, tensor_product(frame.alice_strong.projector(s), frame.bob(setting).projector(b))));
        }
    }
    return out;
}

ComplexMatrix statistical_sum(const std::vector<TransientMatrix> &transients) {
    if (transients.empty()) {
        throw ValidationError("statistical_sum: no transients");
    }
    ComplexMatrix acc(transients.front().matrix.dim());
    for (const auto &r : transients) {
        acc += r.matrix * r.selection_prob;
    }
    return acc;
}

WeakJointTable predict_joint_from_transient(const DensityMatrix &rho,
                                            const MeasurementFrame &frame) {
    WeakJointTable table = WeakJointTable::two_sided();
    for (const auto &e : std::vector(table.entries())) {
        const ComplexMatrix post =
            tensor_product(alice_strong_projector(frame, e.x, e.z), frame.bob_strong.projector(e.p));
        const ComplexMatrix weak =
            tensor_product(alice_weak_projector(frame, e.x, e.z), frame.bob_weak.projector(e.q));
        table.set(e.x, e.z, e.p, e.q, predicted_entry(rho, post, weak));
    }
    return table;
}

WeakJointTable predict_one_sided_from_transient(const DensityMatrix &rho,
                                                const MeasurementFrame &frame,
                                                BobSetting setting) {
    WeakJointTable table = WeakJointTable::one_sided(setting);
    for (const auto &e : std::vector(table.entries())) {
        const ComplexMatrix post = tensor_product(alice_strong_projector(frame, e.x, e.z),
                                                  frame.bob(setting).projector(e.p));
        const ComplexMatrix weak =
            tensor_product(alice_weak_projector(frame, e.x, e.z), pauli::identity());
        table.set(e.x, e.z, e.p, predicted_entry(rho, post, weak));
    }
    return table;
}

ProductFactorization nearest_product(const ComplexMatrix &m) {
    if (m.dim() != 4) {
        throw ValidationError("nearest_product requires a two-qubit operator");
    }
    // Realigned[(i1 j1), (i2 j2)] = M[(i1 i2), (j1 j2)]
    ComplexMatrix realigned(4);
    for (std::size_t i1 = 0; i1 < 2; ++i1) {
        for (std::size_t j1 = 0; j1 < 2; ++j1) {
            for (std::size_t i2 = 0; i2 < 2; ++i2) {
                for (std::size_t j2 = 0; j2 < 2; ++j2) {
                    realigned(2 * i1 + j1, 2 * i2 + j2) = m(2 * i1 + i2, 2 * j1 + j2);
                }
            }
        }
    }
    const HermitianEigen eig = hermitian_eigen((realigned * realigned.adjoint()).hermitian_part());
    const std::size_t top = eig.values.size() - 1;
    double total = 0.0;
    for (double v : eig.values) {
        total += std::max(v, 0.0);
    }

    ComplexMatrix alice(2);
    ComplexMatrix bob(2);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            alice(i, j) = eig.vectors(2 * i + j, top);
        }
    }
    // B = conj(R^dagger u) reshaped.
    const ComplexMatrix adj = realigned.adjoint();
    for (std::size_t k = 0; k < 4; ++k) {
        Complex w = 0.0;
        for (std::size_t l = 0; l < 4; ++l) {
            w += adj(k, l) * eig.vectors(l, top);
        }
        bob(k / 2, k % 2) = std::conj(w);
    }
    const Complex tr = alice.trace();
    if (std::abs(tr) > 1e-12) {
        alice *= 1.0 / tr;
        bob *= tr;
    }
    const double captured = total > 0.0 ? std::max(eig.values[top], 0.0) / total : 1.0;
    return {alice, bob, std::sqrt(std::max(0.0, 1.0 - captured))};
}

} // namespace wmchsh
