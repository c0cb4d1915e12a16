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

#include "wmchsh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wmchsh/error.hpp"

namespace wmchsh {

namespace {

void require_supported_dim(std::size_t dim) {
    if (dim != 2 && dim != 4) {
        throw ValidationError("matrix dimension must be 2 or 4, got " + std::to_string(dim));
    }
}

void require_same_dim(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
    }
}

double off_diagonal_norm(const ComplexMatrix &m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) {
            if (i != j) {
                acc += std::norm(m(i, j));
            }
        }
    }
    return std::sqrt(acc);
}

} // namespace

void require_outcome(int outcome) {
    if (outcome != 1 && outcome != -1) {
        throw ValidationError("outcome must be +1 or -1, got " + std::to_string(outcome));
    }
}

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    require_supported_dim(dim);
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<Complex> row_major)
    : ComplexMatrix(dim) {
    if (row_major.size() != dim * dim) {
        throw ValidationError("expected " + std::to_string(dim * dim) + " entries, got " +
                              std::to_string(row_major.size()));
    }
    std::copy(row_major.begin(), row_major.end(), data_.begin());
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            out(j, i) = std::conj((*this)(i, j));
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix out = *this;
    for (auto &v : out.data_) {
        v = std::conj(v);
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        acc += (*this)(i, i);
    }
    return acc;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto &v : data_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double ComplexMatrix::frobenius_norm() const {
    double acc = 0.0;
    for (const auto &v : data_) {
        acc += std::norm(v);
    }
    return std::sqrt(acc);
}

bool ComplexMatrix::is_hermitian(double tol) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) {
                return false;
            }
        }
    }
    return true;
}

ComplexMatrix ComplexMatrix::hermitian_part() const {
    ComplexMatrix out = *this + adjoint();
    out *= 0.5;
    return out;
}

ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &rhs) {
    require_same_dim(*this, rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += rhs.data_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &rhs) {
    require_same_dim(*this, rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= rhs.data_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator*=(Complex scale) {
    for (auto &v : data_) {
        v *= scale;
    }
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix &lhs, const ComplexMatrix &rhs) {
    require_same_dim(lhs, rhs);
    const std::size_t n = lhs.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex a = lhs(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += a * rhs(k, j);
            }
        }
    }
    return out;
}

double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    return (a - b).max_abs();
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    require_supported_dim(amplitudes_.size());
    double norm2 = 0.0;
    for (const auto &a : amplitudes_) {
        norm2 += std::norm(a);
    }
    if (std::abs(norm2 - 1.0) > kAnalyticTol) {
        throw ValidationError("state is not normalized (squared norm " + std::to_string(norm2) +
                              ")");
    }
}

PureState PureState::normalized(std::vector<Complex> amplitudes) {
    double norm2 = 0.0;
    for (const auto &a : amplitudes) {
        norm2 += std::norm(a);
    }
    if (norm2 <= 0.0) {
        throw ValidationError("cannot normalize the zero vector");
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto &a : amplitudes) {
        a *= scale;
    }
    return PureState(std::move(amplitudes));
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw ValidationError("basis index out of range");
    }
    std::vector<Complex> amps(dim);
    amps[index] = 1.0;
    return PureState(std::move(amps));
}

Complex PureState::inner(const PureState &other) const {
    if (dim() != other.dim()) {
        throw ValidationError("dimension mismatch in inner product");
    }
    Complex acc = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        acc += std::conj(amplitudes_[i]) * other.amplitudes_[i];
    }
    return acc;
}

ComplexMatrix PureState::projector() const {
    ComplexMatrix m(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        for (std::size_t j = 0; j < dim(); ++j) {
            m(i, j) = amplitudes_[i] * std::conj(amplitudes_[j]);
        }
    }
    return m;
}

PureState PureState::apply(const ComplexMatrix &op) const {
    if (op.dim() != dim()) {
        throw ValidationError("dimension mismatch applying operator");
    }
    std::vector<Complex> out(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        for (std::size_t j = 0; j < dim(); ++j) {
            out[i] += op(i, j) * amplitudes_[j];
        }
    }
    return PureState::normalized(std::move(out));
}

ComplexMatrix tensor_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw ValidationError("tensor_product requires two single-qubit operands");
    }
    ComplexMatrix out(4);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                for (std::size_t l = 0; l < 2; ++l) {
                    out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

PureState tensor_product(const PureState &a, const PureState &b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw ValidationError("tensor_product requires two single-qubit operands");
    }
    std::vector<Complex> amps(4);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < 2; ++k) {
            amps[2 * i + k] = a[i] * b[k];
        }
    }
    return PureState::normalized(std::move(amps));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(const ComplexMatrix &m, double tol) {
    require_supported_dim(m.dim());
    if (!m.is_hermitian(tol)) {
        throw ValidationError("density matrix is not Hermitian");
    }
    const Complex tr = m.trace();
    if (std::abs(tr - 1.0) > tol) {
        throw ValidationError("density matrix trace is " + std::to_string(tr.real()) +
                              ", expected 1");
    }
    matrix_ = m.hermitian_part();
}

DensityMatrix DensityMatrix::from_pure(const PureState &psi) {
    return DensityMatrix(psi.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    ComplexMatrix m = ComplexMatrix::identity(dim);
    m *= 1.0 / static_cast<double>(dim);
    return DensityMatrix(m);
}

double DensityMatrix::min_eigenvalue() const { return hermitian_eigenvalues(matrix_).front(); }

bool DensityMatrix::is_physical(double tol) const { return min_eigenvalue() >= -tol; }

DensityMatrix DensityMatrix::mix(const DensityMatrix &other, double weight) const {
    return DensityMatrix(weight * matrix_ + (1.0 - weight) * other.matrix_);
}

// ---------------------------------------------------------------------------
// Observable

Observable::Observable(const ComplexMatrix &m) : matrix_(m) {
    if (m.dim() != 2) {
        throw ValidationError("observables are single-qubit (dim 2)");
    }
    if (!m.is_hermitian(kAnalyticTol)) {
        throw ValidationError("observable is not Hermitian");
    }
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
    if (radius < kAnalyticTol) {
        throw ValidationError("observable is degenerate");
    }
    eigenvalues_ = {mean + radius, mean - radius};
    const auto id = ComplexMatrix::identity(2);
    // Pi_+ = (O - l_- I)/(l_+ - l_-), Pi_- = (l_+ I - O)/(l_+ - l_-)
    projectors_[0] = (m - eigenvalues_[1] * id) * (1.0 / (2.0 * radius));
    projectors_[1] = (eigenvalues_[0] * id - m) * (1.0 / (2.0 * radius));
}

double Observable::eigenvalue(int outcome) const {
    require_outcome(outcome);
    return eigenvalues_[outcome == 1 ? 0 : 1];
}

const ComplexMatrix &Observable::projector(int outcome) const {
    require_outcome(outcome);
    return projectors_[outcome == 1 ? 0 : 1];
}

Observable Observable::conjugated_by(const ComplexMatrix &unitary) const {
    return Observable((unitary.adjoint() * matrix_ * unitary).hermitian_part());
}

// ---------------------------------------------------------------------------
// Spectra

HermitianEigen hermitian_eigen(const ComplexMatrix &m) {
    if (!m.is_hermitian(kReconstructionTol)) {
        throw ValidationError("hermitian_eigen: input is not Hermitian");
    }
    const std::size_t n = m.dim();
    ComplexMatrix a = m.hermitian_part();
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = std::max(1.0, a.frobenius_norm());
    constexpr int kMaxSweeps = 64;

    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) > 1e-14 * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag < 1e-300) {
                    continue;
                }
                // Phase the (p,q) element real, then apply a real Jacobi rotation.
                const Complex phase = std::conj(a(p, q)) / mag;
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = t * c;

                ComplexMatrix u = ComplexMatrix::identity(n);
                u(p, p) = c;
                u(p, q) = s;
                u(q, p) = -s * phase;
                u(q, q) = c * phase;

                a = (u.adjoint() * a * u).hermitian_part();
                v = v * u;
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    HermitianEigen out{std::vector<double>(n), ComplexMatrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix &m) {
    return hermitian_eigen(m).values;
}

double expectation(const DensityMatrix &rho, const ComplexMatrix &obs) {
    if (obs.dim() != rho.dim()) {
        throw ValidationError("expectation: dimension mismatch");
    }
    if (!obs.is_hermitian(kAnalyticTol)) {
        throw ValidationError("expectation: observable is not Hermitian");
    }
    const Complex value = (obs * rho.matrix()).trace();
    return value.real();
}

double concurrence(const DensityMatrix &rho) {
    if (rho.dim() != 4) {
        throw ValidationError("concurrence requires a two-qubit state");
    }
    const HermitianEigen eig = hermitian_eigen(rho.matrix());
    if (eig.values.front() < -kReconstructionTol) {
        throw ValidationError("concurrence requires a physical (positive) state");
    }

    std::vector<double> roots(eig.values.size());
    std::transform(eig.values.begin(), eig.values.end(), roots.begin(),
                   [](double lambda) { return std::sqrt(std::max(lambda, 0.0)); });
    const ComplexMatrix sqrt_rho =
        eig.vectors * ComplexMatrix::diagonal(roots) * eig.vectors.adjoint();

    const ComplexMatrix yy = tensor_product(pauli::y(), pauli::y());
    const ComplexMatrix flipped = yy * rho.matrix().conjugate() * yy;
    const ComplexMatrix r = (sqrt_rho * flipped * sqrt_rho).hermitian_part();

    // rank(R) <= rank(rho); anything past that is rounding noise.
    const auto rank = static_cast<std::size_t>(std::count_if(
        eig.values.begin(), eig.values.end(), [](double lambda) { return lambda > 1e-13; }));
    std::vector<double> lambdas = hermitian_eigenvalues(r);
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        lambdas[i] = i < rank ? std::sqrt(std::max(lambdas[i], 0.0)) : 0.0;
    }
    return std::max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]);
}

double tangle(const DensityMatrix &rho) {
    const double c = concurrence(rho);
    return c * c;
}

double fidelity(const DensityMatrix &rho, const PureState &target) {
    if (target.dim() != rho.dim()) {
        throw ValidationError("fidelity: dimension mismatch");
    }
    const auto &m = rho.matrix();
    Complex acc = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) {
            acc += std::conj(target[i]) * m(i, j) * target[j];
        }
    }
    return acc.real();
}

// ---------------------------------------------------------------------------
// Fixed operators and states

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix y() { return ComplexMatrix(2, {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0}); }
ComplexMatrix z() { return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}); }
} // namespace pauli

ComplexMatrix half_wave_plate(double angle_deg) {
    const double two_theta = 2.0 * angle_deg * M_PI / 180.0;
    const double c = std::cos(two_theta);
    const double s = std::sin(two_theta);
    return ComplexMatrix(2, {c, s, s, -c});
}

PureState singlet() {
    const double h = 1.0 / std::sqrt(2.0);
    return PureState({0.0, h, -h, 0.0});
}

DensityMatrix werner(double visibility) {
    if (visibility < 0.0 || visibility > 1.0) {
        throw ValidationError("werner visibility must lie in [0, 1]");
    }
    return DensityMatrix::from_pure(singlet()).mix(DensityMatrix::maximally_mixed(4), visibility);
}

PureState compensated_pair(double theta_deg, double phi_rad) {
    const double theta = theta_deg * M_PI / 180.0;
    const Complex phase = std::polar(1.0, phi_rad);
    return PureState::normalized({0.0, std::sin(theta), -phase * std::cos(theta), 0.0});
}

} // namespace wmchsh
