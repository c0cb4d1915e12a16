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
 * @file linalg.hpp
 * Dense complex linear algebra for one- and two-qubit polarization states.
 *
 * Matrices are stored row-major and are restricted to dimension 2 (one qubit)
 * or 4 (two qubits, Alice as the left tensor factor). Basis ordering follows
 * |H> = |0> (Z = +1), |V> = |1> (Z = -1).
 */

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace wmchsh {

using Complex = std::complex<double>;

/// Tolerance for quantities produced by exact (analytic) evaluation.
inline constexpr double kAnalyticTol = 1e-12;
/// Tolerance for reconstructed quantities (tomography, spectra).
inline constexpr double kReconstructionTol = 1e-10;

/// Two-valued measurement outcome labels used throughout.
inline constexpr std::array<int, 2> kOutcomes{+1, -1};

/// Throws ValidationError unless `outcome` is +1 or -1.
void require_outcome(int outcome);

class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    /// Zero matrix. `dim` must be 2 or 4.
    explicit ComplexMatrix(std::size_t dim);
    /// Row-major entries; the list length must be dim*dim.
    ComplexMatrix(std::size_t dim, std::initializer_list<Complex> row_major);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(std::span<const double> values);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::span<const Complex> data() const noexcept { return data_; }

    Complex &operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
    const Complex &operator()(std::size_t row, std::size_t col) const {
        return data_[row * dim_ + col];
    }

    [[nodiscard]] ComplexMatrix adjoint() const;
    [[nodiscard]] ComplexMatrix conjugate() const;
    [[nodiscard]] Complex trace() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] bool is_hermitian(double tol = kAnalyticTol) const;
    /// (M + M^dagger)/2; removes round-off anti-Hermitian residue.
    [[nodiscard]] ComplexMatrix hermitian_part() const;

    ComplexMatrix &operator+=(const ComplexMatrix &rhs);
    ComplexMatrix &operator-=(const ComplexMatrix &rhs);
    ComplexMatrix &operator*=(Complex scale);

    friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix &rhs) { return lhs += rhs; }
    friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix &rhs) { return lhs -= rhs; }
    friend ComplexMatrix operator*(ComplexMatrix lhs, Complex scale) { return lhs *= scale; }
    friend ComplexMatrix operator*(Complex scale, ComplexMatrix rhs) { return rhs *= scale; }
    friend ComplexMatrix operator*(const ComplexMatrix &lhs, const ComplexMatrix &rhs);

  private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// Largest entrywise modulus of a - b. Dimensions must agree.
double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b);

/// Normalized state vector of dimension 2 or 4.
class PureState {
  public:
    /// Amplitudes must already have unit norm within 1e-12.
    explicit PureState(std::vector<Complex> amplitudes);
    /// Rescales arbitrary nonzero amplitudes to unit norm.
    static PureState normalized(std::vector<Complex> amplitudes);
    static PureState basis(std::size_t dim, std::size_t index);

    [[nodiscard]] std::size_t dim() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_[i]; }

    /// <this|other>
    [[nodiscard]] Complex inner(const PureState &other) const;
    /// |this><this|
    [[nodiscard]] ComplexMatrix projector() const;
    [[nodiscard]] PureState apply(const ComplexMatrix &op) const;

  private:
    std::vector<Complex> amplitudes_;
};

/// Kronecker product; Alice (a) is the left factor. Both operands must be dim 2.
ComplexMatrix tensor_product(const ComplexMatrix &a, const ComplexMatrix &b);
PureState tensor_product(const PureState &a, const PureState &b);

/// Hermitian, unit-trace matrix. Positivity is checked on demand, not enforced.
class DensityMatrix {
  public:
    /// Validates Hermiticity and unit trace within `tol`, then stores the
    /// Hermitian part.
    explicit DensityMatrix(const ComplexMatrix &m, double tol = kAnalyticTol);
    static DensityMatrix from_pure(const PureState &psi);
    static DensityMatrix maximally_mixed(std::size_t dim);

    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return matrix_; }
    [[nodiscard]] std::size_t dim() const noexcept { return matrix_.dim(); }
    [[nodiscard]] double min_eigenvalue() const;
    /// True when the smallest eigenvalue is at least -tol.
    [[nodiscard]] bool is_physical(double tol = kReconstructionTol) const;

    /// Convex mixture weight*this + (1-weight)*other.
    [[nodiscard]] DensityMatrix mix(const DensityMatrix &other, double weight) const;

  private:
    ComplexMatrix matrix_;
};

/// Non-degenerate Hermitian 2x2 observable with spectral decomposition.
/// Outcome +1 labels the larger eigenvalue, -1 the smaller.
class Observable {
  public:
    explicit Observable(const ComplexMatrix &m);

    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return matrix_; }
    [[nodiscard]] double eigenvalue(int outcome) const;
    [[nodiscard]] const ComplexMatrix &projector(int outcome) const;
    /// Observable U^dagger O U, i.e. measuring O after the unitary U.
    [[nodiscard]] Observable conjugated_by(const ComplexMatrix &unitary) const;

  private:
    ComplexMatrix matrix_;
    std::array<double, 2> eigenvalues_{};
    std::array<ComplexMatrix, 2> projectors_;
};

struct HermitianEigen {
    /// Ascending.
    std::vector<double> values;
    /// Column k is the eigenvector for values[k].
    ComplexMatrix vectors;
};

/// Cyclic complex Jacobi diagonalization. Input must be Hermitian within 1e-10.
HermitianEigen hermitian_eigen(const ComplexMatrix &m);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix &m);

/// Re Tr[obs * rho]. `obs` must be Hermitian.
double expectation(const DensityMatrix &rho, const ComplexMatrix &obs);

/// Wootters concurrence of a physical two-qubit state.
double concurrence(const DensityMatrix &rho);
/// Concurrence squared.
double tangle(const DensityMatrix &rho);
/// <target|rho|target>
double fidelity(const DensityMatrix &rho, const PureState &target);

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
} // namespace pauli

/// Half-wave plate with fast axis at `angle_deg` to horizontal, acting on
/// (|H>, |V>). At 22.5 degrees this is the Hadamard map exchanging Z and X.
ComplexMatrix half_wave_plate(double angle_deg);

/// (|HV> - |VH>)/sqrt(2)
PureState singlet();
/// v * |Psi-><Psi-| + (1 - v) * I/4
DensityMatrix werner(double visibility);

/// sin(theta)|HV> - e^{i phi} cos(theta)|VH>, the source pair after the
/// compensating wave plate. Tangle sin^2(2 theta); the singlet at 45 degrees.
PureState compensated_pair(double theta_deg, double phi_rad = 0.0);

} // namespace wmchsh
