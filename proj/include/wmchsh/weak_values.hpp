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
 * @file weak_values.hpp
 * Weak values, weak-valued joint probability tables and CHSH accounting.
 *
 * CHSH labels: Alice reports X, Z in {+1,-1}; Bob reports P, Q in {+1,-1};
 * S = (X + Z) P + (X - Z) Q takes values +2 or -2 on every outcome tuple.
 */

#include <optional>
#include <string>
#include <vector>

#include "wmchsh/linalg.hpp"

namespace wmchsh {

/// Which CHSH label Alice's weakly measured observable carries.
enum class WeakBasis { Z, X };

/// Bob's strong measurement in the one-sided (Alice-only weak) scheme.
enum class BobSetting { P, Q };

std::string to_string(WeakBasis basis);
std::string to_string(BobSetting setting);
WeakBasis parse_weak_basis(const std::string &text);
BobSetting parse_bob_setting(const std::string &text);

/// Bob's CHSH observables -(Z + X)/sqrt2 and (Z - X)/sqrt2.
ComplexMatrix bob_p_matrix();
ComplexMatrix bob_q_matrix();

struct MeasurementFrame {
    Observable alice_weak;
    Observable alice_strong;
    Observable bob_weak;
    Observable bob_strong;
    WeakBasis alice_weak_label = WeakBasis::Z;

    /// Weak Z then strong X on Alice; weak Q then strong P on Bob.
    static MeasurementFrame standard();
    /// Alice's roles exchanged: weak X then strong Z.
    static MeasurementFrame weak_x();
    /// The apparatus observables (weak Z, strong X on Alice) with the CHSH
    /// label of the weak result given by `basis`. With WeakBasis::X this is the
    /// frame seen after a 22.5 degree half-wave plate has rotated Alice's photon.
    static MeasurementFrame lab(WeakBasis basis);
    /// Frame seen by a state that first passes a unitary on Alice's side.
    [[nodiscard]] MeasurementFrame with_alice_unitary(const ComplexMatrix &unitary) const;

    /// Alice observable carrying the CHSH label X (resp. Z).
    [[nodiscard]] const Observable &alice_x() const;
    [[nodiscard]] const Observable &alice_z() const;
    /// P is Bob's strong observable, Q his weak one.
    [[nodiscard]] const Observable &bob(BobSetting setting) const;
};

/// (X + Z) x P + (X - Z) x Q built from the frame's CHSH-labelled observables.
ComplexMatrix chsh_operator(const MeasurementFrame &frame);

/// |<a|b>|^2 = 1/2 for every pair of eigenvectors, checked on projectors.
bool mutually_unbiased(const Observable &a, const Observable &b, double tol = kAnalyticTol);

/// S / 2 for an outcome tuple; always +1 or -1.
int chsh_sign(int x, int z, int p, int q);

/// Weak-valued joint probabilities, either the full 16-entry (x, z, p, q)
/// table or an 8-entry (x, z, b) table for one Bob setting.
class WeakJointTable {
  public:
    enum class Mode { TwoSided, OneSided };

    struct Entry {
        int x = 0;
        int z = 0;
        /// For one-sided tables `b` is Bob's outcome for `setting()` and the
        /// two-sided p/q slots are unused.
        int p = 0;
        int q = 0;
        /// Empty when the postselection has zero probability.
        std::optional<double> value;
    };

    static WeakJointTable two_sided();
    static WeakJointTable one_sided(BobSetting setting);

    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    [[nodiscard]] BobSetting setting() const noexcept { return setting_; }
    [[nodiscard]] const std::vector<Entry> &entries() const noexcept { return entries_; }

    void set(int x, int z, int p, int q, std::optional<double> value);
    void set(int x, int z, int b, std::optional<double> value);
    [[nodiscard]] std::optional<double> get(int x, int z, int p, int q) const;
    [[nodiscard]] std::optional<double> get(int x, int z, int b) const;
    /// Throws NumericError on an undefined entry.
    [[nodiscard]] double value(int x, int z, int p, int q) const;
    [[nodiscard]] double value(int x, int z, int b) const;

    [[nodiscard]] bool complete() const;
    [[nodiscard]] double sum() const;

  private:
    WeakJointTable(Mode mode, BobSetting setting);
    Entry &find(int x, int z, int p, int q);
    [[nodiscard]] const Entry &find(int x, int z, int p, int q) const;

    Mode mode_;
    BobSetting setting_;
    std::vector<Entry> entries_;
};

struct ChshOutcome {
    double p_plus = 0.0;
    double p_minus = 0.0;
    double chsh_value = 0.0;
};

/// Re(Tr[F O rho] / Tr[F rho]). F must be positive semidefinite with F <= I.
/// Throws NumericError when Tr[F rho] <= 1e-12.
double weak_value(const DensityMatrix &pre, const ComplexMatrix &obs, const ComplexMatrix &post);
/// Re(<post|O|pre> / <post|pre>) for pure pre- and postselection.
double weak_value(const PureState &pre, const ComplexMatrix &obs, const PureState &post);

/// Pr^w[x, z | psi] for weak Z then strong X on a single qubit.
double weak_joint_1q(const PureState &psi, int z, int x);

/// Two-sided table: entry(x,z,p,q) = wv(rho, Pi_z x Pi_q, Pi_x x Pi_p) * Pr[x,p].
WeakJointTable weak_joint_table(const DensityMatrix &rho, const MeasurementFrame &frame);
/// One-sided table for Bob measuring `setting` strongly.
WeakJointTable weak_joint_one_sided(const DensityMatrix &rho, const MeasurementFrame &frame,
                                    BobSetting setting);

ChshOutcome chsh_outcome_probs(const WeakJointTable &two_sided);
/// Combines the P-setting and Q-setting one-sided tables.
ChshOutcome chsh_outcome_probs(const WeakJointTable &p_table, const WeakJointTable &q_table);

/// Two-sided outcome probabilities where entries with a zero-probability
/// postselection take their limiting value 0 instead of being undefined.
ChshOutcome analytic_outcome(const DensityMatrix &rho, const MeasurementFrame &frame);

struct TheoryPoint {
    double tangle = 0.0;
    double p_plus = 0.0;
    double p_minus = 0.0;
    double chsh_value = 0.0;
};

/// Pump angle (degrees, in [0, 45]) whose compensated pair has this tangle.
double theta_for_tangle(double tangle);
/// p_plus, p_minus and S for the pure compensated pair family, evaluated from
/// the full 16-entry table (analytic_outcome) at each tangle in [0, 1].
std::vector<TheoryPoint> theory_curve(const std::vector<double> &tangles);
/// 1/2 +- sqrt2 (1 + sqrt T) / 4.
TheoryPoint theory_closed_form(double tangle);

} // namespace wmchsh
