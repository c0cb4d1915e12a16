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

#include "wmchsh/weak_values.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "wmchsh/error.hpp"

namespace wmchsh {

namespace {

constexpr double kMinSelectionProb = 1e-12;

void require_postselection_element(const ComplexMatrix &f) {
    const auto eig = hermitian_eigenvalues(f);
    if (eig.front() < -kReconstructionTol || eig.back() > 1.0 + kReconstructionTol) {
        throw ValidationError("postselection element must satisfy 0 <= F <= I");
    }
}

/// Projectors for Alice's weak/strong observables given CHSH labels (x, z).
struct AliceProjectors {
    const ComplexMatrix &weak;
    const ComplexMatrix &strong;
};

AliceProjectors alice_projectors(const MeasurementFrame &frame, int x, int z) {
    if (frame.alice_weak_label == WeakBasis::Z) {
        return {frame.alice_weak.projector(z), frame.alice_strong.projector(x)};
    }
    return {frame.alice_weak.projector(x), frame.alice_strong.projector(z)};
}

std::optional<double> joint_entry(const DensityMatrix &rho, const ComplexMatrix &weak_op,
                                  const ComplexMatrix &post) {
    const double selection = (post * rho.matrix()).trace().real();
    if (selection <= kMinSelectionProb) {
        return std::nullopt;
    }
    return weak_value(rho, weak_op, post) * selection;
}

} // namespace

std::string to_string(WeakBasis basis) { return basis == WeakBasis::Z ? "Z" : "X"; }
std::string to_string(BobSetting setting) { return setting == BobSetting::P ? "P" : "Q"; }

WeakBasis parse_weak_basis(const std::string &text) {
    if (text == "Z" || text == "z") {
        return WeakBasis::Z;
    }
    if (text == "X" || text == "x") {
        return WeakBasis::X;
    }
    throw ValidationError("weak basis must be Z or X, got '" + text + "'");
}

BobSetting parse_bob_setting(const std::string &text) {
    if (text == "P" || text == "p") {
        return BobSetting::P;
    }
    if (text == "Q" || text == "q") {
        return BobSetting::Q;
    }
    throw ValidationError("Bob setting must be P or Q, got '" + text + "'");
}

ComplexMatrix bob_p_matrix() { return (pauli::z() + pauli::x()) * (-1.0 / std::sqrt(2.0)); }
ComplexMatrix bob_q_matrix() { return (pauli::z() - pauli::x()) * (1.0 / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------
// MeasurementFrame

MeasurementFrame MeasurementFrame::standard() {
    return MeasurementFrame{Observable(pauli::z()), Observable(pauli::x()),
                            Observable(bob_q_matrix()), Observable(bob_p_matrix()),
                            WeakBasis::Z};
}

MeasurementFrame MeasurementFrame::weak_x() {
    return MeasurementFrame{Observable(pauli::x()), Observable(pauli::z()),
                            Observable(bob_q_matrix()), Observable(bob_p_matrix()),
                            WeakBasis::X};
}

MeasurementFrame MeasurementFrame::lab(WeakBasis basis) {
    MeasurementFrame out = standard();
    out.alice_weak_label = basis;
    return out;
}

MeasurementFrame MeasurementFrame::with_alice_unitary(const ComplexMatrix &unitary) const {
    MeasurementFrame out = *this;
    out.alice_weak = alice_weak.conjugated_by(unitary);
    out.alice_strong = alice_strong.conjugated_by(unitary);
    return out;
}

const Observable &MeasurementFrame::alice_x() const {
    return alice_weak_label == WeakBasis::Z ? alice_strong : alice_weak;
}

const Observable &MeasurementFrame::alice_z() const {
    return alice_weak_label == WeakBasis::Z ? alice_weak : alice_strong;
}

const Observable &MeasurementFrame::bob(BobSetting setting) const {
    return setting == BobSetting::P ? bob_strong : bob_weak;
}

ComplexMatrix chsh_operator(const MeasurementFrame &frame) {
    const ComplexMatrix &x = frame.alice_x().matrix();
    const ComplexMatrix &z = frame.alice_z().matrix();
    return tensor_product(x + z, frame.bob(BobSetting::P).matrix()) +
           tensor_product(x - z, frame.bob(BobSetting::Q).matrix());
}

bool mutually_unbiased(const Observable &a, const Observable &b, double tol) {
    for (int i : kOutcomes) {
        for (int j : kOutcomes) {
            const double overlap = (a.projector(i) * b.projector(j)).trace().real();
            if (std::abs(overlap - 0.5) > tol) {
                return false;
            }
        }
    }
    return true;
}

int chsh_sign(int x, int z, int p, int q) {
    require_outcome(x);
    require_outcome(z);
    require_outcome(p);
    require_outcome(q);
    return ((x + z) * p + (x - z) * q) / 2;
}

// ---------------------------------------------------------------------------
// WeakJointTable

WeakJointTable::WeakJointTable(Mode mode, BobSetting setting) : mode_(mode), setting_(setting) {
    for (int x : kOutcomes) {
        for (int z : kOutcomes) {
            for (int p : kOutcomes) {
                if (mode == Mode::OneSided) {
                    entries_.push_back({x, z, p, 0, std::nullopt});
                    continue;
                }
                for (int q : kOutcomes) {
                    entries_.push_back({x, z, p, q, std::nullopt});
                }
            }
        }
    }
}

WeakJointTable WeakJointTable::two_sided() { return WeakJointTable(Mode::TwoSided, BobSetting::P); }

WeakJointTable WeakJointTable::one_sided(BobSetting setting) {
    return WeakJointTable(Mode::OneSided, setting);
}

WeakJointTable::Entry &WeakJointTable::find(int x, int z, int p, int q) {
    return const_cast<Entry &>(std::as_const(*this).find(x, z, p, q));
}

const WeakJointTable::Entry &WeakJointTable::find(int x, int z, int p, int q) const {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry &e) {
        return e.x == x && e.z == z && e.p == p && e.q == q;
    });
    if (it == entries_.end()) {
        throw ValidationError("no table entry for the requested outcome tuple");
    }
    return *it;
}

void WeakJointTable::set(int x, int z, int p, int q, std::optional<double> value) {
    if (mode_ != Mode::TwoSided) {
        throw ValidationError("four-outcome access on a one-sided table");
    }
    find(x, z, p, q).value = value;
}

void WeakJointTable::set(int x, int z, int b, std::optional<double> value) {
    if (mode_ != Mode::OneSided) {
        throw ValidationError("three-outcome access on a two-sided table");
    }
    find(x, z, b, 0).value = value;
}

std::optional<double> WeakJointTable::get(int x, int z, int p, int q) const {
    if (mode_ != Mode::TwoSided) {
        throw ValidationError("four-outcome access on a one-sided table");
    }
    return find(x, z, p, q).value;
}

std::optional<double> WeakJointTable::get(int x, int z, int b) const {
    if (mode_ != Mode::OneSided) {
        throw ValidationError("three-outcome access on a two-sided table");
    }
    return find(x, z, b, 0).value;
}

double WeakJointTable::value(int x, int z, int p, int q) const {
    const auto v = get(x, z, p, q);
    if (!v) {
        throw NumericError("weak-valued probability undefined (zero-probability postselection)");
    }
    return *v;
}

double WeakJointTable::value(int x, int z, int b) const {
    const auto v = get(x, z, b);
    if (!v) {
        throw NumericError("weak-valued probability undefined (zero-probability postselection)");
    }
    return *v;
}

bool WeakJointTable::complete() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Entry &e) { return e.value.has_value(); });
}

double WeakJointTable::sum() const {
    double acc = 0.0;
    for (const auto &e : entries_) {
        if (!e.value) {
            throw NumericError("cannot sum a table with undefined entries");
        }
        acc += *e.value;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Weak values

double weak_value(const DensityMatrix &pre, const ComplexMatrix &obs, const ComplexMatrix &post) {
    if (obs.dim() != pre.dim() || post.dim() != pre.dim()) {
        throw ValidationError("weak_value: dimension mismatch");
    }
    if (!obs.is_hermitian(kAnalyticTol)) {
        throw ValidationError("weak_value: observable is not Hermitian");
    }
    require_postselection_element(post);
    const ComplexMatrix post_rho = post * pre.matrix();
    const double selection = post_rho.trace().real();
    if (selection <= kMinSelectionProb) {
        throw NumericError("weak_value: postselection has zero probability");
    }
    return ((post * obs * pre.matrix()).trace() / selection).real();
}

double weak_value(const PureState &pre, const ComplexMatrix &obs, const PureState &post) {
    if (obs.dim() != pre.dim() || post.dim() != pre.dim()) {
        throw ValidationError("weak_value: dimension mismatch");
    }
    const Complex overlap = post.inner(pre);
    if (std::norm(overlap) <= kMinSelectionProb) {
        throw NumericError("weak_value: postselection is orthogonal to the preparation");
    }
    Complex numerator = 0.0;
    for (std::size_t i = 0; i < pre.dim(); ++i) {
        for (std::size_t j = 0; j < pre.dim(); ++j) {
            numerator += std::conj(post[i]) * obs(i, j) * pre[j];
        }
    }
    return (numerator / overlap).real();
}

double weak_joint_1q(const PureState &psi, int z, int x) {
    if (psi.dim() != 2) {
        throw ValidationError("weak_joint_1q requires a single-qubit state");
    }
    const Observable zo(pauli::z());
    require_outcome(x);
    // X eigenstate (|H> + x|V>)/sqrt2
    const PureState phi = PureState::normalized({1.0, static_cast<double>(x)});
    const double born = std::norm(phi.inner(psi));
    return weak_value(psi, zo.projector(z), phi) * born;
}

WeakJointTable weak_joint_table(const DensityMatrix &rho, const MeasurementFrame &frame) {
    if (rho.dim() != 4) {
        throw ValidationError("weak_joint_table requires a two-qubit state");
    }
    WeakJointTable table = WeakJointTable::two_sided();
    for (const auto &e : std::vector(table.entries())) {
        const auto alice = alice_projectors(frame, e.x, e.z);
        const ComplexMatrix post = tensor_product(alice.strong, frame.bob_strong.projector(e.p));
        const ComplexMatrix weak = tensor_product(alice.weak, frame.bob_weak.projector(e.q));
        table.set(e.x, e.z, e.p, e.q, joint_entry(rho, weak, post));
    }
    return table;
}

WeakJointTable weak_joint_one_sided(const DensityMatrix &rho, const MeasurementFrame &frame,
                                    BobSetting setting) {
    if (rho.dim() != 4) {
        throw ValidationError("weak_joint_one_sided requires a two-qubit state");
    }
    WeakJointTable table = WeakJointTable::one_sided(setting);
    const Observable &bob = frame.bob(setting);
    for (const auto &e : std::vector(table.entries())) {
        const auto alice = alice_projectors(frame, e.x, e.z);
        const ComplexMatrix post = tensor_product(alice.strong, bob.projector(e.p));
        const ComplexMatrix weak = tensor_product(alice.weak, pauli::identity());
        table.set(e.x, e.z, e.p, joint_entry(rho, weak, post));
    }
    return table;
}

ChshOutcome chsh_outcome_probs(const WeakJointTable &two_sided) {
    if (two_sided.mode() != WeakJointTable::Mode::TwoSided) {
        throw ValidationError("expected a two-sided table");
    }
    ChshOutcome out;
    for (const auto &e : two_sided.entries()) {
        if (!e.value) {
            throw NumericError("table has undefined entries");
        }
        (chsh_sign(e.x, e.z, e.p, e.q) > 0 ? out.p_plus : out.p_minus) += *e.value;
    }
    out.chsh_value = 2.0 * (out.p_plus - out.p_minus);
    return out;
}

ChshOutcome chsh_outcome_probs(const WeakJointTable &p_table, const WeakJointTable &q_table) {
    if (p_table.mode() != WeakJointTable::Mode::OneSided || p_table.setting() != BobSetting::P ||
        q_table.mode() != WeakJointTable::Mode::OneSided || q_table.setting() != BobSetting::Q) {
        throw ValidationError("expected one-sided P and Q tables");
    }
    ChshOutcome out;
    // With x == z only the P term survives: S = 2 x p. With x != z: S = 2 x q.
    for (const auto &e : p_table.entries()) {
        if (e.x != e.z) {
            continue;
        }
        if (!e.value) {
            throw NumericError("table has undefined entries");
        }
        (e.x * e.p > 0 ? out.p_plus : out.p_minus) += *e.value;
    }
    for (const auto &e : q_table.entries()) {
        if (e.x == e.z) {
            continue;
        }
        if (!e.value) {
            throw NumericError("table has undefined entries");
        }
        (e.x * e.p > 0 ? out.p_plus : out.p_minus) += *e.value;
    }
    out.chsh_value = 2.0 * (out.p_plus - out.p_minus);
    return out;
}

// ---------------------------------------------------------------------------
// Tangle family

double theta_for_tangle(double tangle) {
    if (!(tangle >= 0.0 && tangle <= 1.0)) {
        throw ValidationError("tangle must lie in [0, 1]");
    }
    return 0.5 * std::asin(std::sqrt(tangle)) * 180.0 / M_PI;
}

ChshOutcome analytic_outcome(const DensityMatrix &rho, const MeasurementFrame &frame) {
    WeakJointTable table = weak_joint_table(rho, frame);
    for (const auto &e : std::vector(table.entries())) {
        if (!e.value) {
            // F rho = 0, so Tr[F W rho] vanishes as well.
            table.set(e.x, e.z, e.p, e.q, 0.0);
        }
    }
    return chsh_outcome_probs(table);
}

std::vector<TheoryPoint> theory_curve(const std::vector<double> &tangles) {
    const MeasurementFrame frame = MeasurementFrame::standard();
    std::vector<TheoryPoint> out;
    out.reserve(tangles.size());
    for (double t : tangles) {
        const DensityMatrix rho = DensityMatrix::from_pure(compensated_pair(theta_for_tangle(t)));
        const ChshOutcome c = analytic_outcome(rho, frame);
        out.push_back({t, c.p_plus, c.p_minus, c.chsh_value});
    }
    return out;
}

TheoryPoint theory_closed_form(double tangle) {
    if (!(tangle >= 0.0 && tangle <= 1.0)) {
        throw ValidationError("tangle must lie in [0, 1]");
    }
    const double half_gap = std::sqrt(2.0) * (1.0 + std::sqrt(tangle)) / 4.0;
    return {tangle, 0.5 + half_gap, 0.5 - half_gap, 4.0 * half_gap};
}

} // namespace wmchsh
