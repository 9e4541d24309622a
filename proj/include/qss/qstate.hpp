// Copyright 2026 The qss Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Exact dense state-vector core for at most three qubits: polarization
 * states, single-qubit unitaries, projective measurement and the Bell basis.
 *
 * Qubit 0 is the most significant bit of an amplitude index, so
 * tensor(a, b) places a's qubits first.
 */
#pragma once

#include "qss/random.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>

namespace qss {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 3;
inline constexpr std::size_t kMaxDim = std::size_t{1} << kMaxQubits;

/// Tolerance for the unit-norm invariant of PureState.
inline constexpr double kNormTolerance = 1e-9;

/// The four single-photon preparation states.
enum class StateLabel { H, V, UDiag, DDiag };

enum class Basis { Rectilinear, Diagonal };

/// Named single-qubit operators. Corr1..Corr3 are the teleportation
/// corrections |H><V|+|V><H|, |H><H|-|V><V| and |H><V|-|V><H|.
enum class UnitaryKind { Id, Flip, Hada, Corr1, Corr2, Corr3 };

enum class BellOutcome { PhiPlus, PsiPlus, PhiMinus, PsiMinus };

inline constexpr std::array<StateLabel, 4> kAllLabels{StateLabel::H, StateLabel::V,
                                                      StateLabel::UDiag, StateLabel::DDiag};
inline constexpr std::array<UnitaryKind, 3> kEncryptionOps{UnitaryKind::Id, UnitaryKind::Flip,
                                                           UnitaryKind::Hada};
inline constexpr std::array<BellOutcome, 4> kAllBellOutcomes{
    BellOutcome::PhiPlus, BellOutcome::PsiPlus, BellOutcome::PhiMinus, BellOutcome::PsiMinus};

Basis basis_of(StateLabel label);
/// The other label of the same basis (H<->V, u<->d).
StateLabel flipped(StateLabel label);
/// Labels of a basis, in order {|0>-like, |1>-like}.
std::array<StateLabel, 2> labels_of(Basis basis);

std::string_view to_string(StateLabel label);
std::string_view to_string(Basis basis);
std::string_view to_string(UnitaryKind kind);
std::string_view to_string(BellOutcome outcome);

/// Normalized amplitude vector over 1..3 qubits.
class PureState {
  public:
    /// Validates size (2, 4 or 8), finiteness and unit norm within kNormTolerance.
    explicit PureState(std::span<const Amplitude> amps);
    PureState(std::initializer_list<Amplitude> amps);

    [[nodiscard]] int num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return std::size_t{1} << num_qubits_; }
    [[nodiscard]] std::span<const Amplitude> amps() const noexcept { return {amps_.data(), dim()}; }
    [[nodiscard]] Amplitude operator[](std::size_t i) const { return amps_.at(i); }

    /// Builds from an unnormalized vector, rescaling it to unit norm.
    /// Fails when the vector has (numerically) zero norm.
    static PureState normalized(std::span<const Amplitude> amps);

  private:
    int num_qubits_ = 1;
    std::array<Amplitude, kMaxDim> amps_{};
};

/// 2x2 complex matrix, unitary within 1e-12.
class Unitary2 {
  public:
    using Matrix = std::array<std::array<Amplitude, 2>, 2>;

    /// Validates finiteness and unitarity.
    explicit Unitary2(const Matrix &m);

    [[nodiscard]] const Matrix &matrix() const noexcept { return m_; }
    [[nodiscard]] Amplitude operator()(int row, int col) const { return m_.at(row).at(col); }
    [[nodiscard]] Unitary2 adjoint() const;
    [[nodiscard]] Unitary2 operator*(const Unitary2 &rhs) const;
    [[nodiscard]] Unitary2 operator-() const;

    /// Largest elementwise deviation of m^dagger m from the identity.
    [[nodiscard]] double unitarity_defect() const;
    /// Largest elementwise |a - b|.
    [[nodiscard]] double distance(const Unitary2 &other) const;

  private:
    Matrix m_;
};

PureState state_of_label(StateLabel label);
Unitary2 make_unitary(UnitaryKind kind);

/// u * s for a one-qubit state.
PureState apply1(const Unitary2 &u, const PureState &s);
/// Applies u to tensor factor `qubit`, identity elsewhere.
PureState apply_on_qubit(const Unitary2 &u, const PureState &s, int qubit);

/// |<a|b>|^2.
double overlap_probability(const PureState &a, const PureState &b);
/// True iff |<a|b>| >= 1 - tol.
bool equal_up_to_phase(const PureState &a, const PureState &b, double tol);

/// Born probability of reading `label` when measuring a one-qubit state in basis_of(label).
double outcome_probability(const PureState &s, StateLabel label);

struct Measurement {
    StateLabel outcome;
    PureState collapsed;
};

/// Projective measurement of a one-qubit state. Always consumes exactly one draw.
Measurement measure_in_basis(const PureState &s, Basis basis, RandomStream &rng);

struct QubitMeasurement {
    StateLabel outcome;
    PureState collapsed; ///< full post-measurement state, same qubit count as input
};

/// Measures one tensor factor of a multi-qubit state. Consumes exactly one draw.
QubitMeasurement measure_qubit(const PureState &s, int qubit, Basis basis, RandomStream &rng);

/// Kronecker product; total qubit count must not exceed 3.
PureState tensor(const PureState &a, const PureState &b);

PureState bell_state(BellOutcome which);

struct BellProjection {
    double probability;
    PureState remaining; ///< the third qubit, renormalized
};

/// Projects qubits (pair.first, pair.second) of a 3-qubit state onto one Bell
/// state (first index is the first factor of the Bell state). Throws when the
/// branch has zero probability.
BellProjection bell_project(const PureState &s, std::pair<int, int> pair, BellOutcome which);

struct BellMeasurement {
    BellOutcome outcome;
    PureState remaining;
};

/// Samples a Bell-basis measurement on `pair`. Consumes exactly one draw.
BellMeasurement bell_measure(const PureState &s, std::pair<int, int> pair, RandomStream &rng);

} // namespace qss
