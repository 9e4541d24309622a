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
#include "qss/qstate.hpp"

#include "qss/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace qss {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr double kUnitaryTolerance = 1e-12;

Unitary2 mat(Amplitude a, Amplitude b, Amplitude c, Amplitude d) {
    Unitary2::Matrix m{};
    m[0][0] = a;
    m[0][1] = b;
    m[1][0] = c;
    m[1][1] = d;
    return Unitary2(m);
}

int qubits_for_dim(std::size_t dim) {
    switch (dim) {
    case 2:
        return 1;
    case 4:
        return 2;
    case 8:
        return 3;
    default:
        throw Error(ErrorCode::DimensionMismatch,
                    "state dimension must be 2, 4 or 8, got " + std::to_string(dim));
    }
}

bool finite(Amplitude a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); }

double norm_squared(std::span<const Amplitude> amps) {
    double n = 0.0;
    for (auto a : amps) {
        n += std::norm(a);
    }
    return n;
}

void require_single_qubit(const PureState &s, const char *op) {
    if (s.num_qubits() != 1) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(op) + ": expected a 1-qubit state, got " +
                        std::to_string(s.num_qubits()));
    }
}

void require_qubit_index(const PureState &s, int qubit, const char *op) {
    if (qubit < 0 || qubit >= s.num_qubits()) {
        throw Error(ErrorCode::InvalidArgument, std::string(op) + ": qubit index " +
                                                    std::to_string(qubit) + " out of range");
    }
}

// Bit position of tensor factor `qubit` inside an amplitude index.
int bit_of(int num_qubits, int qubit) { return num_qubits - 1 - qubit; }

// Amplitudes of the basis vector for `label`.
std::array<Amplitude, 2> label_vector(StateLabel label) {
    switch (label) {
    case StateLabel::H:
        return {1.0, 0.0};
    case StateLabel::V:
        return {0.0, 1.0};
    case StateLabel::UDiag:
        return {kInvSqrt2, kInvSqrt2};
    case StateLabel::DDiag:
        return {kInvSqrt2, -kInvSqrt2};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown state label");
}

} // namespace

Basis basis_of(StateLabel label) {
    return (label == StateLabel::H || label == StateLabel::V) ? Basis::Rectilinear
                                                              : Basis::Diagonal;
}

StateLabel flipped(StateLabel label) {
    switch (label) {
    case StateLabel::H:
        return StateLabel::V;
    case StateLabel::V:
        return StateLabel::H;
    case StateLabel::UDiag:
        return StateLabel::DDiag;
    case StateLabel::DDiag:
        return StateLabel::UDiag;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown state label");
}

std::array<StateLabel, 2> labels_of(Basis basis) {
    if (basis == Basis::Rectilinear) {
        return {StateLabel::H, StateLabel::V};
    }
    return {StateLabel::UDiag, StateLabel::DDiag};
}

std::string_view to_string(StateLabel label) {
    switch (label) {
    case StateLabel::H:
        return "H";
    case StateLabel::V:
        return "V";
    case StateLabel::UDiag:
        return "u";
    case StateLabel::DDiag:
        return "d";
    }
    return "?";
}

std::string_view to_string(Basis basis) {
    return basis == Basis::Rectilinear ? "rectilinear" : "diagonal";
}

std::string_view to_string(UnitaryKind kind) {
    switch (kind) {
    case UnitaryKind::Id:
        return "I";
    case UnitaryKind::Flip:
        return "U";
    case UnitaryKind::Hada:
        return "UH";
    case UnitaryKind::Corr1:
        return "u1";
    case UnitaryKind::Corr2:
        return "u2";
    case UnitaryKind::Corr3:
        return "u3";
    }
    return "?";
}

std::string_view to_string(BellOutcome outcome) {
    switch (outcome) {
    case BellOutcome::PhiPlus:
        return "Phi+";
    case BellOutcome::PsiPlus:
        return "Psi+";
    case BellOutcome::PhiMinus:
        return "Phi-";
    case BellOutcome::PsiMinus:
        return "Psi-";
    }
    return "?";
}

// ---------------------------------------------------------------- PureState

PureState::PureState(std::span<const Amplitude> amps) : num_qubits_(qubits_for_dim(amps.size())) {
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (!finite(amps[i])) {
            throw Error(ErrorCode::InvalidArgument, "state amplitude is not finite");
        }
        amps_[i] = amps[i];
    }
    const double n = norm_squared(amps);
    if (std::abs(n - 1.0) > kNormTolerance) {
        throw Error(ErrorCode::InvalidArgument,
                    "state is not normalized (norm^2 = " + std::to_string(n) + ")");
    }
}

PureState::PureState(std::initializer_list<Amplitude> amps)
    : PureState(std::span<const Amplitude>(amps.begin(), amps.size())) {}

PureState PureState::normalized(std::span<const Amplitude> amps) {
    const double n = std::sqrt(norm_squared(amps));
    if (!(n > 1e-300) || !std::isfinite(n)) {
        throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero vector");
    }
    std::array<Amplitude, kMaxDim> scaled{};
    for (std::size_t i = 0; i < amps.size() && i < kMaxDim; ++i) {
        scaled[i] = amps[i] / n;
    }
    return PureState(std::span<const Amplitude>(scaled.data(), amps.size()));
}

// ----------------------------------------------------------------- Unitary2

Unitary2::Unitary2(const Matrix &m) : m_(m) {
    for (const auto &row : m_) {
        for (auto a : row) {
            if (!finite(a)) {
                throw Error(ErrorCode::InvalidArgument, "matrix entry is not finite");
            }
        }
    }
    if (unitarity_defect() > kUnitaryTolerance) {
        throw Error(ErrorCode::InvalidArgument, "matrix is not unitary");
    }
}

Unitary2 Unitary2::adjoint() const {
    Matrix a{};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            a[r][c] = std::conj(m_[c][r]);
        }
    }
    return Unitary2(a);
}

Unitary2 Unitary2::operator*(const Unitary2 &rhs) const {
    Matrix p{};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            p[r][c] = m_[r][0] * rhs.m_[0][c] + m_[r][1] * rhs.m_[1][c];
        }
    }
    return Unitary2(p);
}

Unitary2 Unitary2::operator-() const {
    Matrix n = m_;
    for (auto &row : n) {
        for (auto &a : row) {
            a = -a;
        }
    }
    return Unitary2(n);
}

double Unitary2::unitarity_defect() const {
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            const Amplitude e = std::conj(m_[0][r]) * m_[0][c] + std::conj(m_[1][r]) * m_[1][c];
            const Amplitude expect = (r == c) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(e - expect));
        }
    }
    return worst;
}

double Unitary2::distance(const Unitary2 &other) const {
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            worst = std::max(worst, std::abs(m_[r][c] - other.m_[r][c]));
        }
    }
    return worst;
}

// ------------------------------------------------------------- constructors

PureState state_of_label(StateLabel label) {
    const auto v = label_vector(label);
    return PureState(std::span<const Amplitude>(v));
}

Unitary2 make_unitary(UnitaryKind kind) {
    switch (kind) {
    case UnitaryKind::Id:
        return mat(1.0, 0.0, 0.0, 1.0);
    case UnitaryKind::Flip:
        // |0><1| - |1><0|
        return mat(0.0, 1.0, -1.0, 0.0);
    case UnitaryKind::Hada:
        return mat(kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2);
    case UnitaryKind::Corr1:
        return mat(0.0, 1.0, 1.0, 0.0);
    case UnitaryKind::Corr2:
        return mat(1.0, 0.0, 0.0, -1.0);
    case UnitaryKind::Corr3:
        return mat(0.0, 1.0, -1.0, 0.0);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown unitary kind");
}

// --------------------------------------------------------------- operations

PureState apply1(const Unitary2 &u, const PureState &s) {
    require_single_qubit(s, "apply1");
    return apply_on_qubit(u, s, 0);
}

PureState apply_on_qubit(const Unitary2 &u, const PureState &s, int qubit) {
    require_qubit_index(s, qubit, "apply_on_qubit");
    const std::size_t dim = s.dim();
    const std::size_t mask = std::size_t{1} << bit_of(s.num_qubits(), qubit);
    std::array<Amplitude, kMaxDim> out{};
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & mask) {
            continue;
        }
        const Amplitude a0 = s[i];
        const Amplitude a1 = s[i | mask];
        out[i] = u(0, 0) * a0 + u(0, 1) * a1;
        out[i | mask] = u(1, 0) * a0 + u(1, 1) * a1;
    }
    // Renormalize to keep rounding drift from accumulating over long op chains.
    return PureState::normalized(std::span<const Amplitude>(out.data(), dim));
}

double overlap_probability(const PureState &a, const PureState &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw Error(ErrorCode::DimensionMismatch, "overlap of states with different qubit counts");
    }
    Amplitude ip = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        ip += std::conj(a[i]) * b[i];
    }
    return std::norm(ip);
}

bool equal_up_to_phase(const PureState &a, const PureState &b, double tol) {
    return std::sqrt(overlap_probability(a, b)) >= 1.0 - tol;
}

double outcome_probability(const PureState &s, StateLabel label) {
    require_single_qubit(s, "outcome_probability");
    return overlap_probability(state_of_label(label), s);
}

Measurement measure_in_basis(const PureState &s, Basis basis, RandomStream &rng) {
    require_single_qubit(s, "measure_in_basis");
    const auto labels = labels_of(basis);
    const double p0 = outcome_probability(s, labels[0]);
    const StateLabel outcome = rng.uniform_real() < p0 ? labels[0] : labels[1];
    return {outcome, state_of_label(outcome)};
}

QubitMeasurement measure_qubit(const PureState &s, int qubit, Basis basis, RandomStream &rng) {
    require_qubit_index(s, qubit, "measure_qubit");
    const std::size_t dim = s.dim();
    const std::size_t mask = std::size_t{1} << bit_of(s.num_qubits(), qubit);
    const auto labels = labels_of(basis);

    // Component of s along |e> on `qubit`: (<e| x I) s, kept in the full space as |e> x rest.
    auto project = [&](StateLabel label) {
        const auto e = label_vector(label);
        std::array<Amplitude, kMaxDim> out{};
        double prob = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & mask) {
                continue;
            }
            const Amplitude rest = std::conj(e[0]) * s[i] + std::conj(e[1]) * s[i | mask];
            out[i] = e[0] * rest;
            out[i | mask] = e[1] * rest;
            prob += std::norm(rest);
        }
        return std::pair{prob, out};
    };

    auto [p0, v0] = project(labels[0]);
    const bool first = rng.uniform_real() < p0;
    const StateLabel outcome = first ? labels[0] : labels[1];
    auto out = first ? v0 : project(labels[1]).second;
    return {outcome, PureState::normalized(std::span<const Amplitude>(out.data(), dim))};
}

PureState tensor(const PureState &a, const PureState &b) {
    if (a.num_qubits() + b.num_qubits() > kMaxQubits) {
        throw Error(ErrorCode::DimensionMismatch, "tensor product exceeds 3 qubits");
    }
    std::array<Amplitude, kMaxDim> out{};
    const std::size_t db = b.dim();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < db; ++j) {
            out[i * db + j] = a[i] * b[j];
        }
    }
    return PureState::normalized(std::span<const Amplitude>(out.data(), a.dim() * db));
}

PureState bell_state(BellOutcome which) {
    switch (which) {
    case BellOutcome::PhiPlus:
        return PureState{kInvSqrt2, 0.0, 0.0, kInvSqrt2};
    case BellOutcome::PsiPlus:
        return PureState{0.0, kInvSqrt2, kInvSqrt2, 0.0};
    case BellOutcome::PhiMinus:
        return PureState{kInvSqrt2, 0.0, 0.0, -kInvSqrt2};
    case BellOutcome::PsiMinus:
        return PureState{0.0, kInvSqrt2, -kInvSqrt2, 0.0};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown Bell outcome");
}

namespace {

// Unnormalized (<bell| x I) s for the pair, and its squared norm.
std::pair<double, std::array<Amplitude, 2>> bell_component(const PureState &s,
                                                            std::pair<int, int> pair,
                                                            BellOutcome which) {
    if (s.num_qubits() != 3) {
        throw Error(ErrorCode::DimensionMismatch, "bell measurement needs a 3-qubit state");
    }
    const auto [qa, qb] = pair;
    require_qubit_index(s, qa, "bell_measure");
    require_qubit_index(s, qb, "bell_measure");
    if (qa == qb) {
        throw Error(ErrorCode::InvalidArgument, "bell_measure: pair indices must be distinct");
    }
    const int rest = 3 - qa - qb;
    const PureState bell = bell_state(which);

    std::array<Amplitude, 2> r{};
    for (int x = 0; x < 2; ++x) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const std::size_t idx = (std::size_t(a) << bit_of(3, qa)) |
                                        (std::size_t(b) << bit_of(3, qb)) |
                                        (std::size_t(x) << bit_of(3, rest));
                r[x] += std::conj(bell[2 * a + b]) * s[idx];
            }
        }
    }
    return {std::norm(r[0]) + std::norm(r[1]), r};
}

} // namespace

BellProjection bell_project(const PureState &s, std::pair<int, int> pair, BellOutcome which) {
    auto [prob, r] = bell_component(s, pair, which);
    if (prob < 1e-15) {
        throw Error(ErrorCode::InvalidArgument,
                    "bell_project: branch " + std::string(to_string(which)) +
                        " has zero probability");
    }
    return {prob, PureState::normalized(std::span<const Amplitude>(r))};
}

BellMeasurement bell_measure(const PureState &s, std::pair<int, int> pair, RandomStream &rng) {
    const double u = rng.uniform_real();
    double acc = 0.0;
    std::array<double, 4> probs{};
    for (std::size_t k = 0; k < 4; ++k) {
        probs[k] = bell_component(s, pair, kAllBellOutcomes[k]).first;
    }
    // Pick the last non-empty branch if rounding leaves u above the cumulative sum.
    std::size_t pick = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        if (probs[k] > 0.0) {
            pick = k;
        }
    }
    for (std::size_t k = 0; k < 4; ++k) {
        acc += probs[k];
        if (u < acc && probs[k] > 0.0) {
            pick = k;
            break;
        }
    }
    const auto outcome = kAllBellOutcomes[pick];
    return {outcome, bell_project(s, pair, outcome).remaining};
}

} // namespace qss
