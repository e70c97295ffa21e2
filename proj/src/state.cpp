#include "qfp/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qfp {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

bool controls_satisfied(const GateOp& g, const Basis& b) {
    for (uint32_t i = 0; i < g.num_controls; ++i) {
        if (b.test(g.controls[i].qubit) != g.controls[i].on_one) return false;
    }
    return true;
}

bool controls_satisfied(const GateOp& g, uint64_t bits) {
    for (uint32_t i = 0; i < g.num_controls; ++i) {
        bool v = (bits >> g.controls[i].qubit) & 1u;
        if (v != g.controls[i].on_one) return false;
    }
    return true;
}

void check_unitary_kind(const GateOp& g) {
    if (g.kind == GateKind::Measure || g.kind == GateKind::ResetProtocol) {
        throw std::invalid_argument("apply_gate: Measure/ResetProtocol need an RngStream; "
                                    "use measure_qubit or reset_ancilla");
    }
}

}  // namespace

SparseState::SparseState(uint32_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits > Basis::kMaxQubits) throw std::invalid_argument("too many qubits");
    entries_.emplace(Basis{}, Amplitude{1.0, 0.0});
}

SparseState SparseState::basis_state(uint32_t num_qubits, Basis b) {
    SparseState s(num_qubits);
    s.entries_.clear();
    s.entries_.emplace(b, Amplitude{1.0, 0.0});
    return s;
}

Amplitude SparseState::amplitude(const Basis& b) const {
    auto it = entries_.find(b);
    return it == entries_.end() ? Amplitude{0.0, 0.0} : it->second;
}

double SparseState::norm_sq() const {
    double n = 0;
    for (const auto& [b, a] : entries_) n += std::norm(a);
    return n;
}

void SparseState::renormalize() {
    double n = std::sqrt(norm_sq());
    if (n == 0) throw std::runtime_error("cannot renormalize zero state");
    for (auto& [b, a] : entries_) a /= n;
}

void SparseState::prune() {
    bool dropped = false;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (std::abs(it->second) < kPruneThreshold) {
            it = entries_.erase(it);
            dropped = true;
        } else {
            ++it;
        }
    }
    if (dropped && !entries_.empty()) renormalize();
}

Basis SparseState::dominant_basis() const {
    if (entries_.empty()) throw std::runtime_error("empty state");
    const Basis* best = nullptr;
    double best_mag = -1;
    for (const auto& [b, a] : entries_) {
        double m = std::norm(a);
        if (m > best_mag || (m == best_mag && b < *best)) {
            best_mag = m;
            best = &b;
        }
    }
    return *best;
}

DenseState::DenseState(uint32_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits > kDenseQubitCap) throw std::invalid_argument("dense backend qubit cap exceeded");
    amps_.assign(size_t{1} << num_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

DenseState DenseState::basis_state(uint32_t num_qubits, uint64_t bits) {
    DenseState s(num_qubits);
    s.amps_[0] = 0.0;
    s.amps_.at(bits) = 1.0;
    return s;
}

double DenseState::norm_sq() const {
    double n = 0;
    for (const auto& a : amps_) n += std::norm(a);
    return n;
}

void DenseState::renormalize() {
    double n = std::sqrt(norm_sq());
    if (n == 0) throw std::runtime_error("cannot renormalize zero state");
    for (auto& a : amps_) a /= n;
}

void apply_gate(SparseState& state, const GateOp& gate) {
    gate.validate(state.num_qubits());
    check_unitary_kind(gate);
    auto& map = state.entries();

    switch (gate.kind) {
        case GateKind::Z:
        case GateKind::Phase: {
            const uint32_t t = gate.targets[0];
            const Amplitude phase = gate.kind == GateKind::Z
                                        ? Amplitude{-1.0, 0.0}
                                        : std::polar(1.0, gate.angle);
            for (auto& [b, a] : map) {
                if (b.test(t) && controls_satisfied(gate, b)) a *= phase;
            }
            return;
        }
        case GateKind::X: {
            const uint32_t t = gate.targets[0];
            SparseState::Map out;
            out.reserve(map.size());
            for (const auto& [b, a] : map) {
                Basis nb = b;
                if (controls_satisfied(gate, b)) nb.flip(t);
                out.emplace(nb, a);
            }
            map = std::move(out);
            return;
        }
        case GateKind::Y: {
            const uint32_t t = gate.targets[0];
            SparseState::Map out;
            out.reserve(map.size());
            const Amplitude i{0.0, 1.0};
            for (const auto& [b, a] : map) {
                if (!controls_satisfied(gate, b)) {
                    out.emplace(b, a);
                    continue;
                }
                Basis nb = b;
                nb.flip(t);
                out.emplace(nb, b.test(t) ? -i * a : i * a);
            }
            map = std::move(out);
            return;
        }
        case GateKind::Swap: {
            const uint32_t t0 = gate.targets[0], t1 = gate.targets[1];
            SparseState::Map out;
            out.reserve(map.size());
            for (const auto& [b, a] : map) {
                Basis nb = b;
                if (controls_satisfied(gate, b) && b.test(t0) != b.test(t1)) {
                    nb.flip(t0);
                    nb.flip(t1);
                }
                out.emplace(nb, a);
            }
            map = std::move(out);
            return;
        }
        case GateKind::H: {
            const uint32_t t = gate.targets[0];
            SparseState::Map out;
            out.reserve(map.size() * 2);
            for (const auto& [b, a] : map) {
                if (!controls_satisfied(gate, b)) {
                    out[b] += a;
                    continue;
                }
                Basis b0 = b, b1 = b;
                b0.set(t, false);
                b1.set(t, true);
                out[b0] += kInvSqrt2 * a;
                out[b1] += (b.test(t) ? -kInvSqrt2 : kInvSqrt2) * a;
            }
            map = std::move(out);
            state.prune();
            return;
        }
        default:
            throw std::logic_error("unhandled gate kind");
    }
}

void apply_gate(DenseState& state, const GateOp& gate) {
    gate.validate(state.num_qubits());
    check_unitary_kind(gate);
    auto& amps = state.amps();
    const uint64_t n = amps.size();

    switch (gate.kind) {
        case GateKind::Z:
        case GateKind::Phase: {
            const uint64_t mask = uint64_t{1} << gate.targets[0];
            const Amplitude phase = gate.kind == GateKind::Z
                                        ? Amplitude{-1.0, 0.0}
                                        : std::polar(1.0, gate.angle);
            for (uint64_t i = 0; i < n; ++i) {
                if ((i & mask) && controls_satisfied(gate, i)) amps[i] *= phase;
            }
            return;
        }
        case GateKind::X: {
            const uint64_t mask = uint64_t{1} << gate.targets[0];
            for (uint64_t i = 0; i < n; ++i) {
                if (!(i & mask) && controls_satisfied(gate, i) && controls_satisfied(gate, i | mask)) {
                    std::swap(amps[i], amps[i | mask]);
                }
            }
            return;
        }
        case GateKind::Y: {
            const uint64_t mask = uint64_t{1} << gate.targets[0];
            const Amplitude im{0.0, 1.0};
            for (uint64_t i = 0; i < n; ++i) {
                if (!(i & mask) && controls_satisfied(gate, i)) {
                    Amplitude a0 = amps[i], a1 = amps[i | mask];
                    amps[i] = -im * a1;
                    amps[i | mask] = im * a0;
                }
            }
            return;
        }
        case GateKind::Swap: {
            const uint64_t m0 = uint64_t{1} << gate.targets[0];
            const uint64_t m1 = uint64_t{1} << gate.targets[1];
            for (uint64_t i = 0; i < n; ++i) {
                if ((i & m0) && !(i & m1) && controls_satisfied(gate, i)) {
                    std::swap(amps[i], amps[(i ^ m0) | m1]);
                }
            }
            return;
        }
        case GateKind::H: {
            const uint64_t mask = uint64_t{1} << gate.targets[0];
            for (uint64_t i = 0; i < n; ++i) {
                if (!(i & mask) && controls_satisfied(gate, i)) {
                    Amplitude a0 = amps[i], a1 = amps[i | mask];
                    amps[i] = kInvSqrt2 * (a0 + a1);
                    amps[i | mask] = kInvSqrt2 * (a0 - a1);
                }
            }
            return;
        }
        default:
            throw std::logic_error("unhandled gate kind");
    }
}

int measure_qubit(SparseState& state, uint32_t q, RngStream& rng) {
    if (q >= state.num_qubits()) throw std::invalid_argument("measure_qubit: index out of range");
    double p1 = 0;
    for (const auto& [b, a] : state.entries()) {
        if (b.test(q)) p1 += std::norm(a);
    }
    const double p0 = 1.0 - p1;
    const int outcome = rng.next_double() < p0 ? 0 : 1;
    const double keep_p = outcome == 0 ? p0 : p1;
    if (keep_p <= 0) throw std::runtime_error("measure_qubit: projected onto zero-probability branch");
    const double scale = 1.0 / std::sqrt(keep_p);
    auto& map = state.entries();
    for (auto it = map.begin(); it != map.end();) {
        if (it->first.test(q) != (outcome == 1)) {
            it = map.erase(it);
        } else {
            it->second *= scale;
            ++it;
        }
    }
    return outcome;
}

int measure_qubit(DenseState& state, uint32_t q, RngStream& rng) {
    if (q >= state.num_qubits()) throw std::invalid_argument("measure_qubit: index out of range");
    const uint64_t mask = uint64_t{1} << q;
    auto& amps = state.amps();
    double p1 = 0;
    for (uint64_t i = 0; i < amps.size(); ++i) {
        if (i & mask) p1 += std::norm(amps[i]);
    }
    const double p0 = 1.0 - p1;
    const int outcome = rng.next_double() < p0 ? 0 : 1;
    const double keep_p = outcome == 0 ? p0 : p1;
    if (keep_p <= 0) throw std::runtime_error("measure_qubit: projected onto zero-probability branch");
    const double scale = 1.0 / std::sqrt(keep_p);
    for (uint64_t i = 0; i < amps.size(); ++i) {
        if (((i & mask) != 0) == (outcome == 1)) {
            amps[i] *= scale;
        } else {
            amps[i] = 0.0;
        }
    }
    return outcome;
}

template <typename State>
static int reset_ancilla_impl(State& state, uint32_t q, RngStream& rng) {
    apply_gate(state, g_h(q));
    int outcome = measure_qubit(state, q, rng);
    if (outcome == 1) apply_gate(state, g_x(q));
    return outcome;
}

int reset_ancilla(SparseState& state, uint32_t q, RngStream& rng) {
    return reset_ancilla_impl(state, q, rng);
}

int reset_ancilla(DenseState& state, uint32_t q, RngStream& rng) {
    return reset_ancilla_impl(state, q, rng);
}

DenseState to_dense(const SparseState& state) {
    if (state.num_qubits() > kDenseQubitCap) {
        throw std::invalid_argument("to_dense: qubit cap exceeded");
    }
    DenseState d(state.num_qubits());
    d.amps()[0] = 0.0;
    for (const auto& [b, a] : state.entries()) d.amps().at(b.low_bits()) = a;
    return d;
}

SparseState to_sparse(const DenseState& state) {
    SparseState s(state.num_qubits());
    s.entries().clear();
    for (uint64_t i = 0; i < state.amps().size(); ++i) {
        if (state.amps()[i] != Amplitude{0.0, 0.0}) {
            s.entries().emplace(Basis::from_bits(i), state.amps()[i]);
        }
    }
    return s;
}

void fix_global_phase(SparseState& state) {
    if (state.entries().empty()) return;
    Amplitude top = state.amplitude(state.dominant_basis());
    if (std::abs(top) == 0) return;
    Amplitude phase = std::conj(top) / std::abs(top);
    for (auto& [b, a] : state.entries()) a *= phase;
}

void fix_global_phase(DenseState& state) {
    uint64_t best = 0;
    double best_mag = -1;
    for (uint64_t i = 0; i < state.amps().size(); ++i) {
        double m = std::norm(state.amps()[i]);
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    Amplitude top = state.amps()[best];
    if (std::abs(top) == 0) return;
    Amplitude phase = std::conj(top) / std::abs(top);
    for (auto& a : state.amps()) a *= phase;
}

bool approx_equal(const SparseState& a, const SparseState& b, double tol, bool up_to_global_phase) {
    if (a.num_qubits() != b.num_qubits()) return false;
    SparseState x = a, y = b;
    if (up_to_global_phase) {
        fix_global_phase(x);
        fix_global_phase(y);
    }
    for (const auto& [basis, amp] : x.entries()) {
        if (std::abs(amp - y.amplitude(basis)) > tol) return false;
    }
    for (const auto& [basis, amp] : y.entries()) {
        if (std::abs(amp - x.amplitude(basis)) > tol) return false;
    }
    return true;
}

bool magnitudes_equal(const SparseState& a, const SparseState& b, double tol) {
    if (a.num_qubits() != b.num_qubits()) return false;
    for (const auto& [basis, amp] : a.entries()) {
        if (std::abs(std::abs(amp) - std::abs(b.amplitude(basis))) > tol) return false;
    }
    for (const auto& [basis, amp] : b.entries()) {
        if (std::abs(std::abs(amp) - std::abs(a.amplitude(basis))) > tol) return false;
    }
    return true;
}

}  // namespace qfp
