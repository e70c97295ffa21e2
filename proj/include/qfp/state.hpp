#pragma once

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qfp/basis.hpp"
#include "qfp/gate.hpp"
#include "qfp/rng.hpp"

namespace qfp {

using Amplitude = std::complex<double>;

// Amplitudes below this magnitude are dropped from sparse states; they are
// floating-point dust left behind by phase-gate round-off and would otherwise
// grow the map without bound.
inline constexpr double kPruneThreshold = 1e-14;

// Dense backends refuse more qubits than this (2^26 amplitudes ~ 1 GiB).
inline constexpr uint32_t kDenseQubitCap = 26;

class SparseState {
  public:
    using Map = std::unordered_map<Basis, Amplitude, BasisHash>;

    SparseState() = default;
    explicit SparseState(uint32_t num_qubits);
    static SparseState basis_state(uint32_t num_qubits, Basis b);

    uint32_t num_qubits() const { return num_qubits_; }
    const Map& entries() const { return entries_; }
    Map& entries() { return entries_; }
    size_t size() const { return entries_.size(); }

    Amplitude amplitude(const Basis& b) const;
    double norm_sq() const;
    void renormalize();
    void prune();

    // Largest-magnitude entry; ties broken by basis order. Throws on empty state.
    Basis dominant_basis() const;

  private:
    uint32_t num_qubits_ = 0;
    Map entries_;
};

class DenseState {
  public:
    DenseState() = default;
    explicit DenseState(uint32_t num_qubits);
    static DenseState basis_state(uint32_t num_qubits, uint64_t bits);

    uint32_t num_qubits() const { return num_qubits_; }
    const std::vector<Amplitude>& amps() const { return amps_; }
    std::vector<Amplitude>& amps() { return amps_; }

    double norm_sq() const;
    void renormalize();

  private:
    uint32_t num_qubits_ = 0;
    std::vector<Amplitude> amps_;
};

// Applies one gate (unitary kinds only; Measure/ResetProtocol are rejected —
// use measure_qubit / reset_ancilla). Controls with on_one=false act on |0>.
void apply_gate(SparseState& state, const GateOp& gate);
void apply_gate(DenseState& state, const GateOp& gate);

// Samples the outcome of a computational-basis measurement of qubit q, then
// projects and renormalizes. Low rng draws favor outcome 0.
int measure_qubit(SparseState& state, uint32_t q, RngStream& rng);
int measure_qubit(DenseState& state, uint32_t q, RngStream& rng);

// H, measure, then X on outcome 1: forces qubit q to |0> while preserving the
// per-basis magnitudes of the remaining qubits (signs may flip with the
// measured branch). Returns the measurement outcome.
int reset_ancilla(SparseState& state, uint32_t q, RngStream& rng);
int reset_ancilla(DenseState& state, uint32_t q, RngStream& rng);

DenseState to_dense(const SparseState& state);
SparseState to_sparse(const DenseState& state);

// Multiplies by the global phase that makes the largest-magnitude amplitude
// real and positive, so equivalent states compare equal.
void fix_global_phase(SparseState& state);
void fix_global_phase(DenseState& state);

bool approx_equal(const SparseState& a, const SparseState& b, double tol,
                  bool up_to_global_phase = true);
bool magnitudes_equal(const SparseState& a, const SparseState& b, double tol);

}  // namespace qfp
