#pragma once

#include <optional>

#include "qfp/circuit.hpp"
#include "qfp/formats.hpp"

namespace qfp {

// QFT-based fixed-point circuit generators. All arithmetic is modular on the
// register codes; the (n, f) format only decides how codes map to values and
// (for signed registers) the weight of the top bit in multi-width operations.
//
// The QFT here carries no terminal swaps; the phase schedules are indexed so
// that macro-op semantics are unchanged.

// Standalone QFT / inverse QFT on a register (mostly for tests; arithmetic
// fragments conjugate internally via CircuitBuilder Fourier segments).
void qft(CircuitBuilder& b, const std::vector<uint32_t>& layout);
void iqft(CircuitBuilder& b, const std::vector<uint32_t>& layout);

// |a> -> |a + c mod 2^n * 2^-f>. The constant is given in value units and
// quantized to the register's 2^-f grid; wrap is defined behavior. No
// ancillae. Optional controls make the whole fragment conditional.
void add_const(CircuitBuilder& b, const FixedReg& reg, double value,
               const std::vector<Control>& ctrls = {});
// Same, constant already in code units.
void add_const_code(CircuitBuilder& b, const FixedReg& reg, int64_t code,
                    const std::vector<Control>& ctrls = {});

// |dst, src> -> |dst + sign*src*2^scale, src>. Registers must be disjoint; a
// narrower signed src is sign-extended by weighting its top bit negatively.
void add_reg(CircuitBuilder& b, const FixedReg& dst, const FixedReg& src, int sign = 1,
             int scale_log2 = 0, const std::vector<Control>& ctrls = {});

inline void sub_reg(CircuitBuilder& b, const FixedReg& dst, const FixedReg& src) {
    add_reg(b, dst, src, -1);
}

// |acc, x, y> -> |acc + x*y, x, y> exactly (modular wrap if acc is narrow).
void fma(CircuitBuilder& b, const FixedReg& acc, const FixedReg& x, const FixedReg& y,
         int sign = 1);

// Number of doubly controlled phase rotations fma() emits.
uint64_t fma_phase_count(uint32_t acc_n, uint32_t x_n, uint32_t y_n);

// |q> -> |-q> for two's-complement registers: X on every qubit, then +1.
void negate(CircuitBuilder& b, const FixedReg& reg, std::optional<Control> ctrl = std::nullopt);

// CX fan-out in the computational basis; dst must be fresh |0> qubits.
void copy_bit(CircuitBuilder& b, uint32_t src, uint32_t dst);
void copy_reg(CircuitBuilder& b, const FixedReg& src, const FixedReg& dst);

// Classical helpers used by tests and the bench layer.
int64_t fixed_encode(double value, const FixedFormat& fmt);   // round-to-nearest code
double fixed_decode(int64_t code, const FixedFormat& fmt);

}  // namespace qfp
