#pragma once

#include <array>
#include <string>

#include "qfp/circuit.hpp"
#include "qfp/fixed.hpp"
#include "qfp/formats.hpp"
#include "qfp/oracle.hpp"

namespace qfp {

// Circuit generators for the float encoding: a two's-complement (m, m-1)
// mantissa paired with a two's-complement integer exponent. Nonzero values
// are kept normalized (|mantissa| in [0.5, 1)); zero is (0, 0).

FloatReg alloc_float_reg(CircuitBuilder& b, const std::string& name, FloatFormat fmt);

// X-loads a classical constant into a fresh register; calling it again with
// the same constant clears the register (the load is self-inverse).
void load_soft_constant(CircuitBuilder& b, const FloatReg& reg, const SoftFloat& value);

// Reset protocol on every qubit of the register.
void reset_float_reg(CircuitBuilder& b, const FloatReg& reg);
void reset_fixed_reg(CircuitBuilder& b, const FixedReg& reg);

// In-place bit shift of q by the (signed) register amount s: positive values
// shift right, negative left. Right shifts of signed registers go through an
// absolute-value pass (truncation toward zero); fills are zeros. Superposed
// shift amounts are supported. Requires 4 fresh ancillae, returned dirty.
void shift_inplace(CircuitBuilder& b, const FixedReg& q, const FixedReg& s,
                   const std::array<uint32_t, 4>& anc);

// Sets the exponent to 0 on every basis state whose mantissa is 0. Requires
// 2 fresh ancillae, returned dirty (a[0] = mantissa-nonzero flag).
void zero_exp(CircuitBuilder& b, const FloatReg& q, const std::array<uint32_t, 2>& anc);

// Mantissa negation; exponent untouched. Canonical in, canonical out.
void fneg(CircuitBuilder& b, const FloatReg& q);

// out = q * r (canonical); out must be fresh |0>. Scratch ancillae come from
// the builder pool (peak max(m-1, 7)) and are all reset before returning.
void fmul(CircuitBuilder& b, const FloatReg& q, const FloatReg& r, const FloatReg& out);

// out = q + r (canonical); out must be fresh |0>. Pool peak is 8 ancillae.
void fadd(CircuitBuilder& b, const FloatReg& q, const FloatReg& r, const FloatReg& out);

// Newton-Raphson reciprocal: initial guess (mantissa +-0.5, exponent 1 - q_e),
// then `iterations` rounds of x <- x * (2 - q*x). The three scratch registers
// rotate roles and are reset between iterations; `two` holds the constant 2.
struct RecipWorkspace {
    FloatReg r0, r1, r2;
    FloatReg two;
};
RecipWorkspace alloc_recip_workspace(CircuitBuilder& b, FloatFormat fmt);
FloatReg recip(CircuitBuilder& b, const FloatReg& q, int iterations, RecipWorkspace& ws);

// exp(q) for |q| <= 1 via the Horner form of the truncated series, with the
// 1/k coefficients loaded as classical constants.
struct ExpWorkspace {
    FloatReg one, ck, h, t, u;
};
ExpWorkspace alloc_exp_workspace(CircuitBuilder& b, FloatFormat fmt);
FloatReg fexp(CircuitBuilder& b, const FloatReg& q, int order, ExpWorkspace& ws);

// Basis-label helpers for preparing inputs and reading results.
void set_float_bits(Basis& basis, const FloatReg& reg, const SoftFloat& value);
SoftFloat read_float_bits(const Basis& basis, const FloatReg& reg);
void set_fixed_bits(Basis& basis, const FixedReg& reg, int64_t code);
int64_t read_fixed_bits(const Basis& basis, const FixedReg& reg);

}  // namespace qfp
