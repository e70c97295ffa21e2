#pragma once

#include <cstdint>
#include <vector>

#include "qfp/formats.hpp"

namespace qfp {

// Classical, bit-exact reference model of the float encoding and of every
// float circuit. It mirrors circuit semantics (truncation, single guard bit,
// underflow-to-zero, two's-complement wrap) rather than ideal real
// arithmetic, so circuit-vs-oracle comparisons can demand exact code
// equality. Accuracy against real arithmetic is a separate test axis.

enum class FlowStatus : uint8_t {
    Ok,
    Overflow,         // exponent wrapped above the representable range
    Underflow,        // exponent fell below range (zeroed or wrapped)
    Unrepresentable,  // no meaningful result (e.g. reciprocal of zero)
};

inline bool flow_ok(FlowStatus s) { return s == FlowStatus::Ok; }

struct SoftFloat {
    int64_t exp_code = 0;
    int64_t mant_code = 0;
    FloatFormat fmt;

    bool is_zero() const { return mant_code == 0; }
    double value() const;
    bool canonical() const;

    friend bool operator==(const SoftFloat& a, const SoftFloat& b) {
        return a.exp_code == b.exp_code && a.mant_code == b.mant_code && a.fmt.e == b.fmt.e &&
               a.fmt.m == b.fmt.m;
    }
};

struct SoftResult {
    SoftFloat value;
    FlowStatus status = FlowStatus::Ok;
};

enum class RoundMode : uint8_t { NearestEven, Truncate };

SoftResult o_encode(double x, FloatFormat fmt, RoundMode mode = RoundMode::NearestEven);
SoftFloat soft_zero(FloatFormat fmt);

SoftResult o_mul(const SoftFloat& a, const SoftFloat& b);
SoftResult o_add(const SoftFloat& a, const SoftFloat& b);
SoftFloat o_neg(const SoftFloat& a);
SoftFloat o_zeroexp(SoftFloat a);
SoftResult o_recip(const SoftFloat& a, int iterations);
// Horner evaluation of the exponential's series; in_range is cleared when
// |a| > 1 (accuracy unspecified there).
SoftResult o_exp(const SoftFloat& a, int order, bool* in_range = nullptr);

// Bit-level shift mirror: value v interpreted as an n-bit register (signed or
// not), shifted right by s places (left for negative s). Signed registers go
// through the absolute-value route, so odd negative values truncate toward
// zero on right shifts.
int64_t o_shift(int64_t v, uint32_t n, int64_t s, bool is_signed);

// Every canonical code exactly once, zero included (e + m <= 14).
std::vector<SoftFloat> enumerate_canonical(FloatFormat fmt);

// Fixed-point oracles on register codes (two's-complement wrap at n bits).
int64_t o_fixed_add(int64_t a, int64_t b, uint32_t n);
int64_t o_fixed_fma(int64_t acc, int64_t x, int64_t y, uint32_t n, bool x_signed, bool y_signed,
                    uint32_t xn, uint32_t yn);
int64_t o_fixed_negate(int64_t a, uint32_t n);

// Double-precision trapezoidal trajectory of du/dt = [[0,1],[-1,0]] u from
// u(0) = [0, -1], with the analytic solution -[sin t, cos t] alongside.
struct OdeSample {
    double t;
    double u1, u2;
    double u1_exact, u2_exact;
};
std::vector<OdeSample> o_ode_reference(double dt, int steps);

double soft_ulp(const SoftFloat& x);

}  // namespace qfp
