#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qfp {

// (n, f) fixed-point register descriptor: n qubits, f of them after the
// binary point, optionally two's-complement signed.
struct FixedFormat {
    uint32_t n = 0;
    uint32_t f = 0;
    bool is_signed = false;

    void validate() const {
        if (n < 1 || n > 64 || f > n) throw std::invalid_argument("invalid fixed format");
    }
};

struct FixedReg {
    std::vector<uint32_t> layout;  // qubit indices, LSB first
    FixedFormat format;

    uint32_t n() const { return static_cast<uint32_t>(layout.size()); }
};

// (e, m) float register descriptor. The mantissa is a two's-complement
// (m, m-1) fixed-point value in [-1, 1); the exponent a two's-complement
// integer. Canonical nonzero values have |mantissa| in [0.5, 1); zero is
// (mantissa 0, exponent 0).
struct FloatFormat {
    uint32_t e = 0;
    uint32_t m = 0;

    uint32_t width() const { return e + m; }

    void validate() const {
        if (e < 2 || m < 2 || e + m > 64) throw std::invalid_argument("invalid float format");
    }

    int64_t exp_min() const { return -(int64_t{1} << (e - 1)); }
    int64_t exp_max() const { return (int64_t{1} << (e - 1)) - 1; }
    int64_t mant_min_abs() const { return int64_t{1} << (m - 2); }   // |mantissa| = 0.5
    int64_t mant_max_abs() const { return (int64_t{1} << (m - 1)) - 1; }
};

struct FloatReg {
    FixedReg exp;   // e qubits, signed integer
    FixedReg mant;  // m qubits, signed, f = m-1
    FloatFormat fmt;
};

// Shift amount: a signed integer register; positive values shift right.
struct ShiftAmount {
    FixedReg reg;
};

inline int64_t fixed_code_mask_signed(uint64_t raw, uint32_t n) {
    if (n >= 64) return static_cast<int64_t>(raw);
    uint64_t mask = (uint64_t{1} << n) - 1;
    raw &= mask;
    if (raw & (uint64_t{1} << (n - 1))) return static_cast<int64_t>(raw) - (int64_t{1} << n);
    return static_cast<int64_t>(raw);
}

inline uint64_t fixed_code_wrap(int64_t code, uint32_t n) {
    if (n >= 64) return static_cast<uint64_t>(code);
    return static_cast<uint64_t>(code) & ((uint64_t{1} << n) - 1);
}

}  // namespace qfp
