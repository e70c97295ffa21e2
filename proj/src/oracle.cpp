#include "qfp/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace qfp {

namespace {

uint64_t wrap_u(int64_t v, uint32_t n) { return fixed_code_wrap(v, n); }

int64_t as_signed(uint64_t v, uint32_t n) { return fixed_code_mask_signed(v, n); }

}  // namespace

double SoftFloat::value() const {
    return std::ldexp(static_cast<double>(mant_code),
                      static_cast<int>(exp_code) - static_cast<int>(fmt.m - 1));
}

bool SoftFloat::canonical() const {
    if (mant_code == 0) return exp_code == 0;
    int64_t a = std::abs(mant_code);
    return a >= fmt.mant_min_abs() && a <= fmt.mant_max_abs() && exp_code >= fmt.exp_min() &&
           exp_code <= fmt.exp_max();
}

SoftFloat soft_zero(FloatFormat fmt) { return SoftFloat{0, 0, fmt}; }

SoftResult o_encode(double x, FloatFormat fmt, RoundMode mode) {
    fmt.validate();
    if (x == 0.0) return {soft_zero(fmt), FlowStatus::Ok};
    if (!std::isfinite(x)) return {soft_zero(fmt), FlowStatus::Unrepresentable};

    int exp = 0;
    double frac = std::frexp(std::abs(x), &exp);  // |x| = frac * 2^exp, frac in [0.5, 1)
    double scaled = std::ldexp(frac, static_cast<int>(fmt.m) - 1);
    int64_t mc;
    if (mode == RoundMode::NearestEven) {
        mc = static_cast<int64_t>(std::nearbyint(scaled));
    } else {
        mc = static_cast<int64_t>(std::floor(scaled));
    }
    if (mc == (int64_t{1} << (fmt.m - 1))) {  // rounded up to 1.0: renormalize
        mc >>= 1;
        exp += 1;
    }
    if (exp > fmt.exp_max()) return {soft_zero(fmt), FlowStatus::Overflow};
    if (exp < fmt.exp_min()) return {soft_zero(fmt), FlowStatus::Underflow};
    SoftFloat out{exp, x < 0 ? -mc : mc, fmt};
    return {out, FlowStatus::Ok};
}

int64_t o_shift(int64_t v, uint32_t n, int64_t s, bool is_signed) {
    uint64_t u = wrap_u(v, n);
    const bool neg = is_signed && ((u >> (n - 1)) & 1u);
    if (neg) u = wrap_u(-static_cast<int64_t>(u), n);  // absolute value (wraps for most-negative)
    if (s > 0) {
        u = (s >= static_cast<int64_t>(n)) ? 0 : (u >> s);
    } else if (s < 0) {
        int64_t d = -s;
        u = (d >= static_cast<int64_t>(n)) ? 0 : wrap_u(static_cast<int64_t>(u << d), n);
    }
    if (neg) u = wrap_u(-static_cast<int64_t>(u), n);
    return is_signed ? as_signed(u, n) : static_cast<int64_t>(u);
}

SoftResult o_mul(const SoftFloat& a, const SoftFloat& b) {
    const FloatFormat fmt = a.fmt;
    if (fmt.e != b.fmt.e || fmt.m != b.fmt.m) throw std::invalid_argument("o_mul: format mismatch");
    if (a.is_zero() || b.is_zero()) return {soft_zero(fmt), FlowStatus::Ok};

    const uint32_t m = fmt.m;
    const uint32_t prod_n = 2 * m - 1;

    // Full fused product of the mantissa codes in a (2m-1)-bit register.
    uint64_t acc = wrap_u(a.mant_code * b.mant_code, prod_n);

    // Top m+1 bits [mantissa, one guard]; sign taken from the full product.
    const bool sign = (acc >> (prod_n - 1)) & 1u;
    uint64_t view = acc >> (m - 2);
    if (sign) view = wrap_u(-static_cast<int64_t>(view), m + 1);

    // Renormalizing left shift (with exponent decrement) when |product| < 0.5.
    const bool norm_shift = ((view >> (m - 1)) & 1u) == 0;
    if (norm_shift) view = wrap_u(static_cast<int64_t>(view << 1), m + 1);
    if (sign) view = wrap_u(-static_cast<int64_t>(view), m + 1);

    int64_t mant = as_signed(view, m + 1) >> 1;  // drop the guard (floor)

    // Exponent sum with one extension bit, as the circuit computes it.
    const int64_t sum_true = a.exp_code + b.exp_code - (norm_shift ? 1 : 0);
    const int64_t e_half = int64_t{1} << (fmt.e - 1);
    if (sum_true >= -2 * e_half && sum_true < -e_half) {
        // Detected underflow: the mantissa is zeroed, then the exponent too.
        return {soft_zero(fmt), FlowStatus::Underflow};
    }
    SoftFloat out{as_signed(wrap_u(sum_true, fmt.e), fmt.e), mant, fmt};
    FlowStatus status = FlowStatus::Ok;
    if (sum_true > fmt.exp_max()) status = FlowStatus::Overflow;
    if (sum_true < -2 * e_half) status = FlowStatus::Underflow;  // wrapped past the detector
    return {out, status};
}

SoftResult o_add(const SoftFloat& a, const SoftFloat& b) {
    const FloatFormat fmt = a.fmt;
    if (fmt.e != b.fmt.e || fmt.m != b.fmt.m) throw std::invalid_argument("o_add: format mismatch");
    const uint32_t m = fmt.m;

    const int64_t diff = a.exp_code - b.exp_code;  // exact: one extension bit in-circuit
    // A zero operand is forced to the "smaller" side whatever its exponent
    // code says; otherwise the alignment shift would shred the other addend.
    bool a_small;
    if (a.mant_code == 0) {
        a_small = true;
    } else if (b.mant_code == 0) {
        a_small = false;
    } else {
        a_small = diff < 0;
    }
    const SoftFloat& small = a_small ? a : b;
    const SoftFloat& big = a_small ? b : a;
    const int64_t d = a_small ? -diff : diff;

    // Small operand with one guard position below, aligned down.
    int64_t sm1 = o_shift(small.mant_code * 2, m + 1, d, true);
    int64_t s = sm1 + big.mant_code * 2;  // fits an (m+2)-bit signed register

    const bool sign = s < 0;
    int64_t mag = sign ? -s : s;

    // Leading-zero scan over the m+1 low positions; counter starts at one.
    int64_t shift_amt = 1;
    for (int k = static_cast<int>(m); k >= 0; --k) {
        if ((mag >> k) & 1) break;
        shift_amt -= 1;
    }
    mag = o_shift(mag, m + 2, shift_amt, true);

    int64_t mant_mag = (mag >> 1) & ((int64_t{1} << m) - 1);
    int64_t mant = sign ? as_signed(wrap_u(-mant_mag, m), m) : mant_mag;

    if (mant == 0) return {soft_zero(fmt), FlowStatus::Ok};

    const int64_t exp_true = big.exp_code + shift_amt;
    SoftFloat out{as_signed(wrap_u(exp_true, fmt.e), fmt.e), mant, fmt};
    FlowStatus status = FlowStatus::Ok;
    if (exp_true > fmt.exp_max()) status = FlowStatus::Overflow;
    if (exp_true < fmt.exp_min()) status = FlowStatus::Underflow;
    return {out, status};
}

SoftFloat o_neg(const SoftFloat& a) {
    SoftFloat out = a;
    out.mant_code = as_signed(wrap_u(-a.mant_code, a.fmt.m), a.fmt.m);
    return out;
}

SoftFloat o_zeroexp(SoftFloat a) {
    if (a.mant_code == 0) a.exp_code = 0;
    return a;
}

SoftResult o_recip(const SoftFloat& a, int iterations) {
    const FloatFormat fmt = a.fmt;
    if (a.is_zero()) return {soft_zero(fmt), FlowStatus::Unrepresentable};

    const int64_t guess_exp = 1 - a.exp_code;
    if (guess_exp > fmt.exp_max() || guess_exp < fmt.exp_min()) {
        return {soft_zero(fmt), FlowStatus::Unrepresentable};
    }
    SoftResult two = o_encode(2.0, fmt);
    if (!flow_ok(two.status)) return {soft_zero(fmt), FlowStatus::Unrepresentable};

    SoftFloat x{guess_exp, a.mant_code < 0 ? -fmt.mant_min_abs() : fmt.mant_min_abs(), fmt};
    for (int it = 0; it < iterations; ++it) {
        SoftResult t = o_mul(a, x);
        if (!flow_ok(t.status)) return {x, t.status};
        SoftResult sum = o_add(two.value, o_neg(t.value));
        if (!flow_ok(sum.status)) return {x, sum.status};
        SoftResult next = o_mul(x, sum.value);
        if (!flow_ok(next.status)) return {x, next.status};
        x = next.value;
    }
    return {x, FlowStatus::Ok};
}

SoftResult o_exp(const SoftFloat& a, int order, bool* in_range) {
    const FloatFormat fmt = a.fmt;
    if (order < 1) throw std::invalid_argument("o_exp: order must be >= 1");
    if (in_range) *in_range = std::abs(a.value()) <= 1.0;

    SoftResult one = o_encode(1.0, fmt);
    if (!flow_ok(one.status)) return {soft_zero(fmt), FlowStatus::Unrepresentable};

    auto step = [&](const SoftFloat& h, int k) -> SoftResult {
        SoftResult ck = o_encode(1.0 / k, fmt);
        if (!flow_ok(ck.status)) return {h, ck.status};
        SoftResult xk = o_mul(a, ck.value);
        if (!flow_ok(xk.status)) return {h, xk.status};
        SoftResult prod = o_mul(xk.value, h);
        if (!flow_ok(prod.status)) return {h, prod.status};
        return o_add(one.value, prod.value);
    };

    // Innermost term 1 + x/N, then peel outward.
    SoftResult ck = o_encode(1.0 / order, fmt);
    if (!flow_ok(ck.status)) return {soft_zero(fmt), ck.status};
    SoftResult xn = o_mul(a, ck.value);
    if (!flow_ok(xn.status)) return {soft_zero(fmt), xn.status};
    SoftResult h = o_add(one.value, xn.value);
    if (!flow_ok(h.status)) return h;
    for (int k = order - 1; k >= 1; --k) {
        h = step(h.value, k);
        if (!flow_ok(h.status)) return h;
    }
    return h;
}

std::vector<SoftFloat> enumerate_canonical(FloatFormat fmt) {
    fmt.validate();
    if (fmt.e + fmt.m > 14) throw std::invalid_argument("enumerate_canonical: width bound exceeded");
    std::vector<SoftFloat> out;
    out.push_back(soft_zero(fmt));
    for (int64_t ec = fmt.exp_min(); ec <= fmt.exp_max(); ++ec) {
        for (int64_t mc = fmt.mant_min_abs(); mc <= fmt.mant_max_abs(); ++mc) {
            out.push_back(SoftFloat{ec, mc, fmt});
            out.push_back(SoftFloat{ec, -mc, fmt});
        }
    }
    return out;
}

int64_t o_fixed_add(int64_t a, int64_t b, uint32_t n) {
    return static_cast<int64_t>(wrap_u(a + b, n));
}

int64_t o_fixed_fma(int64_t acc, int64_t x, int64_t y, uint32_t n, bool x_signed, bool y_signed,
                    uint32_t xn, uint32_t yn) {
    int64_t xv = x_signed ? as_signed(wrap_u(x, xn), xn) : static_cast<int64_t>(wrap_u(x, xn));
    int64_t yv = y_signed ? as_signed(wrap_u(y, yn), yn) : static_cast<int64_t>(wrap_u(y, yn));
    return static_cast<int64_t>(wrap_u(acc + xv * yv, n));
}

int64_t o_fixed_negate(int64_t a, uint32_t n) { return static_cast<int64_t>(wrap_u(-a, n)); }

std::vector<OdeSample> o_ode_reference(double dt, int steps) {
    if (dt <= 0) throw std::invalid_argument("o_ode_reference: dt must be positive");
    std::vector<OdeSample> out;
    out.reserve(steps + 1);
    const double denom = 1.0 + dt * dt / 4.0;
    const double alpha = (1.0 - dt * dt / 4.0) / denom;
    const double beta = dt / denom;
    double u1 = 0.0, u2 = -1.0;
    for (int k = 0; k <= steps; ++k) {
        double t = k * dt;
        out.push_back({t, u1, u2, -std::sin(t), -std::cos(t)});
        double n1 = alpha * u1 + beta * u2;
        double n2 = -beta * u1 + alpha * u2;
        u1 = n1;
        u2 = n2;
    }
    return out;
}

double soft_ulp(const SoftFloat& x) {
    return std::ldexp(1.0, static_cast<int>(x.exp_code) - static_cast<int>(x.fmt.m - 1));
}

}  // namespace qfp
