#include "qfp/float_ops.hpp"

#include <algorithm>
#include <stdexcept>

namespace qfp {

namespace {

FixedReg one_bit_signed(uint32_t qubit) {
    FixedReg r;
    r.layout = {qubit};
    r.format = FixedFormat{1, 0, true};
    return r;
}

FixedReg make_reg(std::vector<uint32_t> layout, bool is_signed) {
    FixedReg r;
    r.layout = std::move(layout);
    r.format = FixedFormat{static_cast<uint32_t>(r.layout.size()), 0, is_signed};
    return r;
}

void check_formats(const FloatReg& a, const FloatReg& b) {
    if (a.fmt.e != b.fmt.e || a.fmt.m != b.fmt.m) {
        throw std::invalid_argument("float register format mismatch");
    }
}

}  // namespace

FloatReg alloc_float_reg(CircuitBuilder& b, const std::string& name, FloatFormat fmt) {
    fmt.validate();
    FloatReg r;
    r.fmt = fmt;
    r.mant.layout = b.alloc_register(name + ".m", fmt.m);
    r.mant.format = FixedFormat{fmt.m, fmt.m - 1, true};
    r.exp.layout = b.alloc_register(name + ".e", fmt.e);
    r.exp.format = FixedFormat{fmt.e, 0, true};
    return r;
}

void load_soft_constant(CircuitBuilder& b, const FloatReg& reg, const SoftFloat& value) {
    uint64_t mant = fixed_code_wrap(value.mant_code, reg.fmt.m);
    uint64_t exp = fixed_code_wrap(value.exp_code, reg.fmt.e);
    for (uint32_t i = 0; i < reg.fmt.m; ++i) {
        if ((mant >> i) & 1u) b.emit(g_x(reg.mant.layout[i]));
    }
    for (uint32_t i = 0; i < reg.fmt.e; ++i) {
        if ((exp >> i) & 1u) b.emit(g_x(reg.exp.layout[i]));
    }
}

void reset_fixed_reg(CircuitBuilder& b, const FixedReg& reg) {
    for (uint32_t q : reg.layout) b.emit_reset(q);
}

void reset_float_reg(CircuitBuilder& b, const FloatReg& reg) {
    reset_fixed_reg(b, reg.mant);
    reset_fixed_reg(b, reg.exp);
}

void shift_inplace(CircuitBuilder& b, const FixedReg& q, const FixedReg& s,
                   const std::array<uint32_t, 4>& anc) {
    const int n = static_cast<int>(q.n());
    const int ms = static_cast<int>(s.n());
    const uint32_t a0 = anc[0], a1 = anc[1], a2 = anc[2], a3 = anc[3];

    auto clear_under_flag = [&](uint32_t target) {
        b.emit_reset(a0);
        b.emit(g_cx(ctrl(target), a0));
        b.emit(g_ccx(ctrl(a0), ctrl(a1), target));
    };

    if (q.format.is_signed) {
        copy_bit(b, q.layout[n - 1], a3);
        negate(b, q, ctrl(a3));
    }

    // Right shifts, one power of two per stage, active only while s >= 0.
    for (int k = ms - 2; k >= 0; --k) {
        const int64_t d = int64_t{1} << k;
        b.emit_reset(a1);
        b.emit(g_ccx(ctrl(s.layout[k]), ctrl0(s.layout[ms - 1]), a1));
        if (d < n) {
            for (int l = 0; l + d < n; ++l) {
                b.emit(g_cswap(ctrl(a1), q.layout[l], q.layout[l + d]));
            }
        }
        for (int l = std::max<int64_t>(n - d, 0); l < n; ++l) clear_under_flag(q.layout[l]);
    }

    // Left shifts on the negated amount, active only while s < 0.
    copy_bit(b, s.layout[ms - 1], a2);
    negate(b, s);
    for (int k = ms - 1; k >= 0; --k) {
        const int64_t d = int64_t{1} << k;
        b.emit_reset(a1);
        b.emit(g_ccx(ctrl(s.layout[k]), ctrl(a2), a1));
        if (d < n) {
            for (int l = n - 1; l >= d; --l) {
                b.emit(g_cswap(ctrl(a1), q.layout[l], q.layout[l - d]));
            }
        }
        for (int l = static_cast<int>(std::min<int64_t>(d - 1, n - 1)); l >= 0; --l) {
            clear_under_flag(q.layout[l]);
        }
    }
    negate(b, s);

    if (q.format.is_signed) negate(b, q, ctrl(a3));
}

void zero_exp(CircuitBuilder& b, const FloatReg& q, const std::array<uint32_t, 2>& anc) {
    const uint32_t a0 = anc[0], a1 = anc[1];
    for (int k = static_cast<int>(q.fmt.m) - 1; k >= 0; --k) {
        b.emit_reset(a1);
        b.emit(g_ccx(ctrl(q.mant.layout[k]), ctrl0(a0), a1));
        b.emit(g_ccx(ctrl(q.mant.layout[k]), ctrl(a1), a0));
    }
    for (int k = static_cast<int>(q.fmt.e) - 1; k >= 0; --k) {
        b.emit_reset(a1);
        b.emit(g_ccx(ctrl(q.exp.layout[k]), ctrl0(a0), a1));
        b.emit(g_cx(ctrl(a1), q.exp.layout[k]));
    }
}

void fneg(CircuitBuilder& b, const FloatReg& q) { negate(b, q.mant); }

void fmul(CircuitBuilder& b, const FloatReg& q, const FloatReg& r, const FloatReg& out) {
    check_formats(q, r);
    check_formats(q, out);
    const uint32_t m = out.fmt.m;
    const uint32_t e = out.fmt.e;

    // Full mantissa product into [low ancillae, out.mant].
    std::vector<uint32_t> ext = b.alloc_ancillas(m - 1);
    std::vector<uint32_t> acc_layout = ext;
    acc_layout.insert(acc_layout.end(), out.mant.layout.begin(), out.mant.layout.end());
    fma(b, make_reg(acc_layout, true), q.mant, r.mant);

    // Only the bit just below the mantissa stays as a guard; the rest of the
    // product tail is discarded now so the qubits can serve the later steps.
    const uint32_t guard = ext[m - 2];
    for (uint32_t i = 0; i + 2 < m; ++i) b.release_ancilla_reset(ext[i]);

    std::vector<uint32_t> mg_layout{guard};
    mg_layout.insert(mg_layout.end(), out.mant.layout.begin(), out.mant.layout.end());
    FixedReg mg = make_reg(mg_layout, true);

    // Absolute value, renormalizing left shift when |product| < 0.5, exponent
    // decrement, then undo the absolute value.
    const uint32_t sv = b.alloc_ancilla();
    copy_bit(b, out.mant.layout[m - 1], sv);
    negate(b, mg, ctrl(sv));

    const uint32_t nf = b.alloc_ancilla();
    copy_bit(b, out.mant.layout[m - 2], nf);
    b.emit(g_x(nf));

    std::vector<uint32_t> sh = b.alloc_ancillas(4);
    shift_inplace(b, mg, one_bit_signed(nf), {sh[0], sh[1], sh[2], sh[3]});
    for (uint32_t a : sh) b.release_ancilla_reset(a);

    add_reg(b, out.exp, one_bit_signed(nf));  // -1 when the shift fired

    negate(b, mg, ctrl(sv));
    b.release_ancilla_reset(guard);
    b.release_ancilla_reset(sv);
    b.release_ancilla_reset(nf);

    // Exponent sum with a sign-extension qubit; pattern (extension=1, sign=0)
    // detects underflow, which zeroes the mantissa.
    const uint32_t xb = b.alloc_ancilla();
    copy_bit(b, out.exp.layout[e - 1], xb);
    std::vector<uint32_t> e1_layout = out.exp.layout;
    e1_layout.push_back(xb);
    FixedReg e1 = make_reg(e1_layout, true);
    b.begin_fourier(e1.layout);
    add_reg(b, e1, q.exp);
    add_reg(b, e1, r.exp);
    b.end_fourier();

    const uint32_t uf = b.alloc_ancilla();
    b.emit(g_ccx(ctrl(xb), ctrl0(out.exp.layout[e - 1]), uf));

    const uint32_t tmp = b.alloc_ancilla();
    for (int k = static_cast<int>(m) - 1; k >= 0; --k) {
        b.emit_reset(tmp);
        b.emit(g_cx(ctrl(out.mant.layout[k]), tmp));
        b.emit(g_ccx(ctrl(tmp), ctrl(uf), out.mant.layout[k]));
    }
    b.release_ancilla_reset(tmp);
    b.release_ancilla_reset(uf);
    b.release_ancilla_reset(xb);

    std::vector<uint32_t> za = b.alloc_ancillas(2);
    zero_exp(b, out, {za[0], za[1]});
    b.release_ancilla_reset(za[0]);
    b.release_ancilla_reset(za[1]);
}

void fadd(CircuitBuilder& b, const FloatReg& q, const FloatReg& r, const FloatReg& out) {
    check_formats(q, r);
    check_formats(q, out);
    const uint32_t m = out.fmt.m;
    const uint32_t e = out.fmt.e;

    const uint32_t a0 = b.alloc_ancilla();
    const uint32_t dx = b.alloc_ancilla();  // exponent-difference extension bit
    const uint32_t g = b.alloc_ancilla();   // guard below the mantissa

    // Exact exponent difference q.e - r.e in e+1 bits.
    copy_reg(b, q.exp, out.exp);
    copy_bit(b, q.exp.layout[e - 1], dx);
    std::vector<uint32_t> de_layout = out.exp.layout;
    de_layout.push_back(dx);
    FixedReg de = make_reg(de_layout, true);
    add_reg(b, de, r.exp, -1);

    // Branch select: a0 = 1 iff q is the smaller operand. A zero mantissa
    // forces its side to "smaller" whatever the exponent codes say; otherwise
    // the alignment shift would shred the nonzero addend.
    const uint32_t nzq = b.alloc_ancilla();
    const uint32_t nzr = b.alloc_ancilla();
    const uint32_t zsc = b.alloc_ancilla();
    for (int k = static_cast<int>(m) - 1; k >= 0; --k) {
        b.emit_reset(zsc);
        b.emit(g_ccx(ctrl(q.mant.layout[k]), ctrl0(nzq), zsc));
        b.emit(g_ccx(ctrl(q.mant.layout[k]), ctrl(zsc), nzq));
    }
    for (int k = static_cast<int>(m) - 1; k >= 0; --k) {
        b.emit_reset(zsc);
        b.emit(g_ccx(ctrl(r.mant.layout[k]), ctrl0(nzr), zsc));
        b.emit(g_ccx(ctrl(r.mant.layout[k]), ctrl(zsc), nzr));
    }
    b.emit_reset(zsc);
    b.emit(g_ccx(ctrl(dx), ctrl(nzr), zsc));   // diff < 0 and r nonzero
    b.emit(g_x(a0));
    b.emit(g_ccx(ctrl0(zsc), ctrl(nzq), a0));  // a0 = (diff<0 and r!=0) or q==0
    b.release_ancilla_reset(zsc);
    b.release_ancilla_reset(nzq);
    b.release_ancilla_reset(nzr);

    // Copy the smaller-exponent operand's mantissa into the output.
    for (uint32_t k = 0; k < m; ++k) {
        b.emit(g_ccx(ctrl(a0), ctrl(q.mant.layout[k]), out.mant.layout[k]));
    }
    b.emit(g_x(a0));  // a0 = 1 iff the difference is >= 0
    for (uint32_t k = 0; k < m; ++k) {
        b.emit(g_ccx(ctrl(a0), ctrl(r.mant.layout[k]), out.mant.layout[k]));
    }

    // Align: shift the copied mantissa (with guard) right by |difference|.
    negate(b, de, ctrl0(a0));
    std::vector<uint32_t> mg1_layout{g};
    mg1_layout.insert(mg1_layout.end(), out.mant.layout.begin(), out.mant.layout.end());
    FixedReg mg1 = make_reg(mg1_layout, true);
    {
        std::vector<uint32_t> sh = b.alloc_ancillas(4);
        shift_inplace(b, mg1, de, {sh[0], sh[1], sh[2], sh[3]});
        for (uint32_t a : sh) b.release_ancilla_reset(a);
    }

    // The difference has served its purpose; the exponent register becomes
    // the renormalization counter.
    for (uint32_t qb : out.exp.layout) b.emit_reset(qb);
    b.release_ancilla_reset(dx);

    // Sign-extend into an overflow qubit, then add the larger operand.
    const uint32_t ov = b.alloc_ancilla();
    copy_bit(b, out.mant.layout[m - 1], ov);
    std::vector<uint32_t> mg2_layout = mg1_layout;
    mg2_layout.push_back(ov);
    FixedReg mg2 = make_reg(mg2_layout, true);
    b.begin_fourier(mg2.layout);
    add_reg(b, mg2, q.mant, 1, 1, {ctrl(a0)});
    add_reg(b, mg2, r.mant, 1, 1, {ctrl0(a0)});
    b.end_fourier();

    const uint32_t sgn = b.alloc_ancilla();
    copy_bit(b, ov, sgn);
    negate(b, mg2, ctrl(sgn));

    // Leading-zero scan: counter starts at +1 and loses 1 per zero qubit
    // until the first nonzero one, walking the mantissa-plus-guard from the
    // top. The counter lives in the output exponent register.
    b.emit(g_x(out.exp.layout[0]));
    const uint32_t fl = b.alloc_ancilla();
    const uint32_t sc = b.alloc_ancilla();
    b.begin_fourier(out.exp.layout);
    for (int k = static_cast<int>(m); k >= 0; --k) {
        AddStep dec;
        dec.op = AddStep::Op::AddConst;
        dec.constant = -1;
        dec.ctrls = {ctrl0(mg1.layout[k]), ctrl0(fl)};
        b.add_step(std::move(dec));
        b.emit_reset(sc);
        b.emit(g_cx(ctrl(fl), sc));
        b.emit(g_ccx(ctrl(mg1.layout[k]), ctrl0(sc), fl));
    }
    b.end_fourier();
    b.release_ancilla_reset(fl);
    b.release_ancilla_reset(sc);

    // Renormalizing shift by the counter, then restore the sum's sign.
    {
        std::vector<uint32_t> sh = b.alloc_ancillas(4);
        shift_inplace(b, mg2, out.exp, {sh[0], sh[1], sh[2], sh[3]});
        for (uint32_t a : sh) b.release_ancilla_reset(a);
    }
    negate(b, out.mant, ctrl(sgn));

    // Exponent fix-up: counter plus the larger operand's exponent.
    b.begin_fourier(out.exp.layout);
    add_reg(b, out.exp, q.exp, 1, 0, {ctrl(a0)});
    add_reg(b, out.exp, r.exp, 1, 0, {ctrl0(a0)});
    b.end_fourier();

    b.release_ancilla_reset(g);
    b.release_ancilla_reset(ov);
    b.release_ancilla_reset(sgn);
    b.release_ancilla_reset(a0);

    std::vector<uint32_t> za = b.alloc_ancillas(2);
    zero_exp(b, out, {za[0], za[1]});
    b.release_ancilla_reset(za[0]);
    b.release_ancilla_reset(za[1]);
}

RecipWorkspace alloc_recip_workspace(CircuitBuilder& b, FloatFormat fmt) {
    RecipWorkspace ws;
    ws.r0 = alloc_float_reg(b, "recip.w0", fmt);
    ws.r1 = alloc_float_reg(b, "recip.w1", fmt);
    ws.r2 = alloc_float_reg(b, "recip.w2", fmt);
    ws.two = alloc_float_reg(b, "recip.two", fmt);
    return ws;
}

FloatReg recip(CircuitBuilder& b, const FloatReg& q, int iterations, RecipWorkspace& ws) {
    const FloatFormat fmt = q.fmt;
    SoftResult two = o_encode(2.0, fmt);
    if (!flow_ok(two.status)) throw std::invalid_argument("recip: constant 2 unrepresentable");
    load_soft_constant(b, ws.two, two.value);

    // Initial guess: mantissa +-0.5 with the input's sign, exponent 1 - q_e.
    FloatReg* x = &ws.r0;
    FloatReg* t1 = &ws.r1;
    FloatReg* t2 = &ws.r2;
    b.emit(g_x(x->mant.layout[fmt.m - 2]));
    negate(b, x->mant, ctrl(q.mant.layout[fmt.m - 1]));
    b.emit(g_x(x->exp.layout[0]));
    add_reg(b, x->exp, q.exp, -1);

    for (int it = 0; it < iterations; ++it) {
        fmul(b, q, *x, *t1);
        fneg(b, *t1);
        fadd(b, ws.two, *t1, *t2);
        reset_float_reg(b, *t1);
        fmul(b, *x, *t2, *t1);
        reset_float_reg(b, *x);
        reset_float_reg(b, *t2);
        std::swap(x, t1);
    }
    return *x;
}

ExpWorkspace alloc_exp_workspace(CircuitBuilder& b, FloatFormat fmt) {
    ExpWorkspace ws;
    ws.one = alloc_float_reg(b, "exp.one", fmt);
    ws.ck = alloc_float_reg(b, "exp.ck", fmt);
    ws.h = alloc_float_reg(b, "exp.h", fmt);
    ws.t = alloc_float_reg(b, "exp.t", fmt);
    ws.u = alloc_float_reg(b, "exp.u", fmt);
    return ws;
}

FloatReg fexp(CircuitBuilder& b, const FloatReg& q, int order, ExpWorkspace& ws) {
    if (order < 1) throw std::invalid_argument("fexp: order must be >= 1");
    const FloatFormat fmt = q.fmt;
    SoftResult one = o_encode(1.0, fmt);
    if (!flow_ok(one.status)) throw std::invalid_argument("fexp: constant 1 unrepresentable");
    load_soft_constant(b, ws.one, one.value);

    FloatReg* h = &ws.h;
    FloatReg* t = &ws.t;
    FloatReg* u = &ws.u;

    // Innermost 1 + x/order, then peel the Horner nesting outward.
    SoftFloat cn = o_encode(1.0 / order, fmt).value;
    load_soft_constant(b, ws.ck, cn);
    fmul(b, q, ws.ck, *t);
    fadd(b, ws.one, *t, *h);
    reset_float_reg(b, *t);
    load_soft_constant(b, ws.ck, cn);  // unload (self-inverse)

    for (int k = order - 1; k >= 1; --k) {
        SoftFloat c = o_encode(1.0 / k, fmt).value;
        load_soft_constant(b, ws.ck, c);
        fmul(b, q, ws.ck, *t);
        fmul(b, *t, *h, *u);
        reset_float_reg(b, *t);
        reset_float_reg(b, *h);
        fadd(b, ws.one, *u, *t);
        reset_float_reg(b, *u);
        load_soft_constant(b, ws.ck, c);
        std::swap(h, t);
    }
    return *h;
}

void set_fixed_bits(Basis& basis, const FixedReg& reg, int64_t code) {
    uint64_t raw = fixed_code_wrap(code, reg.n());
    for (uint32_t i = 0; i < reg.n(); ++i) basis.set(reg.layout[i], (raw >> i) & 1u);
}

int64_t read_fixed_bits(const Basis& basis, const FixedReg& reg) {
    uint64_t raw = 0;
    for (uint32_t i = 0; i < reg.n(); ++i) {
        if (basis.test(reg.layout[i])) raw |= uint64_t{1} << i;
    }
    if (reg.format.is_signed) return fixed_code_mask_signed(raw, reg.n());
    return static_cast<int64_t>(raw);
}

void set_float_bits(Basis& basis, const FloatReg& reg, const SoftFloat& value) {
    set_fixed_bits(basis, reg.mant, value.mant_code);
    set_fixed_bits(basis, reg.exp, value.exp_code);
}

SoftFloat read_float_bits(const Basis& basis, const FloatReg& reg) {
    SoftFloat v;
    v.fmt = reg.fmt;
    v.mant_code = read_fixed_bits(basis, reg.mant);
    v.exp_code = read_fixed_bits(basis, reg.exp);
    return v;
}

}  // namespace qfp
